#pragma once

// Pipeline subcommands over files. Each returns the stage record it would
// append to the run manifest.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wbsample/config.hpp"

namespace wbsample::pipeline {

namespace fs = std::filesystem;

enum class InputFormat { urls, surt, zipnum, cdx };
std::optional<InputFormat> parse_input_format(std::string_view name);

// `url \t timestamp \t mime`, as written by fetch-first.
struct FirstCaptureRow {
  std::string url;
  Timestamp14 timestamp;
  std::string mime;
  std::string str() const;
};

std::vector<std::string> read_lines(const fs::path& path);
std::vector<FirstCaptureRow> read_first_capture_file(const fs::path& path);
std::string format_rows(const std::vector<FirstCaptureRow>& rows);

// Verdict TSV per input line. SURT-keyed inputs are converted to URLs with the
// configured scheme and deduplicated by key.
struct FilterOptions {
  fs::path input;
  fs::path output;
  InputFormat format = InputFormat::urls;
};
StageRecord cmd_filter(const FilterOptions& opt, const PipelineConfig& cfg);

// Keeps valid likely-HTML URLs that are not session, index or wildcard
// aliases. URLs of popular domains go to a separate file when one is given.
struct ClassifyOptions {
  fs::path input;
  fs::path output;
  fs::path popular_output;
};
StageRecord cmd_classify(const ClassifyOptions& opt, const PipelineConfig& cfg);

// First capture of every URL; unarchived URLs are listed separately.
struct FetchFirstOptions {
  fs::path input;
  fs::path output;
  fs::path unarchived;
};
StageRecord cmd_fetch_first(const FetchFirstOptions& opt, const PipelineConfig& cfg);

// bucket -> upsample roots -> tail-reduce -> calibrate -> select. Writes one
// `<label>.txt` per bucket plus allocations.tsv.
struct SampleOptions {
  fs::path input;
  fs::path outdir;
  bool upsample_roots = false;  // needs the client endpoint
};
StageRecord cmd_sample(const SampleOptions& opt, const PipelineConfig& cfg);

struct ReintegrateOptions {
  std::string domain;
  fs::path candidates;
  fs::path output;  // first-capture rows of the drawn URLs
};
StageRecord cmd_reintegrate(const ReintegrateOptions& opt, const PipelineConfig& cfg);

// One TimeMap file per URL in `timemap_dir`. Existing files are skipped, so an
// interrupted run can be resumed. Unarchived URLs get an empty file.
struct FetchOptions {
  std::vector<fs::path> inputs;  // URL lists, or directories of *.txt lists
  fs::path timemap_dir;
  fs::path report;
  fs::path log;
};
StageRecord cmd_fetch(const FetchOptions& opt, const PipelineConfig& cfg);

struct RehydrateOptions {
  fs::path input_dir;
  fs::path output_dir;
  fs::path unresolved;  // `urlkey \t position \t digest`
};
StageRecord cmd_rehydrate(const RehydrateOptions& opt, const PipelineConfig& cfg);

struct StatsOptions {
  fs::path first_capture;  // histogram, domain counts before, precision
  fs::path sample_dir;     // domain counts after
  fs::path timemap_dir;    // mementos per URL
  fs::path verdicts;       // heuristic precision
  fs::path outdir;
  std::size_t top = 20;
};
StageRecord cmd_stats(const StatsOptions& opt, const PipelineConfig& cfg);

}  // namespace wbsample::pipeline
