// Command-line front end for the sampling pipeline.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "wbsample/commands.hpp"
#include "wbsample/mock_server.hpp"
#include "wbsample/sampler.hpp"

namespace fs = std::filesystem;
using namespace wbsample;

namespace {

// Flags shared by every subcommand; a set flag beats the config file.
struct Overrides {
  std::string config;
  std::string manifest;
  std::optional<std::uint64_t> seed, interval, c, target, tail_threshold, per_year_min;
  std::optional<double> k, tail_keep;
  std::optional<std::size_t> cache_capacity;
  std::optional<unsigned> workers, politeness, max_attempts;
  std::optional<double> backoff_base, delay, timeout;
  std::optional<std::string> scheme, endpoint, storage;
  std::vector<std::string> popular;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config, "JSON config file");
    sub->add_option("--manifest", manifest, "run manifest to append to");
    sub->add_option("--seed", seed);
    sub->add_option("--interval", interval, "secondary index sampling interval");
    sub->add_option("--scheme", scheme, "scheme for SURT-derived URLs (http|https)");
    sub->add_option("--k", k, "fixed K; disables calibration");
    sub->add_option("--c", c);
    sub->add_option("--target", target, "URLs per bucket");
    sub->add_option("--tail-threshold", tail_threshold);
    sub->add_option("--tail-keep", tail_keep);
    sub->add_option("--per-year-min", per_year_min);
    sub->add_option("--cache-capacity", cache_capacity);
    sub->add_option("--workers", workers);
    sub->add_option("--endpoint", endpoint, "CDX API endpoint");
    sub->add_option("--politeness", politeness, "concurrent requests ceiling");
    sub->add_option("--delay", delay, "seconds between requests per permit");
    sub->add_option("--max-attempts", max_attempts);
    sub->add_option("--backoff-base", backoff_base, "seconds");
    sub->add_option("--timeout", timeout, "seconds");
    sub->add_option("--storage", storage, "directory for raw responses");
    sub->add_option("--popular", popular, "popular domain (repeatable)");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config.empty() ? PipelineConfig{} : PipelineConfig::load(config);
    if (seed) cfg.seed = *seed;
    if (interval) cfg.interval = *interval;
    if (scheme) {
      auto s = parse_scheme(*scheme);
      if (!s) throw ConfigError("scheme must be http or https");
      cfg.scheme = *s;
    }
    if (k) {
      cfg.downsample.k = *k;
      cfg.calibrate = false;
    }
    if (c) cfg.downsample.c = *c;
    if (target) cfg.downsample.target = *target;
    if (tail_threshold) cfg.downsample.tail_threshold = *tail_threshold;
    if (tail_keep) cfg.downsample.tail_keep_fraction = *tail_keep;
    if (per_year_min) cfg.per_year_min = *per_year_min;
    if (cache_capacity) cfg.cache_capacity = *cache_capacity;
    if (workers) cfg.workers = *workers;
    if (endpoint) cfg.client.endpoint = *endpoint;
    if (politeness) cfg.client.politeness = *politeness;
    if (delay) cfg.client.inter_request_delay = *delay;
    if (max_attempts) cfg.client.max_attempts = *max_attempts;
    if (backoff_base) cfg.client.backoff_base = *backoff_base;
    if (timeout) cfg.client.timeout = *timeout;
    if (storage) cfg.client.storage_dir = *storage;
    if (!popular.empty()) cfg.popular_domains = popular;
    cfg.client.seed = cfg.seed;
    cfg.validate();
    return cfg;
  }
};

void record(const Overrides& o, const StageRecord& rec) {
  std::cerr << rec.stage << ": in=" << rec.input_count << " out=" << rec.output_count << "\n";
  if (o.manifest.empty()) return;
  auto m = RunManifest::load_or_new(o.manifest);
  m.add(rec);
  m.save(o.manifest);
}

std::vector<CdxRecord> load_corpus(const std::vector<std::string>& files) {
  std::vector<CdxRecord> all;
  for (const auto& f : files) {
    auto recs = parse_cdx_text(read_file(f));
    all.insert(all.end(), recs.begin(), recs.end());
  }
  return all;
}

// Keeps every interval-th CDX line and writes secondary index lines pointing
// at the byte range each kept line starts.
StageRecord skip_sample_file(const fs::path& input, const fs::path& output,
                             std::uint64_t interval, std::uint64_t phase) {
  SkipSampler sampler(interval, phase);
  auto text = read_file(input);
  const std::string part = input.stem().string();
  std::vector<std::pair<std::size_t, std::string>> kept;  // (offset, key+ts)
  std::size_t pos = 0, line_no = 0;
  StageRecord rec{"skip-sample"};
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto end = nl == std::string::npos ? text.size() : nl;
    std::string_view line(text.data() + pos, end - pos);
    ++line_no;
    if (!line.empty()) {
      ++rec.input_count;
      if (sampler.accept()) {
        auto r = parse_cdx_line(line, line_no);
        kept.emplace_back(pos, r.urlkey + " " + r.timestamp.str());
      }
    }
    pos = end + 1;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + output.string());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto next = i + 1 < kept.size() ? kept[i + 1].first : text.size();
    out << kept[i].second << '\t' << part << '\t' << kept[i].first << '\t'
        << (next - kept[i].first) << '\t' << i << '\n';
  }
  rec.output_count = kept.size();
  rec.params = {{"interval", interval}, {"phase", phase}};
  return rec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wbsample: longitudinal URL sampling from web archive indexes"};
  app.require_subcommand(1);

  Overrides o;
  std::string in, out, extra, format = "urls", domain, dir_in, dir_out, report, log_path;
  std::vector<std::string> inputs;
  bool upsample = false;
  std::uint64_t phase = 0;
  std::size_t top = 20;

  auto* filter = app.add_subcommand("filter", "validity and alias verdicts per URL");
  filter->add_option("input", in)->required();
  filter->add_option("-o,--out", out)->required();
  filter->add_option("--format", format, "urls|surt|zipnum|cdx");
  o.attach(filter);

  auto* classify = app.add_subcommand("classify", "keep likely-HTML, non-alias URLs");
  classify->add_option("input", in, "verdict file")->required();
  classify->add_option("-o,--out", out)->required();
  classify->add_option("--popular-out", extra, "where popular-domain URLs go");
  o.attach(classify);

  auto* fetch_first = app.add_subcommand("fetch-first", "first capture of each URL");
  fetch_first->add_option("input", in)->required();
  fetch_first->add_option("-o,--out", out)->required();
  fetch_first->add_option("--unarchived", extra);
  o.attach(fetch_first);

  auto* sample = app.add_subcommand("sample", "per-year balanced URL lists");
  sample->add_option("input", in, "first-capture file")->required();
  sample->add_option("-o,--out", out, "output directory")->required();
  sample->add_flag("--upsample-roots", upsample, "add roots of deep-link-only hosts");
  o.attach(sample);

  auto* reintegrate = app.add_subcommand("reintegrate", "per-year draws for a popular domain");
  reintegrate->add_option("domain", domain)->required();
  reintegrate->add_option("candidates", in)->required();
  reintegrate->add_option("-o,--out", out)->required();
  o.attach(reintegrate);

  auto* fetch = app.add_subcommand("fetch", "TimeMaps for URL lists");
  fetch->add_option("inputs", inputs, "URL lists or directories of .txt lists")->required();
  fetch->add_option("-o,--out", out, "TimeMap directory")->required();
  fetch->add_option("--report", report);
  fetch->add_option("--log", log_path, "fetch log TSV");
  o.attach(fetch);

  auto* rehydrate = app.add_subcommand("rehydrate", "restore revisit statuses");
  rehydrate->add_option("input", dir_in, "TimeMap directory")->required();
  rehydrate->add_option("-o,--out", dir_out)->required();
  rehydrate->add_option("--unresolved", report);
  o.attach(rehydrate);

  std::string st_first, st_sample, st_tm, st_verdicts;
  auto* stats = app.add_subcommand("stats", "CSV reports");
  stats->add_option("--first-capture", st_first);
  stats->add_option("--sample", st_sample, "sample output directory");
  stats->add_option("--timemaps", st_tm);
  stats->add_option("--verdicts", st_verdicts);
  stats->add_option("--top", top);
  stats->add_option("-o,--out", out)->required();
  o.attach(stats);

  std::uint64_t interval = 6000;
  auto* skip = app.add_subcommand("skip-sample", "secondary index from a sorted CDX file");
  skip->add_option("input", in)->required();
  skip->add_option("-o,--out", out)->required();
  skip->add_option("--every", interval, "keep one line in this many");
  skip->add_option("--phase", phase);
  skip->add_option("--manifest", o.manifest);

  std::size_t page_size = 100;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::vector<std::string> corpus_files;
  auto* serve = app.add_subcommand("serve-mock", "serve CDX files over the CDX API subset");
  serve->add_option("corpus", corpus_files)->required();
  serve->add_option("--page-size", page_size);
  serve->add_option("--port", port, "0 picks a free port");
  serve->add_option("--host", host);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*filter) {
      auto f = pipeline::parse_input_format(format);
      if (!f) throw ConfigError("unknown format '" + format + "'");
      record(o, pipeline::cmd_filter({in, out, *f}, o.resolve()));
    } else if (*classify) {
      record(o, pipeline::cmd_classify({in, out, extra}, o.resolve()));
    } else if (*fetch_first) {
      record(o, pipeline::cmd_fetch_first({in, out, extra}, o.resolve()));
    } else if (*sample) {
      record(o, pipeline::cmd_sample({in, out, upsample}, o.resolve()));
    } else if (*reintegrate) {
      record(o, pipeline::cmd_reintegrate({domain, in, out}, o.resolve()));
    } else if (*fetch) {
      std::vector<fs::path> paths(inputs.begin(), inputs.end());
      record(o, pipeline::cmd_fetch({paths, out, report, log_path}, o.resolve()));
    } else if (*rehydrate) {
      record(o, pipeline::cmd_rehydrate({dir_in, dir_out, report}, o.resolve()));
    } else if (*stats) {
      record(o, pipeline::cmd_stats({st_first, st_sample, st_tm, st_verdicts, out, top},
                                    o.resolve()));
    } else if (*skip) {
      record(o, skip_sample_file(in, out, interval, phase));
    } else if (*serve) {
      MockCdxServer server(load_corpus(corpus_files), page_size);
      // Runs until the process is signalled.
      server.serve_forever(host, port, [&](int bound) {
        std::cout << "http://" << host << ":" << bound << "/cdx" << std::endl;
      });
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
