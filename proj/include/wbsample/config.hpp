#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wbsample/archive_client.hpp"
#include "wbsample/sampler.hpp"
#include "wbsample/surt.hpp"

namespace wbsample {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-bucket overrides. An explicit k disables calibration for that bucket.
struct BucketOverride {
  std::optional<double> k;
  std::optional<std::uint64_t> c;
  std::optional<std::uint64_t> target;
  std::optional<std::uint64_t> tail_threshold;
  std::optional<double> tail_keep_fraction;
};

struct PipelineConfig {
  std::uint64_t interval = 6000;
  Scheme scheme = Scheme::https;
  DownsampleParams downsample;  // defaults; k is ignored while calibrating
  bool calibrate = true;
  std::map<std::string, BucketOverride> buckets;  // keyed by bucket label
  int upsample_last_year = 2002;                  // added roots kept up to this year
  std::vector<std::string> popular_domains;
  std::uint64_t per_year_min = 20;
  std::vector<int> reintegration_years = {2016, 2017, 2018, 2019, 2020, 2021};
  std::size_t cache_capacity = 1000;
  unsigned workers = 4;
  ClientConfig client;
  std::uint64_t seed = 0;

  // Effective parameters for one bucket.
  DownsampleParams params_for(const BucketLabel& label) const;
  std::optional<double> fixed_k_for(const BucketLabel& label) const;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
};

struct StageRecord {
  std::string stage;
  std::uint64_t input_count = 0;
  std::uint64_t output_count = 0;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  double seconds = 0;
};

// Append-only list of stage records persisted as JSON.
class RunManifest {
 public:
  static RunManifest load_or_new(const std::filesystem::path& path);

  void add(StageRecord stage);
  void save(const std::filesystem::path& path) const;
  const nlohmann::json& doc() const { return doc_; }

  // Content with timing removed, for run-to-run comparison.
  static nlohmann::json without_timing(nlohmann::json doc);

 private:
  nlohmann::json doc_ = {{"stages", nlohmann::json::array()}};
};

}  // namespace wbsample
