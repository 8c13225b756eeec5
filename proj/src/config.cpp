#include "wbsample/config.hpp"

#include <fstream>

#include "wbsample/cdx.hpp"

namespace wbsample {

using nlohmann::json;

DownsampleParams PipelineConfig::params_for(const BucketLabel& label) const {
  DownsampleParams p = downsample;
  p.seed = derive_seed(seed, label.str());
  auto it = buckets.find(label.str());
  if (it == buckets.end()) return p;
  const auto& o = it->second;
  if (o.k) p.k = *o.k;
  if (o.c) p.c = *o.c;
  if (o.target) p.target = *o.target;
  if (o.tail_threshold) p.tail_threshold = *o.tail_threshold;
  if (o.tail_keep_fraction) p.tail_keep_fraction = *o.tail_keep_fraction;
  return p;
}

std::optional<double> PipelineConfig::fixed_k_for(const BucketLabel& label) const {
  auto it = buckets.find(label.str());
  if (it != buckets.end() && it->second.k) return it->second.k;
  if (!calibrate) return downsample.k;
  return std::nullopt;
}

void PipelineConfig::validate() const {
  if (interval == 0) throw ConfigError("interval must be >= 1");
  if (per_year_min == 0) throw ConfigError("per_year_min must be >= 1");
  if (cache_capacity == 0) throw ConfigError("cache_capacity must be >= 1");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  try {
    downsample.validate();
    for (const auto& [label, _] : buckets) {
      BucketLabel::parse(label);
      params_for(BucketLabel::parse(label)).validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json PipelineConfig::to_json() const {
  json b = json::object();
  for (const auto& [label, o] : buckets) {
    json e = json::object();
    if (o.k) e["k"] = *o.k;
    if (o.c) e["c"] = *o.c;
    if (o.target) e["target"] = *o.target;
    if (o.tail_threshold) e["tail_threshold"] = *o.tail_threshold;
    if (o.tail_keep_fraction) e["tail_keep_fraction"] = *o.tail_keep_fraction;
    b[label] = e;
  }
  return {
      {"interval", interval},
      {"scheme", std::string(to_string(scheme))},
      {"downsample",
       {{"k", downsample.k},
        {"c", downsample.c},
        {"target", downsample.target},
        {"tail_threshold", downsample.tail_threshold},
        {"tail_keep_fraction", downsample.tail_keep_fraction}}},
      {"calibrate", calibrate},
      {"buckets", b},
      {"upsample_last_year", upsample_last_year},
      {"popular_domains", popular_domains},
      {"per_year_min", per_year_min},
      {"reintegration_years", reintegration_years},
      {"cache_capacity", cache_capacity},
      {"workers", workers},
      {"client",
       {{"endpoint", client.endpoint},
        {"politeness", client.politeness},
        {"inter_request_delay", client.inter_request_delay},
        {"max_attempts", client.max_attempts},
        {"backoff_base", client.backoff_base},
        {"timeout", client.timeout},
        {"storage_dir", client.storage_dir.string()}}},
      {"seed", seed},
  };
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  try {
    read_opt(j, "interval", c.interval);
    if (j.contains("scheme")) {
      auto s = parse_scheme(j.at("scheme").get<std::string>());
      if (!s) throw ConfigError("scheme must be http or https");
      c.scheme = *s;
    }
    if (j.contains("downsample")) {
      const auto& d = j.at("downsample");
      read_opt(d, "k", c.downsample.k);
      read_opt(d, "c", c.downsample.c);
      read_opt(d, "target", c.downsample.target);
      read_opt(d, "tail_threshold", c.downsample.tail_threshold);
      read_opt(d, "tail_keep_fraction", c.downsample.tail_keep_fraction);
    }
    read_opt(j, "calibrate", c.calibrate);
    if (j.contains("buckets")) {
      for (const auto& [label, e] : j.at("buckets").items()) {
        BucketOverride o;
        read_opt(e, "k", o.k);
        read_opt(e, "c", o.c);
        read_opt(e, "target", o.target);
        read_opt(e, "tail_threshold", o.tail_threshold);
        read_opt(e, "tail_keep_fraction", o.tail_keep_fraction);
        c.buckets[BucketLabel::parse(label).str()] = o;
      }
    }
    read_opt(j, "upsample_last_year", c.upsample_last_year);
    read_opt(j, "popular_domains", c.popular_domains);
    read_opt(j, "per_year_min", c.per_year_min);
    read_opt(j, "reintegration_years", c.reintegration_years);
    read_opt(j, "cache_capacity", c.cache_capacity);
    read_opt(j, "workers", c.workers);
    if (j.contains("client")) {
      const auto& k = j.at("client");
      read_opt(k, "endpoint", c.client.endpoint);
      read_opt(k, "politeness", c.client.politeness);
      read_opt(k, "inter_request_delay", c.client.inter_request_delay);
      read_opt(k, "max_attempts", c.client.max_attempts);
      read_opt(k, "backoff_base", c.client.backoff_base);
      read_opt(k, "timeout", c.client.timeout);
      if (k.contains("storage_dir"))
        c.client.storage_dir = k.at("storage_dir").get<std::string>();
    }
    read_opt(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  c.client.seed = c.seed;
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

// ---------------------------------------------------------------------------

RunManifest RunManifest::load_or_new(const std::filesystem::path& path) {
  RunManifest m;
  if (path.empty() || !std::filesystem::exists(path)) return m;
  try {
    m.doc_ = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!m.doc_.contains("stages")) m.doc_["stages"] = json::array();
  return m;
}

void RunManifest::add(StageRecord s) {
  doc_["stages"].push_back({{"stage", s.stage},
                            {"input_count", s.input_count},
                            {"output_count", s.output_count},
                            {"params", s.params},
                            {"details", s.details},
                            {"seconds", s.seconds}});
}

void RunManifest::save(const std::filesystem::path& path) const {
  if (path.empty()) return;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, doc_.dump(2) + "\n");
}

json RunManifest::without_timing(json doc) {
  if (doc.contains("stages"))
    for (auto& s : doc["stages"]) s.erase("seconds");
  return doc;
}

}  // namespace wbsample
