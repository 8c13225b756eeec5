#include "wbsample/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include "wbsample/archive_client.hpp"
#include "wbsample/kernels.hpp"
#include "wbsample/stats.hpp"
#include "wbsample/timemap_ops.hpp"
#include "wbsample/url_filter.hpp"

namespace wbsample::pipeline {

using nlohmann::json;

namespace {

constexpr std::size_t kChunk = 1 << 16;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void strip_cr(std::string& line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

json client_params(const PipelineConfig& cfg) {
  // The endpoint is left out: mock servers bind to arbitrary ports.
  return {{"politeness", cfg.client.politeness},
          {"max_attempts", cfg.client.max_attempts},
          {"backoff_base", cfg.client.backoff_base},
          {"workers", cfg.workers}};
}

ClientConfig client_config(const PipelineConfig& cfg) {
  auto c = cfg.client;
  c.seed = cfg.seed;
  return c;
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view name) {
  if (name == "urls") return InputFormat::urls;
  if (name == "surt") return InputFormat::surt;
  if (name == "zipnum") return InputFormat::zipnum;
  if (name == "cdx") return InputFormat::cdx;
  return std::nullopt;
}

std::string FirstCaptureRow::str() const { return url + "\t" + timestamp.str() + "\t" + mime; }

std::vector<std::string> read_lines(const fs::path& path) {
  auto in = open_input(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (!blank(line)) out.push_back(line);
  }
  return out;
}

std::vector<FirstCaptureRow> read_first_capture_file(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("first-capture file not found: " + path.string());
  std::vector<FirstCaptureRow> rows;
  std::size_t line_no = 0;
  auto in = open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (blank(line)) continue;
    auto f = split_tabs(line);
    if (f.size() != 3)
      throw ParseError(line_no, path.string() + ": expected url, timestamp, mime");
    rows.push_back({f[0], Timestamp14::parse(f[1], line_no), f[2]});
  }
  return rows;
}

std::string format_rows(const std::vector<FirstCaptureRow>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.str() + "\n";
  return out;
}

// ---------------------------------------------------------------------------

StageRecord cmd_filter(const FilterOptions& opt, const PipelineConfig& cfg) {
  Timer timer;
  auto in = open_input(opt.input);
  auto out = open_output(opt.output);
  StageRecord rec{"filter"};
  std::unordered_set<std::string> seen_keys;
  std::uint64_t valid = 0, kept = 0, duplicates = 0, unparsed = 0;
  std::size_t line_no = 0;

  std::vector<std::string> batch;
  auto flush = [&] {
    auto verdicts = kernels::evaluate_batch(batch);
    for (const auto& v : verdicts) {
      valid += v.valid;
      kept += v.keep();
      out << format_verdict(v) << '\n';
    }
    rec.output_count += verdicts.size();
    batch.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (blank(line)) continue;
    ++rec.input_count;
    if (opt.format == InputFormat::urls) {
      batch.push_back(line);
    } else {
      std::string key;
      try {
        if (opt.format == InputFormat::zipnum) {
          key = parse_zipnum_line(line, line_no).urlkey;
        } else if (opt.format == InputFormat::cdx) {
          key = parse_cdx_line(line, line_no).urlkey;
        } else {
          key = line;
        }
      } catch (const ParseError&) {
        ++unparsed;
        key = line;
      }
      if (!seen_keys.insert(key).second) {
        ++duplicates;
        continue;
      }
      try {
        batch.push_back(surt_to_url(key, cfg.scheme).str());
      } catch (const std::exception&) {
        batch.push_back(key);  // evaluates as invalid, input kept verbatim
      }
    }
    if (batch.size() >= kChunk) flush();
  }
  flush();
  if (!out) throw std::runtime_error("write failed: " + opt.output.string());

  rec.params = {{"format", opt.format == InputFormat::urls     ? "urls"
                           : opt.format == InputFormat::surt   ? "surt"
                           : opt.format == InputFormat::zipnum ? "zipnum"
                                                               : "cdx"},
                {"scheme", std::string(to_string(cfg.scheme))}};
  rec.details = {{"valid", valid},
                 {"invalid", rec.output_count - valid},
                 {"keep", kept},
                 {"duplicate_keys", duplicates},
                 {"unparsed_lines", unparsed}};
  rec.seconds = timer.seconds();
  return rec;
}

StageRecord cmd_classify(const ClassifyOptions& opt, const PipelineConfig& cfg) {
  Timer timer;
  auto in = open_input(opt.input);
  auto out = open_output(opt.output);
  std::ofstream popular;
  if (!opt.popular_output.empty()) popular = open_output(opt.popular_output);
  std::set<std::string> popular_set;
  for (const auto& d : cfg.popular_domains) popular_set.insert(strip_www_prefix(d));

  StageRecord rec{"classify"};
  std::map<std::string, std::uint64_t> dropped;
  std::map<std::string, std::uint64_t> by_heuristic;
  std::unordered_set<std::string> emitted;
  std::uint64_t popular_count = 0;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (blank(line)) continue;
    ++rec.input_count;
    auto v = parse_verdict_line(line);
    // Alias flags win over type: a session id can hide the extension.
    const char* reason = v.wildcard         ? "wildcard"
                         : !v.valid || !v.url ? "invalid"
                         : v.session_alias  ? "session_alias"
                         : v.index_alias    ? "index_alias"
                         : !v.likely_html   ? "not_html"
                                            : nullptr;
    if (reason) {
      ++dropped[reason];
      continue;
    }
    auto text = v.url->str();
    if (!emitted.insert(text).second) {
      ++dropped["duplicate"];
      continue;
    }
    if (popular_set.count(registered_domain(*v.url))) {
      ++popular_count;
      if (popular.is_open()) popular << text << '\n';
      continue;
    }
    ++by_heuristic[std::string(to_string(*v.likely_html))];
    out << text << '\n';
    ++rec.output_count;
  }
  rec.params = {{"popular_domains", cfg.popular_domains}};
  rec.details = {{"dropped", dropped}, {"popular", popular_count}, {"by_heuristic", by_heuristic}};
  rec.seconds = timer.seconds();
  return rec;
}

// ---------------------------------------------------------------------------

namespace {

struct FirstLookup {
  std::optional<CdxRecord> record;
  std::string error;
};

std::vector<FirstLookup> lookup_first(const std::vector<std::string>& urls,
                                      const PipelineConfig& cfg) {
  ArchiveClient client(client_config(cfg));
  std::vector<FirstLookup> out(urls.size());
  run_concurrently(urls.size(), cfg.workers, [&](std::size_t i) {
    try {
      out[i].record = client.fetch_first_record(urls[i]);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace

StageRecord cmd_fetch_first(const FetchFirstOptions& opt, const PipelineConfig& cfg) {
  Timer timer;
  auto urls = read_lines(opt.input);
  auto found = lookup_first(urls, cfg);
  auto out = open_output(opt.output);
  std::ofstream unarchived;
  if (!opt.unarchived.empty()) unarchived = open_output(opt.unarchived);
  StageRecord rec{"fetch-first"};
  rec.input_count = urls.size();
  std::uint64_t missing = 0, failed = 0;
  for (std::size_t i = 0; i < urls.size(); ++i) {
    const auto& f = found[i];
    if (f.record) {
      out << FirstCaptureRow{urls[i], f.record->timestamp, std::string(f.record->content_mime())}
                 .str()
          << '\n';
      ++rec.output_count;
    } else {
      ++(f.error.empty() ? missing : failed);
      if (unarchived.is_open())
        unarchived << urls[i] << '\t' << (f.error.empty() ? "unarchived" : f.error) << '\n';
    }
  }
  rec.params = client_params(cfg);
  rec.details = {{"unarchived", missing}, {"failed", failed}};
  rec.seconds = timer.seconds();
  return rec;
}

StageRecord cmd_sample(const SampleOptions& opt, const PipelineConfig& cfg) {
  Timer timer;
  cfg.validate();
  auto rows = read_first_capture_file(opt.input);
  StageRecord rec{"sample"};
  rec.input_count = rows.size();

  std::vector<FirstCapture> entries;
  std::uint64_t non_html = 0, unparsable = 0;
  for (const auto& r : rows) {
    if (r.mime != "text/html") {
      ++non_html;
      continue;
    }
    auto u = try_parse_url(r.url);
    if (!u) {
      ++unparsable;
      continue;
    }
    entries.push_back({*u, r.timestamp});
  }

  fs::create_directories(opt.outdir);
  std::uint64_t roots_added = 0, roots_queried = 0;
  if (opt.upsample_roots) {
    std::vector<CanonicalUrl> urls;
    urls.reserve(entries.size());
    for (const auto& e : entries) urls.push_back(e.url);
    auto roots = extract_missing_roots(urls);
    std::vector<std::string> texts;
    for (const auto& r : roots) texts.push_back(r.str());
    roots_queried = texts.size();
    auto found = lookup_first(texts, cfg);
    std::vector<FirstCaptureRow> kept;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const auto& f = found[i].record;
      if (!f || f->content_mime() != "text/html") continue;
      if (f->timestamp.year() > cfg.upsample_last_year) continue;
      entries.push_back({roots[i], f->timestamp});
      kept.push_back({texts[i], f->timestamp, "text/html"});
    }
    roots_added = kept.size();
    write_file_atomic(opt.outdir / "upsampled_roots.tsv", format_rows(kept));
  }

  auto bucketing = bucket_by_first_year(entries);
  std::string allocations = "bucket\tdomain\turls\treduced\n";
  json buckets = json::array();
  for (const auto& bucket : bucketing.buckets) {
    const auto p = cfg.params_for(bucket.label);
    Rng rng(p.seed);
    auto reduced = reduce_long_tail(bucket, p, rng);
    std::vector<std::uint64_t> counts;
    for (const auto& d : reduced.domains) counts.push_back(d.n_urls());

    Calibration cal;
    if (auto k = cfg.fixed_k_for(bucket.label)) {
      cal.k = 0;
      cal.total = kernels::reduced_total(counts, *k, p.c);
      cal.overshoot = cal.total > p.target;
    } else {
      cal = calibrate_k(counts, p.c, p.target);
    }
    const double k = cal.k ? static_cast<double>(cal.k) : *cfg.fixed_k_for(bucket.label);

    std::vector<std::uint64_t> alloc;
    alloc.reserve(counts.size());
    for (auto n : counts) alloc.push_back(downsample_count(n, k, p.c));
    auto picks = kernels::select_batch(reduced.domains, alloc,
                                       derive_seed(cfg.seed, "select:" + bucket.label.str()));
    std::string list;
    for (std::size_t i = 0; i < picks.size(); ++i) {
      for (const auto& u : picks[i]) list += u.str() + "\n";
      allocations += bucket.label.str() + "\t" + reduced.domains[i].domain + "\t" +
                     std::to_string(counts[i]) + "\t" + std::to_string(alloc[i]) + "\n";
    }
    write_file_atomic(opt.outdir / (bucket.label.str() + ".txt"), list);
    rec.output_count += cal.total;
    buckets.push_back({{"label", bucket.label.str()},
                       {"domains", bucket.domains.size()},
                       {"urls", bucket.url_count()},
                       {"singletons", bucket.singleton_domains()},
                       {"domains_after_tail", reduced.domains.size()},
                       {"urls_after_tail", reduced.url_count()},
                       {"k", k},
                       {"c", p.c},
                       {"calibrated", cal.k != 0},
                       {"target", p.target},
                       {"total", cal.total},
                       {"overshoot", cal.overshoot}});
  }
  write_file_atomic(opt.outdir / "allocations.tsv", allocations);

  rec.params = cfg.to_json();
  rec.params.erase("client");
  rec.params["upsample_roots"] = opt.upsample_roots;
  rec.details = {{"html_rows", entries.size() - roots_added},
                 {"non_html", non_html},
                 {"unparsable", unparsable},
                 {"roots_queried", roots_queried},
                 {"roots_added", roots_added},
                 {"dropped_early", bucketing.dropped_early},
                 {"buckets", buckets}};
  rec.seconds = timer.seconds();
  return rec;
}

StageRecord cmd_reintegrate(const ReintegrateOptions& opt, const PipelineConfig& cfg) {
  Timer timer;
  auto lines = read_lines(opt.candidates);
  std::vector<CanonicalUrl> candidates;
  for (const auto& l : lines)
    if (auto u = try_parse_url(l)) candidates.push_back(*u);

  ArchiveClient client(client_config(cfg));
  std::map<std::string, CdxRecord> seen;
  std::uint64_t failures = 0;
  auto lookup = [&](const CanonicalUrl& u) -> std::optional<Timestamp14> {
    try {
      auto r = client.fetch_first_record(u.str());
      if (!r) return std::nullopt;
      seen[u.str()] = *r;
      return r->timestamp;
    } catch (const std::exception&) {
      ++failures;
      return std::nullopt;
    }
  };
  auto result = reintegrate_popular(opt.domain, candidates, lookup, cfg.reintegration_years,
                                    cfg.per_year_min, cfg.seed);
  std::vector<FirstCaptureRow> rows;
  json per_year = json::object();
  for (const auto& [year, urls] : result.by_year) {
    per_year[std::to_string(year)] = urls.size();
    for (const auto& u : urls) {
      const auto& r = seen.at(u.str());
      rows.push_back({u.str(), r.timestamp, std::string(r.content_mime())});
    }
  }
  {
    auto out = open_output(opt.output);
    out << format_rows(rows);
  }
  StageRecord rec{"reintegrate"};
  rec.input_count = candidates.size();
  rec.output_count = rows.size();
  rec.params = {{"domain", opt.domain},
                {"years", cfg.reintegration_years},
                {"per_year_min", cfg.per_year_min},
                {"seed", cfg.seed}};
  rec.details = {{"draws", result.draws},
                 {"per_year", per_year},
                 {"exhausted", result.exhausted()},
                 {"unmet_years", result.unmet_years},
                 {"lookup_failures", failures}};
  rec.seconds = timer.seconds();
  return rec;
}

// ---------------------------------------------------------------------------

StageRecord cmd_fetch(const FetchOptions& opt, const PipelineConfig& cfg) {
  Timer timer;
  std::vector<std::string> urls;
  for (const auto& input : opt.inputs) {
    std::vector<fs::path> files;
    if (fs::is_directory(input)) {
      for (const auto& e : fs::directory_iterator(input))
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
      std::sort(files.begin(), files.end());
    } else {
      files.push_back(input);
    }
    for (const auto& f : files)
      for (auto& l : read_lines(f)) urls.push_back(std::move(l));
  }

  // One TimeMap per SURT key; later URLs with the same key are duplicates.
  struct Job {
    std::string url;
    std::string file;
    std::string status;
    std::size_t records = 0;
    std::string note;
  };
  std::vector<Job> jobs;
  std::set<std::string> stems;
  std::uint64_t duplicates = 0, invalid = 0;
  for (const auto& u : urls) {
    std::string key;
    try {
      key = url_to_surt(parse_url(u)).str();
    } catch (const std::exception& e) {
      ++invalid;
      jobs.push_back({u, "-", "invalid", 0, e.what()});
      continue;
    }
    auto stem = timemap_file_stem(key) + ".cdx";
    if (!stems.insert(stem).second) {
      ++duplicates;
      continue;
    }
    jobs.push_back({u, stem, "", 0, ""});
  }

  fs::create_directories(opt.timemap_dir);
  auto log = opt.log.empty() ? std::make_shared<FetchLogSink>()
                             : std::make_shared<FetchLogSink>(opt.log, true);
  ArchiveClient client(client_config(cfg), log);
  run_concurrently(jobs.size(), cfg.workers, [&](std::size_t i) {
    auto& job = jobs[i];
    if (job.status == "invalid") return;
    const auto path = opt.timemap_dir / job.file;
    if (fs::exists(path)) {
      job.status = "skipped";
      return;
    }
    try {
      auto tm = client.fetch_timemap(job.url);
      job.records = tm.records.size();
      job.status = tm.empty() ? "empty" : "ok";
      write_timemap_file(path, tm);
    } catch (const PartialFetchError& e) {
      job.status = "partial";
      job.records = e.partial().records.size();
      job.note = e.what();
    } catch (const std::exception& e) {
      job.status = "error";
      job.note = e.what();
    }
  });

  StageRecord rec{"fetch"};
  rec.input_count = urls.size();
  std::map<std::string, std::uint64_t> by_status;
  std::string report = "url\tstatus\trecords\tfile\tnote\n";
  for (const auto& job : jobs) {
    ++by_status[job.status];
    if (job.status == "ok" || job.status == "empty" || job.status == "skipped")
      ++rec.output_count;
    report += job.url + "\t" + job.status + "\t" + std::to_string(job.records) + "\t" + job.file +
              "\t" + (job.note.empty() ? "-" : job.note) + "\n";
  }
  if (!opt.report.empty()) {
    if (opt.report.has_parent_path()) fs::create_directories(opt.report.parent_path());
    write_file_atomic(opt.report, report);
  }
  rec.params = client_params(cfg);
  rec.details = {{"by_status", by_status},
                 {"duplicate_keys", duplicates},
                 {"invalid", invalid},
                 {"requests", log->size()}};
  rec.seconds = timer.seconds();
  return rec;
}

StageRecord cmd_rehydrate(const RehydrateOptions& opt, const PipelineConfig& cfg) {
  Timer timer;
  if (!fs::is_directory(opt.input_dir))
    throw ConfigError("not a directory: " + opt.input_dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(opt.input_dir))
    if (e.is_regular_file() && e.path().extension() == ".cdx") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  fs::create_directories(opt.output_dir);

  std::string unresolved = "urlkey\tposition\tdigest\n";
  std::uint64_t resolved = 0, missed = 0, rows = 0, files_with_misses = 0;
  std::size_t max_distance = 0;
  constexpr std::size_t kBatch = 256;
  for (std::size_t start = 0; start < files.size(); start += kBatch) {
    const auto end = std::min(files.size(), start + kBatch);
    std::vector<TimeMap> tms;
    for (std::size_t i = start; i < end; ++i) tms.push_back(read_timemap_file(files[i]));
    auto results = kernels::rehydrate_batch(tms, cfg.cache_capacity);
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      write_timemap_file(opt.output_dir / files[start + i].filename(), r.timemap);
      resolved += r.resolved;
      missed += r.unresolved.size();
      rows += r.timemap.records.size();
      files_with_misses += !r.unresolved.empty();
      max_distance = std::max(max_distance, max_revisit_distance(tms[i]));
      for (auto pos : r.unresolved) {
        const auto& row = r.timemap.records[pos];
        unresolved += row.urlkey + "\t" + std::to_string(pos) + "\t" + row.digest + "\n";
      }
    }
  }
  const auto report = opt.unresolved.empty() ? opt.output_dir / "unresolved.tsv" : opt.unresolved;
  if (report.has_parent_path()) fs::create_directories(report.parent_path());
  write_file_atomic(report, unresolved);

  StageRecord rec{"rehydrate"};
  rec.input_count = files.size();
  rec.output_count = files.size();
  rec.params = {{"cache_capacity", cfg.cache_capacity}};
  rec.details = {{"rows", rows},
                 {"resolved", resolved},
                 {"unresolved", missed},
                 {"files_with_unresolved", files_with_misses},
                 {"max_revisit_distance", max_distance}};
  rec.seconds = timer.seconds();
  return rec;
}

// ---------------------------------------------------------------------------

StageRecord cmd_stats(const StatsOptions& opt, const PipelineConfig&) {
  Timer timer;
  fs::create_directories(opt.outdir);
  StageRecord rec{"stats"};
  json details = json::object();
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    write_file_atomic(opt.outdir / name, body);
    written.push_back(name);
  };

  std::map<std::string, std::uint64_t> before, after;
  std::map<std::string, std::string> mimes;
  if (!opt.first_capture.empty()) {
    auto rows = read_first_capture_file(opt.first_capture);
    rec.input_count += rows.size();
    std::vector<FirstCapture> html;
    std::vector<CanonicalUrl> urls;
    for (const auto& r : rows) {
      mimes.emplace(r.url, r.mime);
      auto u = try_parse_url(r.url);
      if (!u || r.mime != "text/html") continue;
      html.push_back({*u, r.timestamp});
      if (r.timestamp.year() >= kEarliestYear) urls.push_back(*u);
    }
    emit("first_year_histogram.csv", stats::histogram_csv(stats::first_year_histogram(html)));
    before = stats::domain_counts(urls);
    std::vector<std::uint64_t> v;
    for (const auto& [_, n] : before) v.push_back(n);
    emit("domain_ccdf_before.csv", stats::ccdf_csv(stats::ccdf(v)));
    details["domains_before"] = before.size();
  }

  if (!opt.sample_dir.empty()) {
    std::vector<fs::path> lists;
    for (const auto& e : fs::directory_iterator(opt.sample_dir))
      if (e.is_regular_file() && e.path().extension() == ".txt") lists.push_back(e.path());
    std::sort(lists.begin(), lists.end());
    std::vector<CanonicalUrl> urls;
    for (const auto& f : lists)
      for (const auto& l : read_lines(f))
        if (auto u = try_parse_url(l)) urls.push_back(*u);
    rec.input_count += urls.size();
    after = stats::domain_counts(urls);
    std::vector<std::uint64_t> v;
    for (const auto& [_, n] : after) v.push_back(n);
    emit("domain_ccdf_after.csv", stats::ccdf_csv(stats::ccdf(v)));
    details["domains_after"] = after.size();
    details["sampled_urls"] = urls.size();
  }

  if (!before.empty()) {
    auto top = stats::top_domains(before, after, opt.top);
    emit("top_domains.csv", stats::top_domains_csv(top));
  }
  if (!before.empty() && !after.empty()) {
    auto all = stats::ranking_correlation(before, after);
    auto top = stats::ranking_correlation(before, after, opt.top);
    emit("rank_correlation.csv", "scope,domains,spearman\nall," + std::to_string(all.n) + "," +
                                     stats::format_real(all.rho) + "\ntop" +
                                     std::to_string(opt.top) + "," + std::to_string(top.n) +
                                     "," + stats::format_real(top.rho) + "\n");
    details["spearman_all"] = stats::format_real(all.rho);
    details["spearman_top"] = stats::format_real(top.rho);
  }

  if (!opt.timemap_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(opt.timemap_dir))
      if (e.is_regular_file() && e.path().extension() == ".cdx") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::uint64_t> counts;
    std::uint64_t empty = 0, mementos = 0;
    for (const auto& f : files) {
      auto tm = read_timemap_file(f);
      if (tm.empty()) {
        ++empty;
        continue;
      }
      counts.push_back(tm.records.size());
      mementos += tm.records.size();
    }
    rec.input_count += files.size();
    emit("memento_ccdf.csv", stats::ccdf_csv(stats::ccdf(counts)));
    details["timemaps"] = counts.size();
    details["empty_timemaps"] = empty;
    details["mementos"] = mementos;
  }

  if (!opt.verdicts.empty()) {
    std::map<std::string, Heuristic> predicted;
    for (const auto& l : read_lines(opt.verdicts)) {
      auto v = parse_verdict_line(l);
      if (v.valid && v.likely_html) predicted.emplace(v.url ? v.url->str() : v.input, *v.likely_html);
    }
    emit("heuristic_precision.csv",
         stats::precision_csv(stats::heuristic_precision(predicted, mimes)));
  }

  rec.output_count = written.size();
  rec.params = {{"top", opt.top}};
  details["files"] = written;
  rec.details = details;
  rec.seconds = timer.seconds();
  return rec;
}

}  // namespace wbsample::pipeline
