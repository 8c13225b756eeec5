#include "wbsample/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "wbsample/kernels.hpp"
#include "wbsample/url_filter.hpp"

namespace wbsample {

SkipSampler::SkipSampler(std::uint64_t interval, std::uint64_t phase)
    : interval_(interval), phase_(phase) {
  if (interval == 0) throw std::invalid_argument("skip interval must be >= 1");
  if (phase >= interval) throw std::invalid_argument("skip phase must be < interval");
}

double inclusion_probability(std::uint64_t memento_count, std::uint64_t interval) {
  if (interval == 0) throw std::invalid_argument("interval must be >= 1");
  if (memento_count >= interval) return 1.0;
  return static_cast<double>(memento_count) / static_cast<double>(interval);
}

BucketLabel BucketLabel::for_year(int year) {
  if (year <= kClusterLastYear) return {kEarliestYear, kClusterLastYear};
  return {year, year};
}

BucketLabel BucketLabel::parse(std::string_view text) {
  auto dash = text.find('-');
  try {
    if (dash == std::string_view::npos) {
      int y = std::stoi(std::string(text));
      return {y, y};
    }
    return {std::stoi(std::string(text.substr(0, dash))),
            std::stoi(std::string(text.substr(dash + 1)))};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad bucket label '" + std::string(text) + "'");
  }
}

std::string BucketLabel::str() const {
  if (first_year == last_year) return std::to_string(first_year);
  return std::to_string(first_year) + "-" + std::to_string(last_year);
}

std::string registered_domain(const CanonicalUrl& url) { return strip_www_prefix(url.host); }

std::uint64_t YearBucket::url_count() const {
  std::uint64_t n = 0;
  for (const auto& d : domains) n += d.n_urls();
  return n;
}

std::uint64_t YearBucket::singleton_domains() const {
  return static_cast<std::uint64_t>(std::count_if(
      domains.begin(), domains.end(), [](const DomainCount& d) { return d.n_urls() == 1; }));
}

std::vector<DomainCount> group_by_domain(std::span<const CanonicalUrl> urls) {
  std::map<std::string, std::set<CanonicalUrl>> grouped;
  for (const auto& u : urls) grouped[registered_domain(u)].insert(u);
  std::vector<DomainCount> out;
  out.reserve(grouped.size());
  for (auto& [domain, set] : grouped)
    out.push_back(DomainCount{domain, std::vector<CanonicalUrl>(set.begin(), set.end())});
  return out;
}

Bucketing bucket_by_first_year(std::span<const FirstCapture> entries) {
  std::map<CanonicalUrl, Timestamp14> earliest;
  for (const auto& e : entries) {
    auto [it, inserted] = earliest.emplace(e.url, e.first);
    if (!inserted && e.first < it->second) it->second = e.first;
  }
  Bucketing out;
  std::map<BucketLabel, std::vector<CanonicalUrl>> by_label;
  for (const auto& [url, ts] : earliest) {
    if (ts.year() < kEarliestYear) {
      ++out.dropped_early;
      continue;
    }
    by_label[BucketLabel::for_year(ts.year())].push_back(url);
  }
  for (auto& [label, urls] : by_label)
    out.buckets.push_back(YearBucket{label, group_by_domain(urls)});
  return out;
}

std::vector<CanonicalUrl> extract_missing_roots(std::span<const CanonicalUrl> urls) {
  std::unordered_set<std::string> has_root;
  std::unordered_map<std::string, std::size_t> first_seen;
  std::vector<const CanonicalUrl*> order;
  for (const auto& u : urls) {
    if (u.is_root()) has_root.insert(u.host);
    if (first_seen.emplace(u.host, order.size()).second) order.push_back(&u);
  }
  std::vector<CanonicalUrl> out;
  for (const auto* u : order)
    if (!has_root.contains(u->host)) out.push_back(trim_to_root(*u));
  return out;
}

Reintegration reintegrate_popular(std::string_view domain,
                                  std::span<const CanonicalUrl> candidates,
                                  const FirstCaptureLookup& first_capture_lookup,
                                  std::span<const int> years, std::uint64_t per_year_min,
                                  std::uint64_t seed) {
  if (per_year_min == 0) throw std::invalid_argument("per_year_min must be >= 1");
  Reintegration out;
  for (int y : years) out.by_year[y];
  auto unmet = [&] {
    return std::any_of(years.begin(), years.end(),
                       [&](int y) { return out.by_year[y].size() < per_year_min; });
  };
  std::vector<std::size_t> pool(candidates.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  Rng rng(derive_seed(seed, domain));
  std::size_t remaining = pool.size();
  while (remaining > 0 && unmet()) {
    auto j = static_cast<std::size_t>(rng.below(remaining));
    std::swap(pool[j], pool[remaining - 1]);
    const auto& url = candidates[pool[--remaining]];
    ++out.draws;
    auto ts = first_capture_lookup(url);
    if (!ts) continue;
    auto it = out.by_year.find(ts->year());
    if (it != out.by_year.end()) it->second.push_back(url);
  }
  for (int y : years)
    if (out.by_year[y].size() < per_year_min) out.unmet_years.push_back(y);
  return out;
}

void DownsampleParams::validate() const {
  if (!(k > 0)) throw std::invalid_argument("K must be positive");
  if (c < 1) throw std::invalid_argument("C must be >= 1");
  if (target < 1) throw std::invalid_argument("target must be >= 1");
  if (tail_threshold < 1) throw std::invalid_argument("tail threshold must be >= 1");
  if (!(tail_keep_fraction > 0 && tail_keep_fraction <= 1))
    throw std::invalid_argument("tail keep fraction must be in (0, 1]");
}

YearBucket reduce_long_tail(const YearBucket& bucket, const DownsampleParams& params,
                            Rng& rng) {
  params.validate();
  if (bucket.domains.size() <= params.tail_threshold) return bucket;
  auto singles = bucket.singleton_domains();
  auto keep = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(singles) * params.tail_keep_fraction));
  YearBucket out{bucket.label, {}};
  out.domains.reserve(bucket.domains.size() - singles + keep);
  // Selection sampling: each singleton is kept with probability
  // needed/remaining, which yields a uniform subset of exactly `keep`.
  std::uint64_t seen = 0;
  for (const auto& d : bucket.domains) {
    if (d.n_urls() != 1) {
      out.domains.push_back(d);
      continue;
    }
    if (rng.below(singles - seen) < keep) {
      out.domains.push_back(d);
      --keep;
    }
    ++seen;
  }
  return out;
}

std::uint64_t downsample_count(std::uint64_t n, double k, std::uint64_t c) {
  if (n == 0) throw std::invalid_argument("downsample_count requires N >= 1");
  // std::round is half-away-from-zero.
  double v = std::round(k * std::log(static_cast<double>(n)) + static_cast<double>(c));
  if (v <= 0) return 0;
  if (v >= static_cast<double>(n)) return n;
  return static_cast<std::uint64_t>(v);
}

Calibration calibrate_k(std::span<const std::uint64_t> counts, std::uint64_t c,
                        std::uint64_t target) {
  if (counts.empty()) throw std::invalid_argument("calibrate_k on an empty bucket");
  auto total = [&](std::uint64_t k) {
    return kernels::reduced_total(counts, static_cast<double>(k), c);
  };
  // Every domain is saturated (reduced == N) once K ln N + C >= N.
  std::uint64_t k_max = 1;
  for (auto n : counts) {
    if (n < 2) continue;
    auto need = std::ceil(static_cast<double>(n > c ? n - c : 0) /
                          std::log(static_cast<double>(n)));
    k_max = std::max<std::uint64_t>(k_max, static_cast<std::uint64_t>(need));
  }
  // Smallest K in [lo, hi] with total(K) >= value; total is nondecreasing.
  auto first_reaching = [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t value) {
    while (lo < hi) {
      auto mid = lo + (hi - lo) / 2;
      if (total(mid) >= value) hi = mid;
      else lo = mid + 1;
    }
    return lo;
  };

  auto t1 = total(1);
  if (t1 > target) return {1, t1, true};
  auto t_max = total(k_max);
  if (t_max <= target) {
    auto k = first_reaching(1, k_max, t_max);
    return {k, t_max, false};
  }
  auto k_hi = first_reaching(2, k_max, target + 1);
  auto t_hi = total(k_hi);
  auto t_lo = total(k_hi - 1);
  auto k_lo = first_reaching(1, k_hi - 1, t_lo);
  if (t_hi - target < target - t_lo) return {k_hi, t_hi, true};
  return {k_lo, t_lo, false};
}

Calibration calibrate_k(const YearBucket& bucket, std::uint64_t c, std::uint64_t target) {
  std::vector<std::uint64_t> counts;
  counts.reserve(bucket.domains.size());
  for (const auto& d : bucket.domains) counts.push_back(d.n_urls());
  return calibrate_k(counts, c, target);
}

std::vector<CanonicalUrl> select_urls(const DomainCount& domain, std::uint64_t k,
                                      std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("select_urls: k must be >= 1");
  if (k > domain.n_urls())
    throw std::invalid_argument("select_urls: k exceeds the domain's URL count");
  std::vector<CanonicalUrl> out;
  std::vector<std::size_t> rest;
  std::size_t root = domain.urls.size();
  for (std::size_t i = 0; i < domain.urls.size(); ++i) {
    if (root == domain.urls.size() && domain.urls[i].is_root()) root = i;
    else rest.push_back(i);
  }
  std::uint64_t slots = k;
  if (root != domain.urls.size()) {
    out.push_back(domain.urls[root]);
    --slots;
  }
  // Algorithm R over the non-root URLs.
  Rng rng(derive_seed(seed, domain.domain));
  std::vector<std::size_t> reservoir;
  reservoir.reserve(slots);
  for (std::size_t seen = 0; seen < rest.size(); ++seen) {
    if (reservoir.size() < slots) {
      reservoir.push_back(rest[seen]);
    } else if (slots > 0) {
      auto j = rng.below(seen + 1);
      if (j < slots) reservoir[j] = rest[seen];
    }
  }
  std::sort(reservoir.begin(), reservoir.end());
  for (auto i : reservoir) out.push_back(domain.urls[i]);
  return out;
}

}  // namespace wbsample
