#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbsample/cdx.hpp"
#include "wbsample/random.hpp"
#include "wbsample/surt.hpp"

namespace wbsample {

// ---------------------------------------------------------------------------
// Skip-list sampling: the secondary index keeps every interval-th line.

class SkipSampler {
 public:
  SkipSampler(std::uint64_t interval, std::uint64_t phase);
  // True when the next stream position is kept.
  bool accept() { return (position_++ % interval_) == phase_; }
  std::uint64_t position() const { return position_; }

 private:
  std::uint64_t interval_;
  std::uint64_t phase_;
  std::uint64_t position_ = 0;
};

template <class T>
std::vector<T> skip_sample(std::span<const T> records, std::uint64_t interval,
                           std::uint64_t phase) {
  SkipSampler check(interval, phase);  // validates arguments
  std::vector<T> out;
  for (std::uint64_t i = phase; i < records.size(); i += interval) out.push_back(records[i]);
  return out;
}

// Chance that a URL with `memento_count` contiguous index lines has at least
// one line kept under a uniformly random phase.
double inclusion_probability(std::uint64_t memento_count, std::uint64_t interval);

// ---------------------------------------------------------------------------
// Year buckets.

inline constexpr int kEarliestYear = 1996;
inline constexpr int kClusterLastYear = 2000;

struct BucketLabel {
  int first_year = kEarliestYear;
  int last_year = kClusterLastYear;

  static BucketLabel for_year(int year);
  static BucketLabel parse(std::string_view text);
  std::string str() const;
  bool contains(int year) const { return year >= first_year && year <= last_year; }

  friend bool operator==(const BucketLabel&, const BucketLabel&) = default;
  friend auto operator<=>(const BucketLabel&, const BucketLabel&) = default;
};

struct FirstCapture {
  CanonicalUrl url;
  Timestamp14 first;
};

// Domain key for balancing: the host with its www-class prefix stripped.
std::string registered_domain(const CanonicalUrl& url);

struct DomainCount {
  std::string domain;
  std::vector<CanonicalUrl> urls;  // unique, sorted
  std::uint64_t n_urls() const { return urls.size(); }
};

struct YearBucket {
  BucketLabel label;
  std::vector<DomainCount> domains;  // sorted by domain

  std::uint64_t url_count() const;
  std::uint64_t singleton_domains() const;
};

struct Bucketing {
  std::vector<YearBucket> buckets;  // ascending by label
  std::uint64_t dropped_early = 0;  // first capture before 1996
};

Bucketing bucket_by_first_year(std::span<const FirstCapture> entries);

// Groups URLs by registered domain (sorted, deduplicated).
std::vector<DomainCount> group_by_domain(std::span<const CanonicalUrl> urls);

// ---------------------------------------------------------------------------
// Upsampling and popular domains.

// Roots for hosts that appear only through deep links, in first-seen order.
std::vector<CanonicalUrl> extract_missing_roots(std::span<const CanonicalUrl> urls);

using FirstCaptureLookup = std::function<std::optional<Timestamp14>(const CanonicalUrl&)>;

struct Reintegration {
  std::map<int, std::vector<CanonicalUrl>> by_year;
  std::vector<int> unmet_years;  // non-empty when the pool ran dry
  std::uint64_t draws = 0;

  bool exhausted() const { return !unmet_years.empty(); }
};

// Draws candidates uniformly without replacement until every requested year
// has at least per_year_min URLs first captured in it.
Reintegration reintegrate_popular(std::string_view domain,
                                  std::span<const CanonicalUrl> candidates,
                                  const FirstCaptureLookup& first_capture_lookup,
                                  std::span<const int> years, std::uint64_t per_year_min,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Logarithmic downsampling: reduced = min(N, round(K ln N + C)).

struct DownsampleParams {
  double k = 1.0;
  std::uint64_t c = 1;
  std::uint64_t target = 1'000'000;
  std::uint64_t tail_threshold = 900'000;
  double tail_keep_fraction = 0.10;
  std::uint64_t seed = 0;

  void validate() const;
};

// Keeps round(fraction * singletons) single-URL domains, chosen uniformly,
// when the bucket has more than tail_threshold domains.
YearBucket reduce_long_tail(const YearBucket& bucket, const DownsampleParams& params,
                            Rng& rng);

std::uint64_t downsample_count(std::uint64_t n, double k, std::uint64_t c);
inline std::uint64_t downsample_count(std::uint64_t n, const DownsampleParams& p) {
  return downsample_count(n, p.k, p.c);
}

struct Calibration {
  std::uint64_t k = 1;
  std::uint64_t total = 0;
  bool overshoot = false;  // total exceeds target
};

// Integer K >= 1 whose reduced total lands closest to target: the smallest K
// reaching the largest total <= target, unless the first total above target
// is strictly closer.
Calibration calibrate_k(std::span<const std::uint64_t> domain_counts, std::uint64_t c,
                        std::uint64_t target);
Calibration calibrate_k(const YearBucket& bucket, std::uint64_t c, std::uint64_t target);

// Root URL first (when present), then k-1 of the rest by reservoir sampling.
std::vector<CanonicalUrl> select_urls(const DomainCount& domain, std::uint64_t k,
                                      std::uint64_t seed);

}  // namespace wbsample
