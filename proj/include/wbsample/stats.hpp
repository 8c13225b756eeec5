#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wbsample/sampler.hpp"
#include "wbsample/url_filter.hpp"

namespace wbsample::stats {

struct CcdfPoint {
  std::uint64_t x = 0;
  double percent = 0;  // share of values >= x, in percent
};

// One point per distinct value, ascending in x.
std::vector<CcdfPoint> ccdf(std::span<const std::uint64_t> values);

std::map<int, std::uint64_t> first_year_histogram(std::span<const FirstCapture> entries);

// Registered domain -> number of distinct URLs.
std::map<std::string, std::uint64_t> domain_counts(std::span<const CanonicalUrl> urls);

struct TopDomainRow {
  std::size_t rank = 0;
  std::string domain;
  std::uint64_t before = 0;
  std::uint64_t after = 0;
};

// The n domains with most URLs before, ties broken by name.
std::vector<TopDomainRow> top_domains(const std::map<std::string, std::uint64_t>& before,
                                      const std::map<std::string, std::uint64_t>& after,
                                      std::size_t n);

// 1-based ranks; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);
// NaN when fewer than two points or either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);

// Spearman correlation of per-domain counts over domains present in both maps.
// With limit set, only the `limit` largest domains before are used.
struct RankCorrelation {
  std::size_t n = 0;
  double rho = 0;
};
RankCorrelation ranking_correlation(const std::map<std::string, std::uint64_t>& before,
                                    const std::map<std::string, std::uint64_t>& after,
                                    std::optional<std::size_t> limit = std::nullopt);

struct HeuristicPrecision {
  Heuristic heuristic{};
  std::uint64_t predicted = 0;  // with a known first-capture MIME
  std::uint64_t correct = 0;    // of those, text/html
  double precision() const;
};

// verdicts: url text -> heuristic; mimes: url text -> first-capture MIME.
std::vector<HeuristicPrecision> heuristic_precision(
    const std::map<std::string, Heuristic>& predicted,
    const std::map<std::string, std::string>& mimes);

std::string ccdf_csv(std::span<const CcdfPoint> points);
std::string histogram_csv(const std::map<int, std::uint64_t>& hist);
std::string top_domains_csv(std::span<const TopDomainRow> rows);
std::string precision_csv(std::span<const HeuristicPrecision> rows);

// Fixed six-decimal rendering; "nan" when undefined.
std::string format_real(double v);

}  // namespace wbsample::stats
