#include "wbsample/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace wbsample::stats {

std::vector<CcdfPoint> ccdf(std::span<const std::uint64_t> values) {
  std::vector<std::uint64_t> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  std::vector<CcdfPoint> out;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] == v[i - 1]) continue;
    out.push_back({v[i], 100.0 * static_cast<double>(v.size() - i) / n});
  }
  return out;
}

std::map<int, std::uint64_t> first_year_histogram(std::span<const FirstCapture> entries) {
  std::map<int, std::uint64_t> hist;
  for (const auto& e : entries) ++hist[e.first.year()];
  return hist;
}

std::map<std::string, std::uint64_t> domain_counts(std::span<const CanonicalUrl> urls) {
  std::map<std::string, std::set<std::string>> seen;
  for (const auto& u : urls) seen[registered_domain(u)].insert(u.str());
  std::map<std::string, std::uint64_t> out;
  for (const auto& [d, s] : seen) out[d] = s.size();
  return out;
}

namespace {

std::vector<std::pair<std::string, std::uint64_t>> by_count_desc(
    const std::map<std::string, std::uint64_t>& counts) {
  std::vector<std::pair<std::string, std::uint64_t>> v(counts.begin(), counts.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return v;
}

}  // namespace

std::vector<TopDomainRow> top_domains(const std::map<std::string, std::uint64_t>& before,
                                      const std::map<std::string, std::uint64_t>& after,
                                      std::size_t n) {
  auto sorted = by_count_desc(before);
  std::vector<TopDomainRow> rows;
  for (std::size_t i = 0; i < sorted.size() && i < n; ++i) {
    auto it = after.find(sorted[i].first);
    rows.push_back({i + 1, sorted[i].first, sorted[i].second, it == after.end() ? 0 : it->second});
  }
  return rows;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  if (a.size() < 2) return nan;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return nan;
  return sab / std::sqrt(saa * sbb);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  return pearson(ra, rb);
}

RankCorrelation ranking_correlation(const std::map<std::string, std::uint64_t>& before,
                                    const std::map<std::string, std::uint64_t>& after,
                                    std::optional<std::size_t> limit) {
  std::vector<double> a, b;
  for (const auto& [d, n] : by_count_desc(before)) {
    if (limit && a.size() >= *limit) break;
    auto it = after.find(d);
    if (it == after.end()) continue;
    a.push_back(static_cast<double>(n));
    b.push_back(static_cast<double>(it->second));
  }
  return {a.size(), spearman(a, b)};
}

double HeuristicPrecision::precision() const {
  return predicted == 0 ? std::numeric_limits<double>::quiet_NaN()
                        : static_cast<double>(correct) / static_cast<double>(predicted);
}

std::vector<HeuristicPrecision> heuristic_precision(
    const std::map<std::string, Heuristic>& predicted,
    const std::map<std::string, std::string>& mimes) {
  std::vector<HeuristicPrecision> rows;
  for (auto h : kAllHeuristics) rows.push_back({h, 0, 0});
  for (const auto& [url, h] : predicted) {
    auto it = mimes.find(url);
    if (it == mimes.end()) continue;
    auto& row = rows[static_cast<std::size_t>(h)];
    ++row.predicted;
    if (it->second == "text/html") ++row.correct;
  }
  return rows;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string ccdf_csv(std::span<const CcdfPoint> points) {
  std::string out = "x,percent\n";
  for (const auto& p : points) out += std::to_string(p.x) + "," + format_real(p.percent) + "\n";
  return out;
}

std::string histogram_csv(const std::map<int, std::uint64_t>& hist) {
  std::string out = "year,count\n";
  for (const auto& [y, n] : hist) out += std::to_string(y) + "," + std::to_string(n) + "\n";
  return out;
}

std::string top_domains_csv(std::span<const TopDomainRow> rows) {
  std::string out = "rank,domain,before,after\n";
  for (const auto& r : rows)
    out += std::to_string(r.rank) + "," + r.domain + "," + std::to_string(r.before) + "," +
           std::to_string(r.after) + "\n";
  return out;
}

std::string precision_csv(std::span<const HeuristicPrecision> rows) {
  std::string out = "heuristic,predicted,correct,incorrect,precision\n";
  for (const auto& r : rows)
    out += std::string(to_string(r.heuristic)) + "," + std::to_string(r.predicted) + "," +
           std::to_string(r.correct) + "," + std::to_string(r.predicted - r.correct) + "," +
           format_real(r.precision()) + "\n";
  return out;
}

}  // namespace wbsample::stats
