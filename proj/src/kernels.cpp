#include "wbsample/kernels.hpp"

#include <omp.h>

#include <stdexcept>

namespace wbsample::kernels {

namespace {

bool kept_for_phase(std::span<const CdxRecord> corpus, std::string_view urlkey,
                    std::uint64_t interval, std::uint64_t phase) {
  for (const auto& rec : skip_sample(corpus, interval, phase))
    if (rec.urlkey == urlkey) return true;
  return false;
}

// Exceptions must not escape an OpenMP region, so inputs are checked first.
void check_allocations(std::span<const DomainCount> domains,
                       std::span<const std::uint64_t> allocations) {
  if (domains.size() != allocations.size())
    throw std::invalid_argument("select_batch: one allocation per domain required");
  for (std::size_t i = 0; i < domains.size(); ++i)
    if (allocations[i] == 0 || allocations[i] > domains[i].n_urls())
      throw std::invalid_argument("select_batch: allocation out of range for " +
                                  domains[i].domain);
}

void check_counts(std::span<const std::uint64_t> counts) {
  for (auto n : counts)
    if (n == 0) throw std::invalid_argument("domain sizes must be >= 1");
}

void check_phases(std::uint64_t interval, std::span<const std::uint64_t> phases) {
  if (interval == 0) throw std::invalid_argument("interval must be >= 1");
  for (auto p : phases)
    if (p >= interval) throw std::invalid_argument("phase must be < interval");
}

}  // namespace

std::uint64_t reduced_total(std::span<const std::uint64_t> counts, double k,
                            std::uint64_t c) {
  check_counts(counts);
  const auto n = static_cast<std::int64_t>(counts.size());
  std::uint64_t sum = 0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) sum += downsample_count(counts[i], k, c);
  return sum;
}

std::uint64_t reduced_total_serial(std::span<const std::uint64_t> counts, double k,
                                   std::uint64_t c) {
  std::uint64_t sum = 0;
  for (auto n : counts) sum += downsample_count(n, k, c);
  return sum;
}

std::vector<FilterVerdict> evaluate_batch(std::span<const std::string> urls) {
  std::vector<FilterVerdict> out(urls.size());
  const auto n = static_cast<std::int64_t>(urls.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) out[i] = evaluate_url(urls[i]);
  return out;
}

std::vector<FilterVerdict> evaluate_batch_serial(std::span<const std::string> urls) {
  std::vector<FilterVerdict> out;
  out.reserve(urls.size());
  for (const auto& u : urls) out.push_back(evaluate_url(u));
  return out;
}

double inclusion_frequency(std::span<const CdxRecord> corpus, std::string_view urlkey,
                           std::uint64_t interval, std::span<const std::uint64_t> phases) {
  check_phases(interval, phases);
  if (phases.empty()) return 0.0;
  const auto n = static_cast<std::int64_t>(phases.size());
  std::int64_t hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    hits += kept_for_phase(corpus, urlkey, interval, phases[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(n);
}

double inclusion_frequency_serial(std::span<const CdxRecord> corpus, std::string_view urlkey,
                                  std::uint64_t interval,
                                  std::span<const std::uint64_t> phases) {
  if (phases.empty()) return 0.0;
  std::uint64_t hits = 0;
  for (auto phase : phases) hits += kept_for_phase(corpus, urlkey, interval, phase) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(phases.size());
}

std::vector<Rehydration> rehydrate_batch(std::span<const TimeMap> timemaps,
                                         std::size_t capacity) {
  if (capacity == 0) throw std::invalid_argument("cache capacity must be >= 1");
  std::vector<Rehydration> out(timemaps.size());
  const auto n = static_cast<std::int64_t>(timemaps.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) out[i] = rehydrate(timemaps[i], capacity);
  return out;
}

std::vector<Rehydration> rehydrate_batch_serial(std::span<const TimeMap> timemaps,
                                                std::size_t capacity) {
  std::vector<Rehydration> out;
  out.reserve(timemaps.size());
  for (const auto& tm : timemaps) out.push_back(rehydrate(tm, capacity));
  return out;
}

std::vector<std::vector<CanonicalUrl>> select_batch(std::span<const DomainCount> domains,
                                                    std::span<const std::uint64_t> allocations,
                                                    std::uint64_t seed) {
  check_allocations(domains, allocations);
  std::vector<std::vector<CanonicalUrl>> out(domains.size());
  const auto n = static_cast<std::int64_t>(domains.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) out[i] = select_urls(domains[i], allocations[i], seed);
  return out;
}

std::vector<std::vector<CanonicalUrl>> select_batch_serial(
    std::span<const DomainCount> domains, std::span<const std::uint64_t> allocations,
    std::uint64_t seed) {
  check_allocations(domains, allocations);
  std::vector<std::vector<CanonicalUrl>> out;
  out.reserve(domains.size());
  for (std::size_t i = 0; i < domains.size(); ++i)
    out.push_back(select_urls(domains[i], allocations[i], seed));
  return out;
}

}  // namespace wbsample::kernels
