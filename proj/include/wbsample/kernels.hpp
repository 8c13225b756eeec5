#pragma once

// Data-parallel kernels. Each has a `_serial` twin kept as the reference the
// tests and benchmarks compare against; both must produce identical results.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wbsample/cdx.hpp"
#include "wbsample/sampler.hpp"
#include "wbsample/timemap_ops.hpp"
#include "wbsample/url_filter.hpp"

namespace wbsample::kernels {

// Sum of downsample_count over domain sizes.
std::uint64_t reduced_total(std::span<const std::uint64_t> counts, double k, std::uint64_t c);
std::uint64_t reduced_total_serial(std::span<const std::uint64_t> counts, double k,
                                   std::uint64_t c);

std::vector<FilterVerdict> evaluate_batch(std::span<const std::string> urls);
std::vector<FilterVerdict> evaluate_batch_serial(std::span<const std::string> urls);

// Fraction of phases for which skip_sample keeps at least one line of urlkey.
double inclusion_frequency(std::span<const CdxRecord> corpus, std::string_view urlkey,
                           std::uint64_t interval, std::span<const std::uint64_t> phases);
double inclusion_frequency_serial(std::span<const CdxRecord> corpus, std::string_view urlkey,
                                  std::uint64_t interval,
                                  std::span<const std::uint64_t> phases);

std::vector<Rehydration> rehydrate_batch(std::span<const TimeMap> timemaps,
                                         std::size_t capacity);
std::vector<Rehydration> rehydrate_batch_serial(std::span<const TimeMap> timemaps,
                                                std::size_t capacity);

// select_urls for every domain with its allocation.
std::vector<std::vector<CanonicalUrl>> select_batch(std::span<const DomainCount> domains,
                                                    std::span<const std::uint64_t> allocations,
                                                    std::uint64_t seed);
std::vector<std::vector<CanonicalUrl>> select_batch_serial(
    std::span<const DomainCount> domains, std::span<const std::uint64_t> allocations,
    std::uint64_t seed);

}  // namespace wbsample::kernels
