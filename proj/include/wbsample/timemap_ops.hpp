#pragma once

#include <cstddef>
#include <list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wbsample/cdx.hpp"

namespace wbsample {

inline constexpr std::size_t kDefaultCacheCapacity = 1000;

// Bounded digest -> most recent full record map with least-recently-used
// eviction. Both lookups and inserts count as use.
class LruDigestCache {
 public:
  explicit LruDigestCache(std::size_t capacity = kDefaultCacheCapacity);

  const CdxRecord* find(const std::string& digest);
  void put(const CdxRecord& record);

  std::size_t size() const { return index_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  using Entry = std::pair<std::string, CdxRecord>;
  std::size_t capacity_;
  std::list<Entry> order_;  // front = most recent
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
};

struct Rehydration {
  TimeMap timemap;
  std::vector<std::size_t> unresolved;  // positions of revisits left as-is
  std::size_t resolved = 0;
};

// One forward pass. Full records feed the cache; each unresolved revisit row
// whose digest hits takes the source status, and its MIME becomes
// `warc/revisit;orig=<source mime>`.
Rehydration rehydrate(const TimeMap& tm, std::size_t capacity = kDefaultCacheCapacity);

struct RevisitGap {
  std::size_t revisit_index = 0;
  std::size_t source_index = 0;
  std::size_t distance = 0;
};

// Gap from each revisit to the latest earlier full record with its digest.
std::vector<RevisitGap> revisit_gaps(const TimeMap& tm);
std::size_t max_revisit_distance(const TimeMap& tm);

// Concatenates pages, sorts by (timestamp, line), drops exact duplicate lines.
// Throws MixedKeyError when pages disagree on urlkey.
TimeMap merge_pages(std::span<const std::vector<CdxRecord>> pages, std::string uri_r = {});

class EmptyHistoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FirstCaptureInfo {
  Timestamp14 timestamp;
  std::string mime;
};

FirstCaptureInfo first_capture(const TimeMap& tm);

struct AliasComparison {
  std::string alias;
  std::optional<int> alias_year;  // absent when the alias has no captures
  bool alias_earlier = false;
  bool skipped = false;
};

struct AliasReport {
  int root_year = 0;
  std::vector<AliasComparison> rows;
  std::size_t earlier = 0;
  std::size_t skipped = 0;
};

// Year-granularity comparison of each alias' first capture with the root's.
AliasReport compare_alias_first_capture(const TimeMap& root, std::span<const TimeMap> aliases);

}  // namespace wbsample
