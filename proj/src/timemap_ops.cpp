#include "wbsample/timemap_ops.hpp"

#include <algorithm>

namespace wbsample {

LruDigestCache::LruDigestCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("cache capacity must be >= 1");
}

const CdxRecord* LruDigestCache::find(const std::string& digest) {
  auto it = index_.find(digest);
  if (it == index_.end()) return nullptr;
  order_.splice(order_.begin(), order_, it->second);
  return &it->second->second;
}

void LruDigestCache::put(const CdxRecord& record) {
  auto it = index_.find(record.digest);
  if (it != index_.end()) {
    it->second->second = record;
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  if (index_.size() == capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
  order_.emplace_front(record.digest, record);
  index_.emplace(record.digest, order_.begin());
}

namespace {

bool is_full_record(const CdxRecord& r) { return !r.missing_status() && !r.is_rehydrated(); }

}  // namespace

Rehydration rehydrate(const TimeMap& tm, std::size_t capacity) {
  Rehydration out{tm, {}, 0};
  LruDigestCache cache(capacity);
  auto& records = out.timemap.records;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& rec = records[i];
    if (rec.is_revisit()) {
      if (const auto* src = cache.find(rec.digest)) {
        rec.status = src->status;
        rec.mime = std::string(kRehydratedMarker) + src->mime;
        ++out.resolved;
      } else {
        out.unresolved.push_back(i);
      }
    } else if (rec.is_rehydrated()) {
      // Touch the digest as the original lookup did, so a second pass evolves
      // the cache identically and stays idempotent.
      cache.find(rec.digest);
    } else if (is_full_record(rec)) {
      cache.put(rec);
    }
  }
  return out;
}

std::vector<RevisitGap> revisit_gaps(const TimeMap& tm) {
  std::unordered_map<std::string, std::size_t> last_full;
  std::vector<RevisitGap> gaps;
  for (std::size_t i = 0; i < tm.records.size(); ++i) {
    const auto& rec = tm.records[i];
    if (rec.is_revisit() || rec.is_rehydrated()) {
      auto it = last_full.find(rec.digest);
      if (it != last_full.end()) gaps.push_back({i, it->second, i - it->second});
    } else if (is_full_record(rec)) {
      last_full[rec.digest] = i;
    }
  }
  return gaps;
}

std::size_t max_revisit_distance(const TimeMap& tm) {
  std::size_t best = 0;
  for (const auto& g : revisit_gaps(tm)) best = std::max(best, g.distance);
  return best;
}

TimeMap merge_pages(std::span<const std::vector<CdxRecord>> pages, std::string uri_r) {
  std::vector<std::pair<std::string, const CdxRecord*>> lines;
  const CdxRecord* first = nullptr;
  for (const auto& page : pages) {
    for (const auto& rec : page) {
      if (!first) first = &rec;
      if (rec.urlkey != first->urlkey)
        throw MixedKeyError("pages mix urlkeys '" + first->urlkey + "' and '" + rec.urlkey +
                            "'");
      lines.emplace_back(rec.str(), &rec);
    }
  }
  std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) {
    if (a.second->timestamp != b.second->timestamp)
      return a.second->timestamp < b.second->timestamp;
    return a.first < b.first;
  });
  lines.erase(std::unique(lines.begin(), lines.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              lines.end());
  TimeMap tm;
  tm.records.reserve(lines.size());
  for (const auto& [_, rec] : lines) tm.records.push_back(*rec);
  tm.uri_r = !uri_r.empty() ? std::move(uri_r)
             : first        ? first->original
                            : std::string{};
  return tm;
}

FirstCaptureInfo first_capture(const TimeMap& tm) {
  if (tm.records.empty())
    throw EmptyHistoryError("no captures for '" + tm.uri_r + "'");
  auto it = std::min_element(
      tm.records.begin(), tm.records.end(),
      [](const CdxRecord& a, const CdxRecord& b) { return a.timestamp < b.timestamp; });
  return {it->timestamp, std::string(it->content_mime())};
}

AliasReport compare_alias_first_capture(const TimeMap& root, std::span<const TimeMap> aliases) {
  AliasReport report;
  report.root_year = first_capture(root).timestamp.year();
  for (const auto& alias : aliases) {
    AliasComparison row;
    row.alias = alias.uri_r;
    if (alias.empty()) {
      row.skipped = true;
      ++report.skipped;
    } else {
      row.alias_year = first_capture(alias).timestamp.year();
      row.alias_earlier = *row.alias_year < report.root_year;
      if (row.alias_earlier) ++report.earlier;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace wbsample
