#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "wbsample/timemap_ops.hpp"

using namespace wbsample;
using wbtest::make_record;

namespace {

TimeMap tm_from(const std::string& text) {
  return TimeMap::from_records("http://example.com/", parse_cdx_text(text));
}

// example.com history with revisits lacking statuses, before and after.
const char* kRevisitSnippet =
    "com,example)/ 20020120142510 http://example.com:80/ text/html 200 HT2DYGA5UKZCPBSFVCV3JOBXGW2G5UUA 1792\n"
    "com,example)/ 20020328012821 http://www.example.com:80/ warc/revisit - HT2DYGA5UKZCPBSFVCV3JOBXGW2G5UUA 480\n"
    "com,example)/ 20020524151012 http://example.com:80/ text/html 302 3I42H3S6NNFQ2MSVX7XZKYAYSCX5QBYJ 310\n"
    "com,example)/ 20020601130822 http://www.example.com/ warc/revisit - HT2DYGA5UKZCPBSFVCV3JOBXGW2G5UUA 482\n"
    "com,example)/ 20020802011430 http://example.com/ warc/revisit - 3I42H3S6NNFQ2MSVX7XZKYAYSCX5QBYJ 301\n"
    "com,example)/ 20021011060446 http://example.com/ warc/revisit - AAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAA 301\n";

const char* kRevisitSnippetHydrated =
    "com,example)/ 20020120142510 http://example.com:80/ text/html 200 HT2DYGA5UKZCPBSFVCV3JOBXGW2G5UUA 1792\n"
    "com,example)/ 20020328012821 http://www.example.com:80/ warc/revisit;orig=text/html 200 HT2DYGA5UKZCPBSFVCV3JOBXGW2G5UUA 480\n"
    "com,example)/ 20020524151012 http://example.com:80/ text/html 302 3I42H3S6NNFQ2MSVX7XZKYAYSCX5QBYJ 310\n"
    "com,example)/ 20020601130822 http://www.example.com/ warc/revisit;orig=text/html 200 HT2DYGA5UKZCPBSFVCV3JOBXGW2G5UUA 482\n"
    "com,example)/ 20020802011430 http://example.com/ warc/revisit;orig=text/html 302 3I42H3S6NNFQ2MSVX7XZKYAYSCX5QBYJ 301\n"
    "com,example)/ 20021011060446 http://example.com/ warc/revisit - AAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAA 301\n";

}  // namespace

TEST_CASE("LRU digest cache") {
  LruDigestCache cache(2);
  auto a = make_record("k", "20100101000000", "u", "text/html", "200", "A");
  auto b = make_record("k", "20100102000000", "u", "text/html", "404", "B");
  auto c = make_record("k", "20100103000000", "u", "text/html", "301", "C");
  cache.put(a);
  cache.put(b);
  CHECK(cache.find("A"));  // A is now most recent
  cache.put(c);            // evicts B
  CHECK(cache.size() == 2);
  CHECK(cache.find("B") == nullptr);
  CHECK(cache.find("A")->status == "200");
  auto a2 = a;
  a2.status = "500";
  cache.put(a2);
  CHECK(cache.find("A")->status == "500");
  CHECK(cache.size() == 2);
  CHECK_THROWS(LruDigestCache(0));
}

TEST_CASE("revisit snippet restores statuses") {
  auto tm = tm_from(kRevisitSnippet);
  auto r = rehydrate(tm, 1000);
  CHECK(r.timemap.str() == kRevisitSnippetHydrated);
  CHECK(r.resolved == 3);
  CHECK(r.unresolved == std::vector<std::size_t>{5});
  CHECK(r.timemap.records[1].content_mime() == "text/html");
  CHECK(rehydrate(r.timemap, 1000).timemap.str() == kRevisitSnippetHydrated);
}

TEST_CASE("no revisits means no change") {
  auto tm = tm_from(
      "com,example)/ 20020120142510 http://example.com/ text/html 200 A 1\n"
      "com,example)/ 20030120142510 http://example.com/ text/html - B 1\n");
  auto r = rehydrate(tm, 10);
  CHECK(r.timemap.str() == tm.str());
  CHECK(r.unresolved.empty());
  CHECK(r.resolved == 0);
}

TEST_CASE("revisits do not feed the cache") {
  auto tm = tm_from(
      "com,example)/ 20020120142510 http://example.com/ text/html 200 A 1\n"
      "com,example)/ 20020120142511 http://example.com/ text/html 200 B 1\n"
      "com,example)/ 20020120142512 http://example.com/ warc/revisit - A 1\n"
      "com,example)/ 20020120142513 http://example.com/ text/html 200 C 1\n"
      "com,example)/ 20020120142514 http://example.com/ warc/revisit - A 1\n");
  // Capacity 2: the first revisit touches A; C then evicts B, and A survives.
  auto r = rehydrate(tm, 2);
  CHECK(r.unresolved.empty());
  // Capacity 1: B evicts A before the first revisit.
  auto r1 = rehydrate(tm, 1);
  CHECK(r1.unresolved == std::vector<std::size_t>{2, 4});
}

TEST_CASE("property: bounded cache matches the unbounded oracle") {
  Rng rng(51);
  for (int i = 0; i < 120; ++i) {
    const auto rows = 1 + rng.below(i < 10 ? 10000 : 1500);
    const auto gap = 1 + rng.below(1000);
    auto tm = wbtest::random_timemap(rng, rows, gap);
    auto r = rehydrate(tm, 1000);
    auto oracle = wbtest::oracle_rehydrate(tm);
    REQUIRE(r.timemap.records == oracle.records);
    CHECK(max_revisit_distance(tm) <= gap);
    auto again = rehydrate(r.timemap, 1000);
    CHECK(again.timemap.records == r.timemap.records);
    for (std::size_t j = 0; j < tm.records.size(); ++j) {
      const auto& a = tm.records[j];
      const auto& b = r.timemap.records[j];
      CHECK(a.urlkey == b.urlkey);
      CHECK(a.timestamp == b.timestamp);
      CHECK(a.digest == b.digest);
      CHECK(a.length == b.length);
    }
  }
}

TEST_CASE("capacity above the max distance resolves every resolvable revisit") {
  Rng rng(52);
  for (int i = 0; i < 50; ++i) {
    auto tm = wbtest::random_timemap(rng, 3000, 200, 0.5);
    auto cap = max_revisit_distance(tm) + 1;
    auto r = rehydrate(tm, cap);
    CHECK(r.unresolved.empty());
  }
}

TEST_CASE("revisit distance") {
  std::string text = "com,example)/ 20020101000000 http://example.com/ text/html 200 S 1\n";
  for (int i = 1; i <= 4; ++i)
    text += "com,example)/ 2002010100000" + std::to_string(i) +
            " http://example.com/ text/html 200 F" + std::to_string(i) + " 1\n";
  text += "com,example)/ 20020101000005 http://example.com/ warc/revisit - S 1\n";
  auto tm = tm_from(text);
  CHECK(max_revisit_distance(tm) == 5);
  auto gaps = revisit_gaps(tm);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].source_index == 0);
  CHECK(gaps[0].revisit_index == 5);
  CHECK(max_revisit_distance(tm_from("com,example)/ 20020101000000 http://example.com/ text/html 200 S 1\n")) == 0);
}

TEST_CASE("page merging") {
  std::vector<std::vector<CdxRecord>> pages(3);
  for (int p = 0; p < 3; ++p)
    for (int i = 0; i < 10; ++i)
      pages[p].push_back(make_record("com,a)/", wbtest::timestamp_for(2001 + p, i), "http://a.com/",
                                     "text/html", "200", wbtest::digest_for(p * 10 + i)));
  auto tm = merge_pages(pages, "http://a.com/");
  CHECK(tm.records.size() == 30);
  CHECK(std::is_sorted(tm.records.begin(), tm.records.end(),
                       [](auto& a, auto& b) { return a.timestamp < b.timestamp; }));

  auto overlap = pages;
  overlap[1].insert(overlap[1].begin(), overlap[0].back());
  CHECK(merge_pages(overlap).records.size() == 30);

  std::vector<std::vector<CdxRecord>> single = {pages[0]};
  CHECK(merge_pages(single).records == pages[0]);

  std::reverse(overlap.begin(), overlap.end());
  CHECK(merge_pages(overlap).records == tm.records);

  auto mixed = pages;
  mixed[2].push_back(make_record("com,b)/", "20100101000000", "http://b.com/", "text/html", "200", "X"));
  CHECK_THROWS_AS(merge_pages(mixed), MixedKeyError);
  CHECK(merge_pages(std::span<const std::vector<CdxRecord>>{}).empty());
}

TEST_CASE("property: merging is order insensitive and keeps the minimum") {
  Rng rng(53);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::vector<CdxRecord>> pages(1 + rng.below(5));
    auto min_ts = std::string("99991231235959");
    for (auto& page : pages) {
      auto n = rng.below(20);
      for (std::uint64_t i = 0; i < n; ++i) {
        auto ts = wbtest::timestamp_for(1996 + static_cast<int>(rng.below(25)), rng.below(50));
        min_ts = std::min(min_ts, ts);
        page.push_back(make_record("com,a)/", ts, "http://a.com/", "text/html", "200",
                                   wbtest::digest_for(rng.below(30))));
      }
    }
    auto a = merge_pages(pages);
    auto shuffled = pages;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    CHECK(merge_pages(shuffled).records == a.records);
    // Associativity: merging a merged prefix with the rest changes nothing.
    std::vector<std::vector<CdxRecord>> nested = {merge_pages(std::span(pages).first(1)).records};
    for (std::size_t i = 1; i < pages.size(); ++i) nested.push_back(pages[i]);
    CHECK(merge_pages(nested).records == a.records);
    if (!a.empty()) CHECK(first_capture(a).timestamp.str() == min_ts);
  }
}

TEST_CASE("first capture") {
  auto tm = tm_from(kRevisitSnippet);
  auto fc = first_capture(tm);
  CHECK(fc.timestamp.str() == "20020120142510");
  CHECK(fc.mime == "text/html");
  CHECK_THROWS_AS(first_capture(TimeMap{}), EmptyHistoryError);

  TimeMap unsorted;
  unsorted.records = tm.records;
  std::reverse(unsorted.records.begin(), unsorted.records.end());
  CHECK(first_capture(unsorted).timestamp.str() == "20020120142510");
}

TEST_CASE("alias first capture comparison") {
  auto root = tm_from("com,foo)/ 20000105000000 https://foo.com/ text/html 200 A 1\n");
  auto htm = TimeMap::from_records(
      "https://foo.com/index.htm",
      parse_cdx_text("com,foo)/index.htm 19991201000000 https://foo.com/index.htm text/html 200 B 1\n"));
  auto html = TimeMap::from_records(
      "https://foo.com/index.html",
      parse_cdx_text("com,foo)/index.html 20001201000000 https://foo.com/index.html text/html 200 C 1\n"));
  TimeMap missing;
  missing.uri_r = "https://foo.com/index.php";
  std::vector<TimeMap> aliases = {htm, html, missing};
  auto rep = compare_alias_first_capture(root, aliases);
  CHECK(rep.root_year == 2000);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].alias_earlier);
  CHECK(rep.rows[0].alias_year == 1999);
  CHECK(!rep.rows[1].alias_earlier);  // same year counts as not earlier
  CHECK(rep.rows[2].skipped);
  CHECK(rep.earlier == 1);
  CHECK(rep.skipped == 1);
}
