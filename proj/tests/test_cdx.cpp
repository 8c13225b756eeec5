#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "wbsample/cdx.hpp"

using namespace wbsample;

namespace {

const char* kExampleFirst =
    "com,example)/ 20020120142510 http://example.com:80/ text/html 200 "
    "HT2DYGA5UKZCPBSFVCV3JOBXGW2G5UUA 1792";

}  // namespace

TEST_CASE("first example.com capture") {
  auto r = parse_cdx_line(kExampleFirst);
  CHECK(r.urlkey == "com,example)/");
  CHECK(r.timestamp.str() == "20020120142510");
  CHECK(r.timestamp.year() == 2002);
  CHECK(r.timestamp.month() == 1);
  CHECK(r.timestamp.day() == 20);
  CHECK(r.timestamp.hour() == 14);
  CHECK(r.timestamp.minute() == 25);
  CHECK(r.timestamp.second() == 10);
  CHECK(r.mime == "text/html");
  CHECK(r.status == "200");
  CHECK(r.length == 1792);
  CHECK(r.str() == kExampleFirst);
}

TEST_CASE("whitespace runs normalize to single spaces") {
  auto r = parse_cdx_line("com,a)/  20100101000000\thttp://a.com/ text/html   200 D 5\r\n");
  CHECK(r.str() == "com,a)/ 20100101000000 http://a.com/ text/html 200 D 5");
}

TEST_CASE("malformed CDX lines") {
  CHECK_THROWS_AS(parse_cdx_line("com,a)/ 20100101000000 http://a.com/ text/html 200 D"),
                  ParseError);
  CHECK_THROWS_AS(parse_cdx_line("com,a)/ 20100101000000 http://a.com/ text/html 200 D x"),
                  ParseError);
  CHECK_THROWS_AS(parse_cdx_line("com,a)/ 20100101000000 http://a.com/ text/html 200 D -1"),
                  ParseError);
  CHECK_THROWS_AS(parse_cdx_line("a b c d e f g h"), ParseError);
  try {
    parse_cdx_text("com,a)/ 20100101000000 http://a.com/ text/html 200 D 5\n\nbad line\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).rfind("line 3: ", 0) == 0);
  }
}

TEST_CASE("revisit and flagged rows") {
  auto rv = parse_cdx_line("com,a)/ 20100101000000 http://a.com/ warc/revisit - D 5");
  CHECK(rv.is_revisit());
  CHECK(!rv.is_flagged());
  CHECK(rv.str() == "com,a)/ 20100101000000 http://a.com/ warc/revisit - D 5");
  auto odd = parse_cdx_line("com,a)/ 20100101000000 http://a.com/ text/html - D 5");
  CHECK(!odd.is_revisit());
  CHECK(odd.is_flagged());
  auto done =
      parse_cdx_line("com,a)/ 20100101000000 http://a.com/ warc/revisit;orig=text/html 200 D 5");
  CHECK(done.is_rehydrated());
  CHECK(done.content_mime() == "text/html");
}

TEST_CASE("timestamps") {
  CHECK(Timestamp14::parse("19791231000000").year() == 1979);
  CHECK_THROWS_AS(Timestamp14::parse("20211301000000"), ParseError);
  CHECK_THROWS_AS(Timestamp14::parse("20210230000000"), ParseError);
  CHECK_THROWS_AS(Timestamp14::parse("2021010100000"), ParseError);
  CHECK_THROWS_AS(Timestamp14::parse("20210101240000"), ParseError);
  CHECK_NOTHROW(Timestamp14::parse("20000229235959"));
  CHECK_THROWS_AS(Timestamp14::parse("19000229000000"), ParseError);
}

TEST_CASE("property: timestamp order is string order") {
  Rng rng(21);
  for (int i = 0; i < 20000; ++i) {
    auto a = wbtest::timestamp_for(1990 + static_cast<int>(rng.below(35)), rng.below(1 << 20));
    auto b = wbtest::timestamp_for(1990 + static_cast<int>(rng.below(35)), rng.below(1 << 20));
    auto ta = Timestamp14::parse(a), tb = Timestamp14::parse(b);
    CHECK((ta < tb) == (a < b));
    CHECK(ta.str() == a);
  }
}

TEST_CASE("ZipNum lines") {
  const std::string lines[] = {
      "asia,city-sat)/thread28004.html 20130622195420\tpart-a-00001\t3237741936\t263882\t999981",
      "asia,citygolfcambodia)/site 20180811181040\tpart-a-00001\t3239378785\t332036\t999987",
      "asia,cityrental)/ 20130804002034\tpart-a-00001\t3239987800\t278249\t999989",
  };
  auto e = parse_zipnum_line(lines[2]);
  CHECK(e.urlkey == "asia,cityrental)/");
  CHECK(e.timestamp.str() == "20130804002034");
  CHECK(e.part == "part-a-00001");
  CHECK(e.offset == 3239987800ULL);
  CHECK(e.length == 278249);
  CHECK(e.block == 999989);
  for (const auto& l : lines) CHECK(parse_zipnum_line(l).str() == l);
  CHECK(parse_zipnum_line(lines[0]).urlkey == "asia,city-sat)/thread28004.html");

  CHECK_THROWS_AS(parse_zipnum_line("asia,a)/ 20130804002034\tpart\t-5\t10\t1"), ParseError);
  CHECK_THROWS_AS(parse_zipnum_line("asia,a)/ 20130804002034\tpart\t5\t10"), ParseError);
  CHECK_THROWS_AS(parse_zipnum_line("asia,a)/\tpart\t5\t10\t1"), ParseError);
  CHECK_THROWS_AS(parse_zipnum_line("asia,a)/ 20130804002034\tpart\t5\t0\t1"), ParseError);
}

TEST_CASE("property: ZipNum and CDX round trip") {
  Rng rng(22);
  for (int i = 0; i < 1000; ++i) {
    ZipNumEntry e;
    e.urlkey = url_to_surt_text(wbtest::random_url_text(rng));
    e.timestamp = Timestamp14::parse(wbtest::timestamp_for(2000 + i % 20, rng.below(100000)));
    e.part = "part-a-" + std::to_string(rng.below(100000));
    e.offset = rng.next() >> 20;
    e.length = 1 + rng.below(1 << 20);
    e.block = rng.below(1000000);
    auto line = e.str();
    CHECK(parse_zipnum_line(line) == e);
    CHECK(parse_zipnum_line(line).str() == line);

    auto r = wbtest::make_record(e.urlkey, e.timestamp.str(), "http://x.com/",
                                 rng.below(2) ? "warc/revisit" : "text/html",
                                 rng.below(2) ? "-" : "200", wbtest::digest_for(i),
                                 rng.below(100000));
    CHECK(parse_cdx_line(r.str()) == r);
  }
}

TEST_CASE("TimeMap construction sorts and rejects mixed keys") {
  Rng rng(23);
  std::vector<CdxRecord> recs;
  for (int i = 0; i < 500; ++i)
    recs.push_back(wbtest::make_record("com,a)/", wbtest::timestamp_for(2000 + i % 9, rng.below(5000)),
                                       "http://a.com/", "text/html", "200",
                                       wbtest::digest_for(i)));
  for (int round = 0; round < 5; ++round) {
    for (std::size_t i = recs.size(); i > 1; --i) std::swap(recs[i - 1], recs[rng.below(i)]);
    auto tm = TimeMap::from_records("", recs);
    CHECK(tm.uri_r == "http://a.com/");
    CHECK(std::is_sorted(tm.records.begin(), tm.records.end(),
                         [](auto& a, auto& b) { return a.timestamp < b.timestamp; }));
  }
  recs.push_back(wbtest::make_record("com,b)/", "20100101000000", "http://b.com/", "text/html",
                                     "200", "X"));
  CHECK_THROWS_AS(TimeMap::from_records("", recs), MixedKeyError);
}

TEST_CASE("TimeMap files") {
  wbtest::TempDir dir;
  auto tm = TimeMap::from_records(
      "http://example.com/",
      {parse_cdx_line(kExampleFirst),
       parse_cdx_line("com,example)/ 20020328012821 http://www.example.com:80/ warc/revisit - "
                      "HT2DYGA5UKZCPBSFVCV3JOBXGW2G5UUA 500")});
  auto path = dir / (timemap_file_stem(tm.urlkey()) + ".cdx");
  write_timemap_file(path, tm);
  auto back = read_timemap_file(path);
  CHECK(back.records == tm.records);
  CHECK(read_file(path) == tm.str());

  write_timemap_file(dir / "empty.cdx", TimeMap{});
  CHECK(read_file(dir / "empty.cdx").empty());
  CHECK(read_timemap_file(dir / "empty.cdx").empty());

  wbtest::write_text(dir / "bad.cdx", std::string(kExampleFirst) + "\nnot a line\n");
  try {
    read_timemap_file(dir / "bad.cdx");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2: line 2") == std::string::npos);
  }
}

TEST_CASE("file stems are filesystem and case safe") {
  CHECK(timemap_file_stem("com,example)/") == "com,example%29%2F");
  CHECK(timemap_file_stem("com,a)/Page") != timemap_file_stem("com,a)/page"));
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), ::tolower);
    return s;
  };
  // Distinct keys must not collide even on case-insensitive filesystems.
  CHECK(lower(timemap_file_stem("com,a)/Page")) != lower(timemap_file_stem("com,a)/page")));
  Rng rng(24);
  std::set<std::string> keys, stems;
  for (int i = 0; i < 3000; ++i) {
    auto key = url_to_surt_text(wbtest::random_url_text(rng));
    if (rng.below(10) == 0) key += std::string(300, 'q');
    auto stem = timemap_file_stem(key);
    CHECK(stem.size() <= 200);
    CHECK(stem.find('/') == std::string::npos);
    if (keys.insert(key).second) stems.insert(lower(stem));
  }
  CHECK(stems.size() == keys.size());
}
