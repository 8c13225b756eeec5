#include <algorithm>

#include "doctest.h"
#include "support.hpp"
#include "wbsample/surt.hpp"

using namespace wbsample;

TEST_CASE("url_to_surt golden keys") {
  CHECK(url_to_surt_text("https://example.com/page") == "com,example)/page");
  CHECK(url_to_surt_text("http://example.com/") == "com,example)/");
  CHECK(url_to_surt_text("https://www.example.com/") == "com,example)/");
  CHECK(url_to_surt_text("https://city-sat.asia/thread28004.html") ==
        "asia,city-sat)/thread28004.html");
  CHECK(url_to_surt_text("https://www4.daily.co.jp/") == "jp,co,daily)/");
  CHECK(url_to_surt_text("https://daily.co.jp/") == "jp,co,daily)/");
}

TEST_CASE("canonicalization drops ports, fragments and userinfo") {
  CHECK(url_to_surt_text("http://example.com:80/") == "com,example)/");
  CHECK(url_to_surt_text("http://1st-international.com:80/profiles/16/PersonalBO893.htm") ==
        "com,1st-international)/profiles/16/PersonalBO893.htm");
  CHECK(url_to_surt_text("https://user:pw@Example.COM/a#top") == "com,example)/a");
  CHECK(url_to_surt_text("https://example.com") == "com,example)/");
  CHECK(url_to_surt_text("https://example.com.") == "com,example)/");
}

TEST_CASE("query and percent-encoding kept verbatim") {
  CHECK(url_to_surt_text("https://a.com/x%2Ay?b=2&a=1") == "com,a)/x%2Ay?b=2&a=1");
  CHECK(url_to_surt_text("https://a.com?q") == "com,a)/?q");
}

TEST_CASE("www prefix stripped only with two or more dots") {
  CHECK(strip_www_prefix("www4.daily.co.jp") == "daily.co.jp");
  CHECK(strip_www_prefix("www3288.com") == "www3288.com");
  CHECK(strip_www_prefix("www.example.com") == "example.com");
  CHECK(strip_www_prefix("www.com") == "www.com");
  CHECK(strip_www_prefix("wwwx.example.com") == "wwwx.example.com");
  CHECK(strip_www_prefix("example.www.com") == "example.www.com");
  // Merges under the fix, and stays distinct where it should.
  CHECK(url_to_surt_text("https://www4.daily.co.jp/") == url_to_surt_text("https://daily.co.jp/"));
  CHECK(url_to_surt_text("https://www3288.com/") == "com,www3288)/");
  CHECK(url_to_surt_text("https://www3288.com/") != url_to_surt_text("https://www3289.com/"));
}

TEST_CASE("surt_to_url inverse") {
  CHECK(surt_to_url("com,example)/page").str() == "https://example.com/page");
  CHECK(surt_to_url("jp,co,daily)/").str() == "https://daily.co.jp/");
  CHECK(surt_to_url("com,example)/page", Scheme::http).str() == "http://example.com/page");
  CHECK(surt_to_url("com,example)").str() == "https://example.com/");
  CHECK(SurtKey::parse("com,example)").str() == "com,example)/");
}

TEST_CASE("malformed SURTs are rejected") {
  CHECK_THROWS_AS(surt_to_url("amazon.com/review/rs8o6bnbx9o5k"), SurtError);
  try {
    surt_to_url("amazon.com/review/rs8o6bnbx9o5k");
  } catch (const SurtError& e) {
    CHECK(std::string(e.what()).find("')'") != std::string::npos);
  }
  CHECK_THROWS_AS(SurtKey::parse("com,,a)/"), SurtError);
  CHECK_THROWS_AS(SurtKey::parse("com,a)page"), SurtError);
  CHECK_THROWS_AS(SurtKey::parse(")/"), SurtError);
}

TEST_CASE("parse errors name the component") {
  auto component = [](const char* url) {
    try {
      parse_url(url);
    } catch (const UrlError& e) {
      return e.component();
    }
    return std::string("none");
  };
  CHECK(component("https:///?dn=renunciationguide.com") == "host");
  CHECK(component("https://*/robots.txt") == "host");
  CHECK(component("ftp://a.com/") == "scheme");
  CHECK(component("a.com/x") == "scheme");
  CHECK(component("https://a.com:8o/") == "port");
  CHECK(component("https://a b.com/") == "url");
  CHECK(component("https://a..com/") == "host");
  CHECK(!try_parse_url("https://*/robots.txt"));
}

TEST_CASE("property: round trip and scheme invariance") {
  Rng rng(11);
  for (int i = 0; i < 5000; ++i) {
    auto text = wbtest::random_url_text(rng);
    auto url = parse_url(text);
    auto key = url_to_surt(url);
    for (auto s : {Scheme::http, Scheme::https}) {
      CHECK(url_to_surt(surt_to_url(key, s)) == key);
      auto other = url;
      other.scheme = s;
      CHECK(url_to_surt(other) == key);
    }
    CHECK(SurtKey::parse(key.str()) == key);
    const auto key_text = key.str();
    CHECK(std::count(key_text.begin(), key_text.end(), ')') >= 1);
    for (const auto& label : key.host_segments) CHECK(is_valid_host_label(label));
  }
}

TEST_CASE("property: www fix never empties or touches short hosts") {
  Rng rng(12);
  for (int i = 0; i < 5000; ++i) {
    std::string host = wbtest::random_host(rng);
    if (rng.below(2)) host = "www" + std::string(rng.below(2) ? "" : "7") + "." + host;
    auto out = strip_www_prefix(host);
    CHECK(!out.empty());
    if (std::count(host.begin(), host.end(), '.') < 2) CHECK(out == host);
  }
}

TEST_CASE("property: SURT order groups a domain contiguously") {
  Rng rng(13);
  std::vector<std::pair<std::string, std::string>> keys;  // (key, host)
  std::vector<std::string> hosts;
  for (int h = 0; h < 30; ++h) hosts.push_back(wbtest::random_host(rng));
  for (int i = 0; i < 2000; ++i) {
    const auto& host = hosts[rng.below(hosts.size())];
    auto key = url_to_surt_text("https://" + host + wbtest::random_path(rng));
    keys.emplace_back(key, strip_www_prefix(host));
  }
  std::sort(keys.begin(), keys.end());
  std::set<std::string> closed;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0 && keys[i].second != keys[i - 1].second) {
      closed.insert(keys[i - 1].second);
      CHECK(closed.count(keys[i].second) == 0);
    }
  }
}
