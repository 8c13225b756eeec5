#pragma once

// Fixtures and generators shared by the unit and acceptance tests.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wbsample/cdx.hpp"
#include "wbsample/random.hpp"
#include "wbsample/surt.hpp"

namespace wbtest {

namespace fs = std::filesystem;
using namespace wbsample;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "wbsample-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& body) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  write_file_atomic(p, body);
}

inline std::string random_label(Rng& rng, std::size_t min_len = 1, std::size_t max_len = 10) {
  static constexpr char alpha[] = "abcdefghijklmnopqrstuvwxyz0123456789-_";
  const auto len = min_len + rng.below(max_len - min_len + 1);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alpha[rng.below(26 + (i ? 12 : 10))];
  return s;
}

inline std::string random_host(Rng& rng) {
  std::string host;
  const auto labels = 2 + rng.below(3);
  for (std::size_t i = 0; i < labels; ++i) {
    if (i) host += '.';
    host += random_label(rng, 1, 8);
  }
  return host;
}

inline std::string random_path(Rng& rng) {
  static constexpr char chars[] = "abcdefgXYZ0123456789-_.~%/=;";
  std::string p = "/";
  const auto len = rng.below(20);
  for (std::size_t i = 0; i < len; ++i) p += chars[rng.below(sizeof(chars) - 1)];
  return p;
}

// Random URL with optional www prefix, port, query and fragment.
inline std::string random_url_text(Rng& rng) {
  std::string url = rng.below(2) ? "https://" : "http://";
  if (rng.below(4) == 0) url += rng.below(2) ? "www." : "www" + std::to_string(rng.below(10)) + ".";
  url += random_host(rng);
  if (rng.below(5) == 0) url += ":" + std::to_string(rng.below(65536));
  url += random_path(rng);
  if (rng.below(3) == 0) url += "?a=" + random_label(rng) + "&b=" + random_label(rng);
  if (rng.below(6) == 0) url += "#frag";
  return url;
}

inline CdxRecord make_record(std::string urlkey, const std::string& ts, std::string original,
                             std::string mime, std::string status, std::string digest,
                             std::uint64_t length = 1000) {
  return {std::move(urlkey),   Timestamp14::parse(ts), std::move(original), std::move(mime),
          std::move(status),   std::move(digest),      length};
}

// 14-digit timestamp for (year, ordinal) spread through the year.
inline std::string timestamp_for(int year, std::uint64_t ordinal) {
  char buf[32];
  const int month = 1 + static_cast<int>(ordinal % 12);
  const int day = 1 + static_cast<int>((ordinal / 12) % 28);
  const int hour = static_cast<int>((ordinal / 336) % 24);
  const int minute = static_cast<int>((ordinal / 8064) % 60);
  const int second = static_cast<int>(ordinal % 60);
  std::snprintf(buf, sizeof buf, "%04d%02d%02d%02d%02d%02d", year, month, day, hour, minute,
                second);
  return buf;
}

inline std::string digest_for(std::uint64_t n) {
  static constexpr char b32[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";
  std::string d;
  auto x = splitmix64(n);
  for (int i = 0; i < 32; ++i) {
    d += b32[x & 31];
    x = (i % 12 == 11) ? splitmix64(x) : x >> 5;
  }
  return d;
}

// A TimeMap of `rows` captures where each revisit points back at most
// `max_gap` rows to a full record with the same digest.
inline TimeMap random_timemap(Rng& rng, std::size_t rows, std::size_t max_gap,
                              double revisit_share = 0.4) {
  TimeMap tm;
  tm.uri_r = "https://example.com/";
  std::vector<std::size_t> full_rows;
  std::uint64_t next_digest = rng.next();
  for (std::size_t i = 0; i < rows; ++i) {
    const auto ts = timestamp_for(2000 + static_cast<int>(i / 4000), i);
    bool revisit = rng.unit() < revisit_share;
    std::size_t src = 0;
    if (revisit) {
      // Any full record inside the gap window, uniformly.
      auto lo = std::lower_bound(full_rows.begin(), full_rows.end(),
                                 i >= max_gap ? i - max_gap : 0);
      if (lo == full_rows.end()) {
        revisit = false;
      } else {
        src = *(lo + static_cast<std::ptrdiff_t>(rng.below(
                         static_cast<std::uint64_t>(full_rows.end() - lo))));
      }
    }
    if (revisit) {
      tm.records.push_back(make_record("com,example)/", ts, tm.uri_r, "warc/revisit", "-",
                                       tm.records[src].digest, 300));
      continue;
    }
    // Some full records reuse a recent digest; some are redirects.
    std::string digest = digest_for(next_digest++);
    if (!full_rows.empty() && rng.below(5) == 0) {
      auto back = full_rows[full_rows.size() - 1 - rng.below(std::min<std::size_t>(
                                                        full_rows.size(), 3))];
      digest = tm.records[back].digest;
    }
    const char* status = rng.below(10) == 0 ? "302" : "200";
    tm.records.push_back(
        make_record("com,example)/", ts, tm.uri_r, rng.below(8) ? "text/html" : "text/plain",
                    status, digest, 1000 + rng.below(5000)));
    full_rows.push_back(i);
  }
  return tm;
}

// Reference rehydration with an unbounded map and no eviction.
inline TimeMap oracle_rehydrate(const TimeMap& tm) {
  std::map<std::string, CdxRecord> last;
  TimeMap out = tm;
  for (auto& r : out.records) {
    const bool revisit = r.status == "-" && r.mime == "warc/revisit";
    const bool done = r.mime.rfind("warc/revisit;orig=", 0) == 0;
    if (revisit) {
      auto it = last.find(r.digest);
      if (it != last.end()) {
        r.status = it->second.status;
        r.mime = "warc/revisit;orig=" + it->second.mime;
      }
    } else if (r.status != "-" && !done) {
      last[r.digest] = r;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic archive used by the end-to-end runs.

struct SyntheticArchive {
  std::vector<CdxRecord> records;      // what the mock serves
  std::vector<std::string> index_urls;  // what the secondary index exposes
};

// Per year, domains with Zipf-like URL counts (top domain `top` URLs, rank r
// gets top/r). Every URL gets at least one capture in its first year; some get
// later captures and revisits. Noise rows cover invalid, non-HTML, alias and
// pre-1996 cases.
inline SyntheticArchive make_synthetic_archive(std::uint64_t seed, int first_year = 1996,
                                               int last_year = 2021, int domains_per_year = 24,
                                               std::uint64_t top = 250) {
  Rng rng(seed);
  SyntheticArchive a;
  std::uint64_t ordinal = 0, digest_no = seed * 1000003;
  auto add_url = [&](const std::string& url, int year, const std::string& mime, int extra) {
    const auto key = url_to_surt_text(url);
    const auto d0 = digest_for(digest_no++);
    a.records.push_back(
        make_record(key, timestamp_for(year, ordinal++), url, mime, "200", d0, 2000));
    for (int e = 0; e < extra; ++e) {
      const int y = std::min(2023, year + 1 + e);
      if (rng.below(3) == 0) {
        a.records.push_back(
            make_record(key, timestamp_for(y, ordinal++), url, "warc/revisit", "-", d0, 400));
      } else {
        a.records.push_back(make_record(key, timestamp_for(y, ordinal++), url, mime,
                                        rng.below(6) ? "200" : "301", digest_for(digest_no++),
                                        2100));
      }
    }
  };
  static const char* exts[] = {"", ".html", ".htm", ".php", ".asp", ".aspx", ".cfm", ".jsp", ".shtml"};
  for (int year = first_year; year <= last_year; ++year) {
    for (int r = 1; r <= domains_per_year; ++r) {
      const std::string host =
          (rng.below(3) == 0 ? "www." : "") + random_label(rng, 4, 9) + std::to_string(year) +
          "r" + std::to_string(r) + (rng.below(2) ? ".com" : ".org");
      const auto n = std::max<std::uint64_t>(1, top / static_cast<std::uint64_t>(r));
      const bool with_root = rng.below(2) == 0;
      for (std::uint64_t i = 0; i < n; ++i) {
        std::string url;
        if (i == 0 && with_root) {
          url = "https://" + host + "/";
        } else {
          url = "https://" + host + "/p" + std::to_string(i) + "/page" + std::to_string(i) +
                exts[rng.below(std::size(exts))];
        }
        // A small share of likely-HTML URLs turn out not to be HTML.
        const char* mime = rng.below(25) == 0 ? "text/plain" : "text/html";
        add_url(url, year, mime, static_cast<int>(rng.below(3)));
        a.index_urls.push_back(url);
      }
      // Roots of deep-link-only hosts are archived too (upsampling finds them).
      if (!with_root) add_url("https://" + host + "/", year, "text/html", 0);
    }
  }
  // Noise the filters must reject or the sampler must drop.
  for (int i = 0; i < 40; ++i) {
    const auto host = random_label(rng, 5, 8) + "-noise" + std::to_string(i) + ".net";
    a.index_urls.push_back("https://" + host + "/img/photo" + std::to_string(i) + ".jpg");
    add_url("https://" + host + "/img/photo" + std::to_string(i) + ".jpg", 2010, "image/jpeg", 0);
    a.index_urls.push_back("https://" + host + "/index.html;jsessionid=" +
                           std::string(32, static_cast<char>('a' + i % 26)));
    a.index_urls.push_back("https://" + host + "/index.html");
    a.index_urls.push_back("https://*/robots.txt");
    a.index_urls.push_back("https:///?dn=" + host);
    a.index_urls.push_back("https://" + host + "/search*");
  }
  for (int i = 0; i < 5; ++i)
    a.index_urls.push_back("https://ghost" + std::to_string(i) + ".org/never/archived.html");
  for (int i = 0; i < 10; ++i) {
    const auto url = "https://early" + std::to_string(i) + ".be/";
    a.index_urls.push_back(url);
    add_url(url, 1979, "text/html", 1);
  }
  return a;
}

}  // namespace wbtest
