#include "wbsample/url_filter.hpp"

#include <algorithm>
#include <cctype>

namespace wbsample {

namespace {

bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool ascii_alnum(char c) { return ascii_alpha(c) || (c >= '0' && c <= '9'); }

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool iequals_at(std::string_view text, std::size_t pos, std::string_view lit) {
  if (pos + lit.size() > text.size()) return false;
  for (std::size_t i = 0; i < lit.size(); ++i)
    if (lower(text[pos + i]) != lit[i]) return false;
  return true;
}

std::size_t count_run(std::string_view text, std::size_t pos, bool (*pred)(char)) {
  std::size_t n = 0;
  while (pos + n < text.size() && pred(text[pos + n])) ++n;
  return n;
}

// Returns the end of the token starting at `pos`, or npos.
using TokenMatcher = std::size_t (*)(std::string_view, std::size_t);

std::size_t exact_run_after(std::string_view text, std::size_t pos, std::string_view lit,
                            std::size_t run, bool (*pred)(char)) {
  if (!iequals_at(text, pos, lit)) return std::string_view::npos;
  auto start = pos + lit.size();
  if (start + run > text.size()) return std::string_view::npos;
  for (std::size_t i = 0; i < run; ++i)
    if (!pred(text[start + i])) return std::string_view::npos;
  return start + run;
}

std::size_t match_jsessionid(std::string_view t, std::size_t p) {
  return exact_run_after(t, p, "jsessionid=", 32, ascii_alnum);
}
std::size_t match_phpsessid(std::string_view t, std::size_t p) {
  return exact_run_after(t, p, "phpsessid=", 32, ascii_alnum);
}
std::size_t match_sid(std::string_view t, std::size_t p) {
  return exact_run_after(t, p, "sid=", 32, ascii_alnum);
}
std::size_t match_aspsession(std::string_view t, std::size_t p) {
  auto mid = exact_run_after(t, p, "aspsessionid", 8, ascii_alpha);
  if (mid == std::string_view::npos || mid >= t.size() || t[mid] != '=')
    return std::string_view::npos;
  auto start = mid + 1;
  if (start + 24 > t.size()) return std::string_view::npos;
  for (std::size_t i = 0; i < 24; ++i)
    if (!ascii_alpha(t[start + i])) return std::string_view::npos;
  return start + 24;
}
std::size_t match_cfid(std::string_view t, std::size_t p) {
  if (!iequals_at(t, p, "cfid=")) return std::string_view::npos;
  auto not_amp = [](char c) { return c != '&'; };
  auto v1 = p + 5;
  auto n1 = count_run(t, v1, +not_amp);
  if (n1 == 0) return std::string_view::npos;
  auto q = v1 + n1;
  if (!iequals_at(t, q, "&cftoken=")) return std::string_view::npos;
  auto v2 = q + 9;
  auto n2 = count_run(t, v2, +not_amp);
  if (n2 == 0) return std::string_view::npos;
  return v2 + n2;
}

constexpr TokenMatcher kSessionMatchers[] = {
    match_jsessionid, match_phpsessid, match_sid, match_aspsession, match_cfid,
};

// Mirrors `^(.*)(?:TOKEN)(?:&(.*))?$`: the greedy prefix picks the rightmost
// start whose token is followed by end-of-string or `&`.
bool strip_once(std::string& url, TokenMatcher match) {
  for (std::size_t p = url.size(); p-- > 0;) {
    auto end = match(url, p);
    if (end == std::string_view::npos) continue;
    if (end == url.size()) {
      url.erase(p);
      while (!url.empty() && (url.back() == '&' || url.back() == '?' || url.back() == ';'))
        url.pop_back();
      return true;
    }
    if (url[end] == '&') {
      url.erase(p, end + 1 - p);
      return true;
    }
  }
  return false;
}

std::string_view last_segment(const CanonicalUrl& url) {
  std::string_view path = url.path;
  auto slash = path.rfind('/');
  return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

}  // namespace

std::string_view to_string(Heuristic h) {
  switch (h) {
    case Heuristic::TrailingSlashNoExt: return "trailing-slash";
    case Heuristic::Do: return ".do";
    case Heuristic::PhpN: return ".php[0-9]";
    case Heuristic::Aspx: return ".aspx";
    case Heuristic::Cgi: return ".cgi";
    case Heuristic::Pl: return ".pl";
    case Heuristic::Asp: return ".asp";
    case Heuristic::Jsp: return ".jsp";
    case Heuristic::Cfm: return ".cfm";
    case Heuristic::XHtmlFamily: return ".[a-z]html";
    case Heuristic::Htm: return ".htm";
  }
  return "?";
}

std::optional<Heuristic> parse_heuristic(std::string_view name) {
  for (auto h : kAllHeuristics)
    if (to_string(h) == name) return h;
  return std::nullopt;
}

bool is_valid_url(std::string_view url) {
  return !detect_wildcard(url) && try_parse_url(url).has_value();
}

std::optional<Heuristic> classify_likely_html(const CanonicalUrl& url) {
  auto seg = last_segment(url);
  auto dot = seg.rfind('.');
  if (seg.empty() || dot == std::string_view::npos) return Heuristic::TrailingSlashNoExt;
  auto ext = to_lower(seg.substr(dot + 1));
  if (ext == "do") return Heuristic::Do;
  if (ext == "php" || (ext.size() == 4 && ext.starts_with("php") && ext[3] >= '0' &&
                       ext[3] <= '9'))
    return Heuristic::PhpN;
  if (ext == "aspx") return Heuristic::Aspx;
  if (ext == "cgi") return Heuristic::Cgi;
  if (ext == "pl") return Heuristic::Pl;
  if (ext == "asp") return Heuristic::Asp;
  if (ext == "jsp") return Heuristic::Jsp;
  if (ext == "cfm") return Heuristic::Cfm;
  if (ext == "html" || (ext.size() == 5 && ascii_alpha(ext[0]) && ext.ends_with("html")))
    return Heuristic::XHtmlFamily;
  if (ext == "htm") return Heuristic::Htm;
  return std::nullopt;
}

SessionAlias detect_session_alias(std::string_view url) {
  SessionAlias out{false, std::string(url)};
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto m : kSessionMatchers) {
      if (strip_once(out.stripped, m)) {
        out.matched = true;
        changed = true;
      }
    }
  }
  return out;
}

bool detect_index_alias(const CanonicalUrl& url) {
  auto seg = last_segment(url);
  if (seg.size() < 7 || !iequals_at(seg, 0, "index.")) return false;
  return std::all_of(seg.begin() + 6, seg.end(), ascii_alpha);
}

bool detect_wildcard(std::string_view url) {
  while (!url.empty() && (url.back() == '\n' || url.back() == '\r')) url.remove_suffix(1);
  return !url.empty() && url.back() == '*';
}

CanonicalUrl trim_to_root(const CanonicalUrl& url) {
  return CanonicalUrl{url.scheme, url.host, "/", std::nullopt};
}

FilterVerdict evaluate_url(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  FilterVerdict v;
  v.input = std::string(text);
  v.wildcard = detect_wildcard(text);
  v.url = try_parse_url(text);
  v.valid = v.url.has_value() && !v.wildcard;
  v.session_alias = detect_session_alias(text).matched;
  if (v.url) v.index_alias = detect_index_alias(*v.url);
  if (v.valid) v.likely_html = classify_likely_html(*v.url);
  return v;
}

std::string format_verdict(const FilterVerdict& v) {
  std::string out = v.input;
  out += v.valid ? "\t1\t" : "\t0\t";
  out += v.likely_html ? std::string(to_string(*v.likely_html)) : "-";
  out += '\t';
  std::string flags;
  auto add = [&](bool on, std::string_view name) {
    if (!on) return;
    if (!flags.empty()) flags += ',';
    flags += name;
  };
  add(v.session_alias, "session");
  add(v.index_alias, "index");
  add(v.wildcard, "wildcard");
  out += flags.empty() ? "-" : flags;
  return out;
}

FilterVerdict parse_verdict_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  auto t3 = line.rfind('\t');
  auto t2 = t3 == std::string_view::npos ? t3 : line.rfind('\t', t3 - 1);
  auto t1 = t2 == std::string_view::npos || t2 == 0 ? std::string_view::npos
                                                    : line.rfind('\t', t2 - 1);
  if (t1 == std::string_view::npos)
    throw std::runtime_error("malformed verdict line: '" + std::string(line) + "'");
  FilterVerdict v;
  v.input = std::string(line.substr(0, t1));
  auto valid = line.substr(t1 + 1, t2 - t1 - 1);
  auto heur = line.substr(t2 + 1, t3 - t2 - 1);
  auto flags = line.substr(t3 + 1);
  v.valid = valid == "1";
  if (heur != "-") {
    v.likely_html = parse_heuristic(heur);
    if (!v.likely_html)
      throw std::runtime_error("unknown heuristic '" + std::string(heur) + "'");
  }
  v.session_alias = flags.find("session") != std::string_view::npos;
  v.index_alias = flags.find("index") != std::string_view::npos;
  v.wildcard = flags.find("wildcard") != std::string_view::npos;
  v.url = try_parse_url(v.input);
  return v;
}

}  // namespace wbsample
