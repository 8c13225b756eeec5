#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "wbsample/surt.hpp"

namespace wbsample {

// Extension-based heuristics for spotting HTML pages.
enum class Heuristic {
  TrailingSlashNoExt,
  Do,
  PhpN,
  Aspx,
  Cgi,
  Pl,
  Asp,
  Jsp,
  Cfm,
  XHtmlFamily,
  Htm,
};

inline constexpr std::array kAllHeuristics = {
    Heuristic::TrailingSlashNoExt, Heuristic::Do,   Heuristic::PhpN,
    Heuristic::Aspx,               Heuristic::Cgi,  Heuristic::Pl,
    Heuristic::Asp,                Heuristic::Jsp,  Heuristic::Cfm,
    Heuristic::XHtmlFamily,        Heuristic::Htm,
};

std::string_view to_string(Heuristic h);
std::optional<Heuristic> parse_heuristic(std::string_view name);

bool is_valid_url(std::string_view url);

// Looks only at the final path segment; the query string is ignored.
std::optional<Heuristic> classify_likely_html(const CanonicalUrl& url);

struct SessionAlias {
  bool matched = false;
  std::string stripped;
};

// Session-ID tokens (jsessionid, phpsessid, sid, ASPSESSIONID, cfid+cftoken),
// matched case-insensitively anywhere in the URL text. Stripping repeats
// until no token remains.
SessionAlias detect_session_alias(std::string_view url);

// Final path segment is `index.<letters>`.
bool detect_index_alias(const CanonicalUrl& url);

// Unencoded trailing `*`, which the CDX server treats as a prefix wildcard.
bool detect_wildcard(std::string_view url);

CanonicalUrl trim_to_root(const CanonicalUrl& url);

struct FilterVerdict {
  std::string input;
  std::optional<CanonicalUrl> url;
  bool valid = false;
  std::optional<Heuristic> likely_html;
  bool session_alias = false;
  bool index_alias = false;
  bool wildcard = false;

  // Valid, likely HTML, and not an alias of another URL.
  bool keep() const { return valid && likely_html && !session_alias && !index_alias; }
};

FilterVerdict evaluate_url(std::string_view url);

// `url \t valid \t heuristic-or-- \t flags-or--`
std::string format_verdict(const FilterVerdict& v);
FilterVerdict parse_verdict_line(std::string_view line);

}  // namespace wbsample
