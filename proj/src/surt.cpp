#include "wbsample/surt.hpp"

#include <algorithm>
#include <cctype>

namespace wbsample {

namespace {

char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

bool is_space_or_control(char c) {
  auto u = static_cast<unsigned char>(c);
  return u <= 0x20 || u == 0x7f;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

void check_host(std::string_view host) {
  if (host.empty()) throw UrlError("host", "empty host");
  if (host.find('*') != std::string_view::npos)
    throw UrlError("host", "wildcard in host '" + std::string(host) + "'");
  for (auto label : split(host, '.')) {
    if (!is_valid_host_label(label))
      throw UrlError("host", "invalid host label '" + std::string(label) +
                                 "' in '" + std::string(host) + "'");
  }
}

bool www_label(std::string_view label) {
  if (label.size() < 3 || label.substr(0, 3) != "www") return false;
  return std::all_of(label.begin() + 3, label.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

void split_path_query(std::string_view rest, std::string& path,
                      std::optional<std::string>& query) {
  auto q = rest.find('?');
  if (q == std::string_view::npos) {
    path = std::string(rest);
    query.reset();
  } else {
    path = std::string(rest.substr(0, q));
    query = std::string(rest.substr(q + 1));
  }
  if (path.empty()) path = "/";
}

}  // namespace

std::string_view to_string(Scheme s) {
  return s == Scheme::http ? "http" : "https";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
  auto s = to_lower(text);
  if (s == "http") return Scheme::http;
  if (s == "https") return Scheme::https;
  return std::nullopt;
}

std::string CanonicalUrl::str() const {
  std::string out(to_string(scheme));
  out += "://";
  out += host;
  out += path;
  if (query) {
    out += '?';
    out += *query;
  }
  return out;
}

bool is_valid_host_label(std::string_view label) {
  if (label.empty()) return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_';
  });
}

CanonicalUrl parse_url(std::string_view text) {
  while (!text.empty() && is_space_or_control(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space_or_control(text.back())) text.remove_suffix(1);
  if (std::any_of(text.begin(), text.end(), is_space_or_control))
    throw UrlError("url", "embedded whitespace or control character");

  auto sep = text.find("://");
  if (sep == std::string_view::npos) throw UrlError("scheme", "missing '://'");
  auto scheme = parse_scheme(text.substr(0, sep));
  if (!scheme)
    throw UrlError("scheme",
                   "unsupported scheme '" + std::string(text.substr(0, sep)) + "'");

  CanonicalUrl url;
  url.scheme = *scheme;
  auto rest = text.substr(sep + 3);
  if (auto hash = rest.find('#'); hash != std::string_view::npos)
    rest = rest.substr(0, hash);

  auto auth_end = rest.find_first_of("/?");
  auto authority = rest.substr(0, auth_end);
  rest = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);

  if (auto at = authority.rfind('@'); at != std::string_view::npos)
    authority = authority.substr(at + 1);
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    auto port = authority.substr(colon + 1);
    if (!std::all_of(port.begin(), port.end(),
                     [](char c) { return c >= '0' && c <= '9'; }))
      throw UrlError("port", "non-numeric port '" + std::string(port) + "'");
    authority = authority.substr(0, colon);
  }
  std::string host = to_lower(authority);
  if (host.size() > 1 && host.back() == '.') host.pop_back();
  check_host(host);
  url.host = std::move(host);

  split_path_query(rest, url.path, url.query);
  if (url.path.front() != '/') url.path.insert(url.path.begin(), '/');
  return url;
}

std::optional<CanonicalUrl> try_parse_url(std::string_view text) noexcept {
  try {
    return parse_url(text);
  } catch (...) {
    return std::nullopt;
  }
}

std::string strip_www_prefix(std::string_view host) {
  if (std::count(host.begin(), host.end(), '.') < 2) return std::string(host);
  auto dot = host.find('.');
  if (!www_label(host.substr(0, dot))) return std::string(host);
  return std::string(host.substr(dot + 1));
}

std::string SurtKey::str() const {
  std::string out;
  for (std::size_t i = 0; i < host_segments.size(); ++i) {
    if (i) out += ',';
    out += host_segments[i];
  }
  out += ')';
  out += path;
  if (query) {
    out += '?';
    out += *query;
  }
  return out;
}

std::string SurtKey::host() const {
  std::string out;
  for (auto it = host_segments.rbegin(); it != host_segments.rend(); ++it) {
    if (!out.empty()) out += '.';
    out += *it;
  }
  return out;
}

SurtKey SurtKey::parse(std::string_view text) {
  auto close = text.find(')');
  if (close == std::string_view::npos)
    throw SurtError("malformed SURT '" + std::string(text) +
                    "': missing ')' separator");
  SurtKey key;
  for (auto label : split(text.substr(0, close), ',')) {
    if (!is_valid_host_label(label))
      throw SurtError("malformed SURT '" + std::string(text) +
                      "': invalid host label '" + std::string(label) + "'");
    key.host_segments.emplace_back(label);
  }
  auto rest = text.substr(close + 1);
  if (!rest.empty() && rest.front() != '/' && rest.front() != '?')
    throw SurtError("malformed SURT '" + std::string(text) +
                    "': path must start with '/'");
  split_path_query(rest, key.path, key.query);
  if (key.path.front() != '/') key.path.insert(key.path.begin(), '/');
  return key;
}

SurtKey url_to_surt(const CanonicalUrl& url) {
  std::string host = strip_www_prefix(url.host);
  SurtKey key;
  auto labels = split(host, '.');
  for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
    if (!is_valid_host_label(*it))
      throw SurtError("cannot convert host '" + url.host + "': invalid label '" +
                      std::string(*it) + "'");
    key.host_segments.emplace_back(*it);
  }
  key.path = url.path.empty() ? "/" : url.path;
  key.query = url.query;
  return key;
}

std::string url_to_surt_text(std::string_view url) {
  return url_to_surt(parse_url(url)).str();
}

CanonicalUrl surt_to_url(const SurtKey& key, Scheme scheme) {
  if (key.host_segments.empty()) throw SurtError("SURT has no host labels");
  CanonicalUrl url;
  url.scheme = scheme;
  url.host = key.host();
  url.path = key.path;
  url.query = key.query;
  return url;
}

CanonicalUrl surt_to_url(std::string_view key, Scheme scheme) {
  return surt_to_url(SurtKey::parse(key), scheme);
}

}  // namespace wbsample
