#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wbsample {

enum class Scheme { http, https };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view text);

// An http(s) URL reduced to the parts that matter for archive lookups.
// Ports, userinfo and fragments are dropped; host is lowercase.
struct CanonicalUrl {
  Scheme scheme = Scheme::https;
  std::string host;
  std::string path = "/";
  std::optional<std::string> query;

  std::string str() const;
  bool is_root() const { return path == "/" && !query; }

  friend bool operator==(const CanonicalUrl&, const CanonicalUrl&) = default;
  friend auto operator<=>(const CanonicalUrl&, const CanonicalUrl&) = default;
};

class UrlError : public std::runtime_error {
 public:
  UrlError(std::string component, const std::string& what)
      : std::runtime_error(what), component_(std::move(component)) {}
  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

class SurtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws UrlError naming the offending component (scheme, host, port, ...).
CanonicalUrl parse_url(std::string_view text);
std::optional<CanonicalUrl> try_parse_url(std::string_view text) noexcept;

// Label syntax accepted in hostnames: [a-z0-9_-]+
bool is_valid_host_label(std::string_view label);

// Removes a leading `www` / `www<digits>` label, but only from hosts with at
// least two dots, so `www3288.com` stays distinct from other `www<n>.com`.
std::string strip_www_prefix(std::string_view host);

// Sort-friendly key: reversed host labels, `)`, then path and query.
struct SurtKey {
  std::vector<std::string> host_segments;
  std::string path = "/";
  std::optional<std::string> query;

  std::string str() const;
  std::string host() const;

  // Structural parse of the textual form. A bare `)` suffix becomes `)/`.
  static SurtKey parse(std::string_view text);

  friend bool operator==(const SurtKey&, const SurtKey&) = default;
};

SurtKey url_to_surt(const CanonicalUrl& url);
std::string url_to_surt_text(std::string_view url);

CanonicalUrl surt_to_url(const SurtKey& key, Scheme scheme = Scheme::https);
CanonicalUrl surt_to_url(std::string_view key, Scheme scheme = Scheme::https);

}  // namespace wbsample
