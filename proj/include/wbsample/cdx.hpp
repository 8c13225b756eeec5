#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wbsample {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  // Same line, message prefixed with where the input came from.
  ParseError(const std::string& source, const ParseError& inner)
      : std::runtime_error(source + ": " + inner.what()), line_(inner.line_) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// 14-digit archive datetime, YYYYMMDDhhmmss. Ordering is the ordering of the
// digit string, which is also chronological order.
class Timestamp14 {
 public:
  Timestamp14() = default;
  static Timestamp14 parse(std::string_view digits, std::size_t line = 0);

  const std::string& str() const { return digits_; }
  int year() const { return field(0, 4); }
  int month() const { return field(4, 2); }
  int day() const { return field(6, 2); }
  int hour() const { return field(8, 2); }
  int minute() const { return field(10, 2); }
  int second() const { return field(12, 2); }

  friend bool operator==(const Timestamp14&, const Timestamp14&) = default;
  friend auto operator<=>(const Timestamp14&, const Timestamp14&) = default;

 private:
  explicit Timestamp14(std::string digits) : digits_(std::move(digits)) {}
  int field(std::size_t pos, std::size_t len) const;

  std::string digits_ = "00000000000000";
};

inline constexpr std::string_view kRevisitMime = "warc/revisit";
inline constexpr std::string_view kRehydratedMarker = "warc/revisit;orig=";

bool is_revisit_mime(std::string_view mime);

// One capture line: urlkey timestamp original mime status digest length.
// urlkey is kept verbatim so malformed keys from real indexes survive parsing.
struct CdxRecord {
  std::string urlkey;
  Timestamp14 timestamp;
  std::string original;
  std::string mime;
  std::string status;
  std::string digest;
  std::uint64_t length = 0;

  // Status placeholder `-`: the row has no status of its own.
  bool missing_status() const { return status == "-"; }
  bool is_revisit() const { return missing_status() && mime == kRevisitMime; }
  // `-` status on a non-revisit row is carried through but worth reporting.
  bool is_flagged() const { return missing_status() && !is_revisit_mime(mime); }
  bool is_rehydrated() const;
  // MIME of the content: the source MIME for rehydrated revisits.
  std::string_view content_mime() const;

  std::string str() const;

  friend bool operator==(const CdxRecord&, const CdxRecord&) = default;
};

CdxRecord parse_cdx_line(std::string_view line, std::size_t line_no = 0);

// Parses every non-blank line; line numbers in errors are 1-based.
std::vector<CdxRecord> parse_cdx_text(std::string_view text);

// Secondary index line: `urlkey timestamp\tpart\toffset\tlength\tblock`.
struct ZipNumEntry {
  std::string urlkey;
  Timestamp14 timestamp;
  std::string part;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::uint64_t block = 0;

  std::string str() const;
  friend bool operator==(const ZipNumEntry&, const ZipNumEntry&) = default;
};

ZipNumEntry parse_zipnum_line(std::string_view line, std::size_t line_no = 0);

class MixedKeyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Capture history of one original resource, ordered by timestamp.
struct TimeMap {
  std::string uri_r;
  std::vector<CdxRecord> records;

  // Stable-sorts by timestamp; throws MixedKeyError if urlkeys differ.
  static TimeMap from_records(std::string uri_r, std::vector<CdxRecord> records);

  bool empty() const { return records.empty(); }
  std::string_view urlkey() const;
  std::string str() const;
};

// Filesystem-safe, case-insensitive-safe file stem for a urlkey.
std::string timemap_file_stem(std::string_view urlkey);

TimeMap read_timemap_file(const std::filesystem::path& path);
// Writes through a temporary file and renames, so partial files never appear.
void write_timemap_file(const std::filesystem::path& path, const TimeMap& tm);
void write_file_atomic(const std::filesystem::path& path, std::string_view body);
std::string read_file(const std::filesystem::path& path);

}  // namespace wbsample
