#include "wbsample/cdx.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace wbsample {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::uint64_t parse_u64(std::string_view s, std::string_view what, std::size_t line) {
  if (!all_digits(s))
    throw ParseError(line, std::string(what) + " is not a non-negative integer: '" +
                               std::string(s) + "'");
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line, std::string(what) + " out of range: '" + std::string(s) + "'");
  return v;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : days[m - 1];
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    auto j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view strip_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
    line.remove_suffix(1);
  return line;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

int Timestamp14::field(std::size_t pos, std::size_t len) const {
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (digits_[i] - '0');
  return v;
}

Timestamp14 Timestamp14::parse(std::string_view digits, std::size_t line) {
  if (digits.size() != 14 || !all_digits(digits))
    throw ParseError(line, "timestamp must be 14 digits: '" + std::string(digits) + "'");
  Timestamp14 ts{std::string(digits)};
  int m = ts.month(), d = ts.day();
  if (m < 1 || m > 12)
    throw ParseError(line, "invalid month in timestamp '" + std::string(digits) + "'");
  if (d < 1 || d > days_in_month(ts.year(), m))
    throw ParseError(line, "invalid day in timestamp '" + std::string(digits) + "'");
  if (ts.hour() > 23 || ts.minute() > 59 || ts.second() > 59)
    throw ParseError(line, "invalid time of day in timestamp '" + std::string(digits) + "'");
  return ts;
}

bool is_revisit_mime(std::string_view mime) {
  return mime == kRevisitMime || mime.starts_with(kRehydratedMarker);
}

bool CdxRecord::is_rehydrated() const { return mime.starts_with(kRehydratedMarker); }

std::string_view CdxRecord::content_mime() const {
  if (is_rehydrated()) return std::string_view(mime).substr(kRehydratedMarker.size());
  return mime;
}

std::string CdxRecord::str() const {
  std::string out;
  out.reserve(urlkey.size() + original.size() + mime.size() + digest.size() + 48);
  out += urlkey;
  out += ' ';
  out += timestamp.str();
  out += ' ';
  out += original;
  out += ' ';
  out += mime;
  out += ' ';
  out += status;
  out += ' ';
  out += digest;
  out += ' ';
  out += std::to_string(length);
  return out;
}

CdxRecord parse_cdx_line(std::string_view line, std::size_t line_no) {
  auto fields = split_ws(strip_eol(line));
  if (fields.size() != 7)
    throw ParseError(line_no, "expected 7 CDX fields, found " +
                                  std::to_string(fields.size()));
  CdxRecord rec;
  rec.urlkey = std::string(fields[0]);
  rec.timestamp = Timestamp14::parse(fields[1], line_no);
  rec.original = std::string(fields[2]);
  rec.mime = std::string(fields[3]);
  rec.status = std::string(fields[4]);
  rec.digest = std::string(fields[5]);
  rec.length = parse_u64(fields[6], "length", line_no);
  return rec;
}

std::vector<CdxRecord> parse_cdx_text(std::string_view text) {
  std::vector<CdxRecord> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = strip_eol(text.substr(start, end - start));
    if (!split_ws(line).empty()) out.push_back(parse_cdx_line(line, line_no));
    start = end + 1;
  }
  return out;
}

std::string ZipNumEntry::str() const {
  std::string out = urlkey;
  out += ' ';
  out += timestamp.str();
  out += '\t';
  out += part;
  out += '\t';
  out += std::to_string(offset);
  out += '\t';
  out += std::to_string(length);
  out += '\t';
  out += std::to_string(block);
  return out;
}

ZipNumEntry parse_zipnum_line(std::string_view line, std::size_t line_no) {
  line = strip_eol(line);
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() != 5)
    throw ParseError(line_no, "expected 5 tab-separated ZipNum fields, found " +
                                  std::to_string(fields.size()));
  auto key = fields[0];
  auto space = key.rfind(' ');
  if (space == std::string_view::npos || space == 0)
    throw ParseError(line_no, "ZipNum key lacks 'urlkey timestamp' form");
  ZipNumEntry e;
  e.urlkey = std::string(key.substr(0, space));
  e.timestamp = Timestamp14::parse(key.substr(space + 1), line_no);
  if (fields[1].empty()) throw ParseError(line_no, "empty ZipNum part");
  e.part = std::string(fields[1]);
  e.offset = parse_u64(fields[2], "offset", line_no);
  e.length = parse_u64(fields[3], "length", line_no);
  if (e.length == 0) throw ParseError(line_no, "ZipNum length must be positive");
  e.block = parse_u64(fields[4], "block", line_no);
  return e;
}

TimeMap TimeMap::from_records(std::string uri_r, std::vector<CdxRecord> records) {
  for (const auto& r : records) {
    if (r.urlkey != records.front().urlkey)
      throw MixedKeyError("TimeMap mixes urlkeys '" + records.front().urlkey +
                          "' and '" + r.urlkey + "'");
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const CdxRecord& a, const CdxRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  if (uri_r.empty() && !records.empty()) uri_r = records.front().original;
  return TimeMap{std::move(uri_r), std::move(records)};
}

std::string_view TimeMap::urlkey() const {
  return records.empty() ? std::string_view{} : std::string_view(records.front().urlkey);
}

std::string TimeMap::str() const {
  std::string out;
  for (const auto& r : records) {
    out += r.str();
    out += '\n';
  }
  return out;
}

std::string timemap_file_stem(std::string_view urlkey) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : urlkey) {
    bool plain = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ',' ||
                 c == '.' || c == '-' || c == '_';
    if (plain) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xf];
    }
  }
  constexpr std::size_t max_len = 200, keep = 180;
  if (out.size() > max_len) {
    std::size_t cut = keep;
    if (cut >= 1 && out[cut - 1] == '%') cut -= 1;
    else if (cut >= 2 && out[cut - 2] == '%') cut -= 2;
    char buf[17];
    auto h = fnv1a(urlkey);
    for (int i = 15; i >= 0; --i, h >>= 4) buf[i] = hex[h & 0xf];
    buf[16] = '\0';
    out = out.substr(0, cut) + "~" + buf;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TimeMap read_timemap_file(const std::filesystem::path& path) {
  auto text = read_file(path);
  try {
    return TimeMap::from_records({}, parse_cdx_text(text));
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view body) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_timemap_file(const std::filesystem::path& path, const TimeMap& tm) {
  write_file_atomic(path, tm.str());
}

}  // namespace wbsample
