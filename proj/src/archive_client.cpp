#include "wbsample/archive_client.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "wbsample/random.hpp"
#include "wbsample/timemap_ops.hpp"

namespace wbsample {

void CdxQuery::validate() const {
  if (url.empty()) throw std::invalid_argument("query url must not be empty");
  if (limit && *limit == 0) throw std::invalid_argument("limit must be positive");
  if (show_num_pages && (limit || page))
    throw std::invalid_argument("showNumPages cannot be combined with limit or page");
}

std::string CdxQuery::describe() const {
  std::string s = "url=" + url;
  if (limit) s += "&limit=" + std::to_string(*limit);
  if (page) s += "&page=" + std::to_string(*page);
  if (show_num_pages) s += "&showNumPages=true";
  return s;
}

// ---------------------------------------------------------------------------

FetchLogSink::FetchLogSink(const std::filesystem::path& tsv, bool append) {
  if (tsv.has_parent_path()) std::filesystem::create_directories(tsv.parent_path());
  file_ = std::make_unique<std::ofstream>(tsv, append ? std::ios::app : std::ios::trunc);
  if (!*file_) throw std::runtime_error("cannot open fetch log " + tsv.string());
}

std::string FetchLogSink::format(const FetchLog& row) {
  std::ostringstream os;
  os << row.query.describe() << '\t' << row.http_status << '\t' << row.attempt << '\t'
     << row.duration << '\t' << (row.stored_at.empty() ? "-" : row.stored_at) << '\t'
     << (row.error.empty() ? "-" : row.error);
  return os.str();
}

void FetchLogSink::append(const FetchLog& row) {
  std::lock_guard lock(mu_);
  rows_.push_back(row);
  if (file_) {
    *file_ << format(row) << '\n';
    file_->flush();
  }
}

std::vector<FetchLog> FetchLogSink::rows() const {
  std::lock_guard lock(mu_);
  return rows_;
}

std::size_t FetchLogSink::size() const {
  std::lock_guard lock(mu_);
  return rows_.size();
}

// ---------------------------------------------------------------------------

// Keep-alive connections, checked out one per request.
struct ArchiveClient::Endpoint {
  std::string origin;
  std::string path;
  double timeout = 30;
  std::mutex mu;
  std::vector<std::unique_ptr<httplib::Client>> idle;

  std::unique_ptr<httplib::Client> acquire() {
    {
      std::lock_guard lock(mu);
      if (!idle.empty()) {
        auto c = std::move(idle.back());
        idle.pop_back();
        return c;
      }
    }
    auto c = std::make_unique<httplib::Client>(origin);
    c->set_keep_alive(true);
    // Without this, Nagle plus delayed ACK adds ~40 ms to every keep-alive request.
    c->set_tcp_nodelay(true);
    const auto sec = static_cast<time_t>(timeout);
    const auto usec = static_cast<time_t>((timeout - static_cast<double>(sec)) * 1e6);
    c->set_connection_timeout(sec, usec);
    c->set_read_timeout(sec, usec);
    c->set_write_timeout(sec, usec);
    return c;
  }

  void release(std::unique_ptr<httplib::Client> c) {
    std::lock_guard lock(mu);
    idle.push_back(std::move(c));
  }
};

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

struct Permit {
  std::counting_semaphore<1024>& sem;
  explicit Permit(std::counting_semaphore<1024>& s) : sem(s) { sem.acquire(); }
  ~Permit() { sem.release(); }
};

// Splits `http://host:port/path` into origin and path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos || endpoint.compare(0, scheme_end, "http") != 0)
    throw std::invalid_argument("endpoint must be an http:// URL: " + endpoint);
  auto slash = endpoint.find('/', scheme_end + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

}  // namespace

ArchiveClient::ArchiveClient(ClientConfig config, std::shared_ptr<FetchLogSink> log)
    : config_(std::move(config)),
      log_(log ? std::move(log) : std::make_shared<FetchLogSink>()),
      endpoint_(std::make_unique<Endpoint>()),
      permits_(config_.politeness == 0 ? 1 : config_.politeness),
      jitter_state_(splitmix64(config_.seed)) {
  if (config_.politeness == 0 || config_.politeness > 1024)
    throw std::invalid_argument("politeness must be in [1, 1024]");
  if (config_.max_attempts == 0) throw std::invalid_argument("max_attempts must be >= 1");
  if (config_.backoff_base < 0 || config_.inter_request_delay < 0 || config_.timeout <= 0)
    throw std::invalid_argument("delays must be non-negative and timeout positive");
  auto [origin, path] = split_endpoint(config_.endpoint);
  endpoint_->origin = origin;
  endpoint_->path = path;
  endpoint_->timeout = config_.timeout;
  if (!config_.storage_dir.empty()) std::filesystem::create_directories(config_.storage_dir);
}

ArchiveClient::~ArchiveClient() = default;

double ArchiveClient::backoff_delay(int attempt) {
  double u;
  {
    std::lock_guard lock(jitter_mu_);
    jitter_state_ = splitmix64(jitter_state_);
    u = static_cast<double>(jitter_state_ >> 11) * 0x1.0p-53;
  }
  // base * 2^(attempt-1), stretched by up to 25% jitter.
  return config_.backoff_base * std::ldexp(1.0, attempt - 1) * (1.0 + 0.25 * u);
}

std::string ArchiveClient::store_body(const std::string& body) {
  if (config_.storage_dir.empty()) return {};
  const auto path = config_.storage_dir / (sha256_hex(body) + ".cdx");
  if (std::filesystem::exists(path)) return path.string();
  static std::atomic<std::uint64_t> counter{0};
  auto tmp = path;
  tmp += "." + std::to_string(++counter) + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return path.string();
}

std::string ArchiveClient::get(const CdxQuery& query) { return get_raw(query).body; }

ArchiveClient::RawResponse ArchiveClient::get_raw(const CdxQuery& query) {
  query.validate();
  httplib::Params params{{"url", query.url}};
  if (query.limit) params.emplace("limit", std::to_string(*query.limit));
  if (query.page) params.emplace("page", std::to_string(*query.page));
  if (query.show_num_pages) params.emplace("showNumPages", "true");

  int last_status = 0;
  std::string last_error;
  for (unsigned attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    FetchLog row;
    row.query = query;
    row.attempt = static_cast<int>(attempt);
    httplib::Result res{nullptr, httplib::Error::Unknown};
    {
      Permit permit(permits_);
      auto client = endpoint_->acquire();
      const auto t0 = std::chrono::steady_clock::now();
      res = client->Get(endpoint_->path, params, httplib::Headers{});
      row.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      endpoint_->release(std::move(client));
      if (config_.inter_request_delay > 0)
        std::this_thread::sleep_for(std::chrono::duration<double>(config_.inter_request_delay));
    }

    if (!res) {
      row.error = httplib::to_string(res.error());
    } else {
      row.http_status = res->status;
      if (res->status >= 200 && res->status < 300) {
        try {
          row.stored_at = store_body(res->body);
        } catch (const std::exception& e) {
          row.error = e.what();
          log_->append(row);
          throw;
        }
        log_->append(row);
        return {std::move(res->body), row.stored_at};
      }
      row.error = "http " + std::to_string(res->status);
    }
    log_->append(row);
    last_status = row.http_status;
    last_error = row.error;

    const bool transient = !res || res->status >= 500;
    if (!transient)
      throw TransportError(last_status, query.describe() + ": permanent failure (" + last_error +
                                            ")");
    if (attempt < config_.max_attempts)
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff_delay(attempt)));
  }
  throw TransportError(last_status, query.describe() + ": gave up after " +
                                        std::to_string(config_.max_attempts) + " attempts (" +
                                        last_error + ")");
}

std::optional<CdxRecord> ArchiveClient::fetch_first_record(const std::string& url) {
  CdxQuery q{url, 1, std::nullopt, false};
  const auto [body, stored] = get_raw(q);
  std::vector<CdxRecord> records;
  try {
    records = parse_cdx_text(body);
  } catch (const ParseError& e) {
    throw ResponseParseError(stored, url + ": " + e.what());
  }
  if (records.empty()) return std::nullopt;
  return records.front();
}

std::uint64_t ArchiveClient::fetch_page_count(const std::string& url) {
  CdxQuery q{url, std::nullopt, std::nullopt, true};
  const auto [body, stored] = get_raw(q);
  std::string text = body;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  std::size_t start = 0;
  while (start < text.size() && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
  text = text.substr(start);
  if (text.empty() || text.size() > 18 ||
      text.find_first_not_of("0123456789") != std::string::npos)
    throw ResponseParseError(stored, url + ": page count is not a number");
  return std::stoull(text);
}

TimeMap ArchiveClient::fetch_timemap(const std::string& url) {
  const auto n = fetch_page_count(url);
  std::vector<std::vector<CdxRecord>> pages;
  std::vector<std::uint64_t> missing;
  std::string first_problem;
  for (std::uint64_t p = 0; p < n; ++p) {
    try {
      const auto body = get(CdxQuery{url, std::nullopt, p, false});
      try {
        pages.push_back(parse_cdx_text(body));
      } catch (const ParseError& e) {
        missing.push_back(p);
        if (first_problem.empty()) first_problem = e.what();
      }
    } catch (const TransportError& e) {
      missing.push_back(p);
      if (first_problem.empty()) first_problem = e.what();
    }
  }
  if (!missing.empty()) {
    std::string names;
    for (auto p : missing) names += (names.empty() ? "" : ",") + std::to_string(p);
    throw PartialFetchError(missing, merge_pages(pages, url),
                            url + ": missing pages " + names + " (" + first_problem + ")");
  }
  return merge_pages(pages, url);
}

// ---------------------------------------------------------------------------

void run_concurrently(std::size_t n, unsigned workers,
                      const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = 1;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  auto body = [&] {
    while (!failed) {
      const auto i = next++;
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(workers, n);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace wbsample
