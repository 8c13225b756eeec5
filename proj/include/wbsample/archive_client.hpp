#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbsample/cdx.hpp"

namespace wbsample {

struct CdxQuery {
  std::string url;
  std::optional<std::uint64_t> limit;
  std::optional<std::uint64_t> page;
  bool show_num_pages = false;

  void validate() const;
  // `url=...&limit=...` in a fixed parameter order (unencoded).
  std::string describe() const;
};

struct FetchLog {
  CdxQuery query;
  int http_status = 0;  // 0 when no response arrived
  int attempt = 1;
  double duration = 0;  // seconds
  std::string stored_at;
  std::string error;
};

// Thread-safe collector; optionally mirrors each row to a TSV file.
class FetchLogSink {
 public:
  FetchLogSink() = default;
  explicit FetchLogSink(const std::filesystem::path& tsv, bool append = true);

  void append(const FetchLog& row);
  std::vector<FetchLog> rows() const;
  std::size_t size() const;

  static std::string format(const FetchLog& row);

 private:
  mutable std::mutex mu_;
  std::vector<FetchLog> rows_;
  std::unique_ptr<std::ofstream> file_;
};

struct ClientConfig {
  std::string endpoint = "http://127.0.0.1:8080/cdx";
  unsigned politeness = 4;         // concurrent requests in flight
  double inter_request_delay = 0;  // seconds a permit is held after each request
  unsigned max_attempts = 5;
  double backoff_base = 1.0;       // seconds; doubles per retry, plus jitter
  double timeout = 30;             // seconds
  std::filesystem::path storage_dir;  // raw bodies, content-addressed; empty = off
  std::uint64_t seed = 0;          // jitter stream
};

// Non-2xx after all retries, 4xx, or no response.
class TransportError : public std::runtime_error {
 public:
  TransportError(int status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class ResponseParseError : public std::runtime_error {
 public:
  ResponseParseError(std::string raw_body_path, const std::string& what)
      : std::runtime_error(what), raw_body_path_(std::move(raw_body_path)) {}
  const std::string& raw_body_path() const { return raw_body_path_; }

 private:
  std::string raw_body_path_;
};

class PartialFetchError : public std::runtime_error {
 public:
  PartialFetchError(std::vector<std::uint64_t> missing, TimeMap partial,
                    const std::string& what)
      : std::runtime_error(what), missing_(std::move(missing)), partial_(std::move(partial)) {}
  const std::vector<std::uint64_t>& missing_pages() const { return missing_; }
  const TimeMap& partial() const { return partial_; }

 private:
  std::vector<std::uint64_t> missing_;
  TimeMap partial_;
};

// CDX API client. Safe for concurrent use; every HTTP attempt is logged.
class ArchiveClient {
 public:
  explicit ArchiveClient(ClientConfig config, std::shared_ptr<FetchLogSink> log = nullptr);
  ~ArchiveClient();

  ArchiveClient(const ArchiveClient&) = delete;
  ArchiveClient& operator=(const ArchiveClient&) = delete;

  std::optional<CdxRecord> fetch_first_record(const std::string& url);
  std::uint64_t fetch_page_count(const std::string& url);
  TimeMap fetch_timemap(const std::string& url);

  // Body of a successful response, after retries.
  std::string get(const CdxQuery& query);

  const ClientConfig& config() const { return config_; }
  FetchLogSink& log() { return *log_; }

 private:
  struct Endpoint;
  struct RawResponse {
    std::string body;
    std::string stored_at;
  };
  RawResponse get_raw(const CdxQuery& query);
  std::string store_body(const std::string& body);
  double backoff_delay(int attempt);

  ClientConfig config_;
  std::shared_ptr<FetchLogSink> log_;
  std::unique_ptr<Endpoint> endpoint_;
  std::counting_semaphore<1024> permits_;
  std::mutex jitter_mu_;
  std::uint64_t jitter_state_;
};

// Runs fn(i) for i in [0, n) on `workers` threads. The first exception is
// rethrown after all workers finish.
void run_concurrently(std::size_t n, unsigned workers,
                      const std::function<void(std::size_t)>& fn);

}  // namespace wbsample
