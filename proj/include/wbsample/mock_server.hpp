#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "wbsample/cdx.hpp"

namespace httplib {
class Server;
}

namespace wbsample {

enum class QueryKind { first, num_pages, page, listing };

// Deterministic stand-in for a CDX server: answers `url`, `limit`, `page` and
// `showNumPages` over an in-memory corpus, with scripted faults and delays.
class MockCdxServer {
 public:
  MockCdxServer(std::vector<CdxRecord> corpus, std::size_t page_size);
  ~MockCdxServer();

  MockCdxServer(const MockCdxServer&) = delete;
  MockCdxServer& operator=(const MockCdxServer&) = delete;

  // Binds 127.0.0.1 (port 0 = any free port) and serves on a background thread.
  void start(int port = 0);
  void stop();
  // Blocks in the calling thread until stop() is called elsewhere. on_bound
  // receives the bound port (useful with port 0).
  void serve_forever(const std::string& host, int port,
                     const std::function<void(int)>& on_bound = {});

  int port() const { return port_; }
  std::string endpoint() const;

  // The next requests matching (url, kind, page) answer with these statuses
  // before succeeding. An empty url matches any URL; page -1 matches any page.
  void script_faults(const std::string& url, QueryKind kind, std::int64_t page,
                     std::vector<int> statuses);
  // Statuses returned to the next requests of any kind.
  void fail_next(std::vector<int> statuses);
  void set_delay_ms(int ms) { delay_ms_ = ms; }

  std::size_t page_size() const { return page_size_; }
  std::size_t request_count() const { return requests_; }
  int max_in_flight() const { return max_in_flight_; }
  void reset_counters();

  // Records served for a query URL, in corpus order.
  std::vector<CdxRecord> listing(const std::string& url) const;

 private:
  struct Fault {
    std::string url;
    QueryKind kind;
    std::int64_t page;
    std::deque<int> statuses;
  };

  void install_routes();
  std::pair<std::size_t, std::size_t> range_for(const std::string& url) const;
  int take_fault(const std::string& url, QueryKind kind, std::int64_t page);

  std::vector<CdxRecord> corpus_;
  std::vector<std::string> lines_;
  std::size_t page_size_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;

  std::mutex fault_mu_;
  std::vector<Fault> faults_;
  std::deque<int> global_faults_;
  std::atomic<int> delay_ms_{0};
  std::atomic<std::size_t> requests_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

}  // namespace wbsample
