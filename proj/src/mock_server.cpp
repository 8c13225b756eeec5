#include "wbsample/mock_server.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "httplib.h"
#include "wbsample/surt.hpp"

namespace wbsample {

namespace {

std::string with_scheme(const std::string& url) {
  return url.find("://") == std::string::npos ? "http://" + url : url;
}

struct InFlight {
  std::atomic<int>& now;
  explicit InFlight(std::atomic<int>& counter, std::atomic<int>& peak) : now(counter) {
    int cur = ++now;
    int prev = peak.load();
    while (prev < cur && !peak.compare_exchange_weak(prev, cur)) {
    }
  }
  ~InFlight() { --now; }
};

std::optional<std::int64_t> parse_uint(const std::string& s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  for (char c : s)
    if (c < '0' || c > '9') return std::nullopt;
  return std::stoll(s);
}

}  // namespace

MockCdxServer::MockCdxServer(std::vector<CdxRecord> corpus, std::size_t page_size)
    : corpus_(std::move(corpus)), page_size_(page_size) {
  if (page_size_ == 0) throw std::invalid_argument("page size must be >= 1");
  std::vector<std::pair<std::string, CdxRecord>> keyed;
  keyed.reserve(corpus_.size());
  for (auto& r : corpus_) keyed.emplace_back(r.str(), std::move(r));
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.second.urlkey != b.second.urlkey) return a.second.urlkey < b.second.urlkey;
    if (a.second.timestamp != b.second.timestamp)
      return a.second.timestamp < b.second.timestamp;
    return a.first < b.first;
  });
  corpus_.clear();
  lines_.reserve(keyed.size());
  for (auto& [line, rec] : keyed) {
    lines_.push_back(std::move(line));
    corpus_.push_back(std::move(rec));
  }
}

MockCdxServer::~MockCdxServer() { stop(); }

std::string MockCdxServer::endpoint() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/cdx";
}

std::pair<std::size_t, std::size_t> MockCdxServer::range_for(const std::string& url) const {
  std::string u = with_scheme(url);
  bool prefix = !u.empty() && u.back() == '*';
  if (prefix) u.pop_back();
  std::string key = url_to_surt(parse_url(u)).str();
  if (prefix && !key.empty() && key.back() == '/' && u.back() != '/') key.pop_back();
  auto lo = std::lower_bound(corpus_.begin(), corpus_.end(), key,
                             [](const CdxRecord& r, const std::string& k) { return r.urlkey < k; });
  auto hi = lo;
  if (prefix) {
    while (hi != corpus_.end() && hi->urlkey.compare(0, key.size(), key) == 0) ++hi;
  } else {
    hi = std::upper_bound(lo, corpus_.end(), key, [](const std::string& k, const CdxRecord& r) {
      return k < r.urlkey;
    });
  }
  return {static_cast<std::size_t>(lo - corpus_.begin()),
          static_cast<std::size_t>(hi - corpus_.begin())};
}

std::vector<CdxRecord> MockCdxServer::listing(const std::string& url) const {
  auto [lo, hi] = range_for(url);
  return {corpus_.begin() + static_cast<std::ptrdiff_t>(lo),
          corpus_.begin() + static_cast<std::ptrdiff_t>(hi)};
}

void MockCdxServer::script_faults(const std::string& url, QueryKind kind, std::int64_t page,
                                  std::vector<int> statuses) {
  std::lock_guard lock(fault_mu_);
  faults_.push_back({url, kind, page, {statuses.begin(), statuses.end()}});
}

void MockCdxServer::fail_next(std::vector<int> statuses) {
  std::lock_guard lock(fault_mu_);
  global_faults_.insert(global_faults_.end(), statuses.begin(), statuses.end());
}

int MockCdxServer::take_fault(const std::string& url, QueryKind kind, std::int64_t page) {
  std::lock_guard lock(fault_mu_);
  if (!global_faults_.empty()) {
    int s = global_faults_.front();
    global_faults_.pop_front();
    return s;
  }
  for (auto& f : faults_) {
    if (f.statuses.empty() || f.kind != kind) continue;
    if (!f.url.empty() && f.url != url) continue;
    if (f.page >= 0 && f.page != page) continue;
    int s = f.statuses.front();
    f.statuses.pop_front();
    return s;
  }
  return 0;
}

void MockCdxServer::reset_counters() {
  requests_ = 0;
  max_in_flight_ = 0;
}

void MockCdxServer::install_routes() {
  server_ = std::make_unique<httplib::Server>();
  // Enough workers for many idle keep-alive connections at once.
  server_->new_task_queue = [] { return new httplib::ThreadPool(64); };
  server_->set_keep_alive_max_count(100000);
  server_->set_tcp_nodelay(true);
  server_->set_keep_alive_timeout(1);
  server_->Get("/cdx", [this](const httplib::Request& req, httplib::Response& res) {
    InFlight guard(in_flight_, max_in_flight_);
    ++requests_;
    if (int ms = delay_ms_.load(); ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(ms));

    if (!req.has_param("url")) {
      res.status = 400;
      res.set_content("missing url parameter\n", "text/plain");
      return;
    }
    const std::string url = req.get_param_value("url");
    const bool num_pages = req.get_param_value("showNumPages") == "true";
    std::optional<std::int64_t> limit, page;
    if (req.has_param("limit")) limit = parse_uint(req.get_param_value("limit"));
    if (req.has_param("page")) page = parse_uint(req.get_param_value("page"));
    if ((req.has_param("limit") && (!limit || *limit == 0)) || (req.has_param("page") && !page) ||
        (num_pages && (req.has_param("limit") || req.has_param("page")))) {
      res.status = 400;
      res.set_content("bad query parameters\n", "text/plain");
      return;
    }

    QueryKind kind = num_pages         ? QueryKind::num_pages
                     : page            ? QueryKind::page
                     : limit == 1      ? QueryKind::first
                                       : QueryKind::listing;
    if (int status = take_fault(url, kind, page.value_or(-1)); status != 0) {
      res.status = status;
      res.set_content("injected fault\n", "text/plain");
      return;
    }

    std::pair<std::size_t, std::size_t> range;
    try {
      range = range_for(url);
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(std::string(e.what()) + "\n", "text/plain");
      return;
    }
    auto [lo, hi] = range;
    const std::size_t n = hi - lo;
    if (num_pages) {
      res.set_content(std::to_string((n + page_size_ - 1) / page_size_) + "\n", "text/plain");
      return;
    }
    std::size_t from = lo, to = hi;
    if (page) {
      const auto start = static_cast<std::size_t>(*page) * page_size_;
      from = std::min(hi, lo + start);
      to = std::min(hi, from + page_size_);
    }
    if (limit) to = std::min(to, from + static_cast<std::size_t>(*limit));
    std::string body;
    for (std::size_t i = from; i < to; ++i) {
      body += lines_[i];
      body += '\n';
    }
    res.set_content(body, "text/plain");
  });
}

void MockCdxServer::start(int port) {
  if (server_) throw std::logic_error("mock server already running");
  install_routes();
  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else {
    port_ = server_->bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (port_ <= 0) {
    server_.reset();
    throw std::runtime_error("mock server could not bind");
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void MockCdxServer::serve_forever(const std::string& host, int port,
                                  const std::function<void(int)>& on_bound) {
  if (server_) throw std::logic_error("mock server already running");
  install_routes();
  port_ = port == 0 ? server_->bind_to_any_port(host)
                    : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw std::runtime_error("mock server could not bind");
  if (on_bound) on_bound(port_);
  server_->listen_after_bind();
}

void MockCdxServer::stop() {
  if (!server_) return;
  server_->stop();
  // serve_forever() callers own the listening thread and the server object.
  if (!thread_.joinable()) return;
  thread_.join();
  server_.reset();
}

}  // namespace wbsample
