#pragma once

// Small-scale polite fetcher: bounded worker pool, fixed per-host delay,
// manual redirect following so the final URL is known.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "httplib.h"

#include "flexirank/charset.hpp"
#include "flexirank/corpus.hpp"
#include "flexirank/error.hpp"
#include "flexirank/url.hpp"

namespace flexirank {

struct FetchOptions {
  std::chrono::milliseconds timeout{10000};
  int max_redirects = 5;
  std::chrono::milliseconds per_host_delay{500};
  std::size_t max_concurrency = 4;
  std::string user_agent = "flexirank/0.1";
};

namespace detail {

inline std::string scheme_host_port(const Url& url) {
  std::string s = url.scheme + "://" + url.host;
  if (!url.port.empty()) s += ":" + url.port;
  return s;
}

inline std::string request_target(const Url& url) {
  std::string t = url.path;
  if (url.query) t += "?" + *url.query;
  return t;
}

}  // namespace detail

/// Fetches one URL, following up to options.max_redirects redirects. The
/// returned record carries the final URL. Throws FetchError.
inline PageRecord fetch_page(const std::string& url, const FetchOptions& options = {}) {
  auto current = parse_url(url);
  if (!current || !current->is_http()) throw FetchError(url, "not an absolute http(s) url");
  current->fragment.reset();

  for (int hop = 0;; ++hop) {
    httplib::Client client(detail::scheme_host_port(*current));
    auto secs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);
    client.set_follow_location(false);
    httplib::Headers headers{{"User-Agent", options.user_agent}, {"Accept", "text/html,*/*;q=0.5"}};

    auto res = client.Get(detail::request_target(*current), headers);
    if (!res) {
      auto err = res.error();
      bool timeout = err == httplib::Error::ConnectionTimeout ||
                     (err == httplib::Error::Read && options.timeout.count() > 0);
      throw FetchError(current->str(), timeout ? "timeout (" + httplib::to_string(err) + ")"
                                               : httplib::to_string(err));
    }
    int status = res->status;
    if (status >= 300 && status < 400 && res->has_header("Location")) {
      if (hop >= options.max_redirects) throw FetchError(url, "too many redirects");
      auto next = resolve_url(*current, res->get_header_value("Location"));
      if (!next || !next->is_http()) throw FetchError(url, "bad redirect target");
      next->fragment.reset();
      current = std::move(*next);
      continue;
    }

    PageRecord page;
    page.url = current->without_fragment();
    page.status = status;
    page.content_type = res->get_header_value("Content-Type");
    page.fetched_at = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    page.html = decode_body(res->body, page.content_type);
    if (status >= 200 && status < 300 && page.html.empty()) throw FetchError(page.url, "empty body");
    return page;
  }
}

struct IngestReport {
  std::size_t fetched = 0;
  std::size_t skipped = 0;
  std::vector<FetchError> errors;
  std::size_t peak_in_flight = 0;
};

/// Fetches a URL list into a manifest. URLs already present in the manifest,
/// or repeated in the list, are not requested again.
class Fetcher {
 public:
  using FetchFn = std::function<PageRecord(const std::string&, const FetchOptions&)>;

  explicit Fetcher(FetchOptions options = {}, FetchFn fetch = fetch_page)
      : options_(std::move(options)), fetch_(std::move(fetch)) {
    if (options_.max_concurrency == 0) throw InvalidArgument("max_concurrency must be >= 1");
  }

  IngestReport ingest(const std::vector<std::string>& urls, CorpusManifest& manifest) {
    IngestReport report;
    std::deque<std::string> queue;
    std::unordered_set<std::string> seen;
    for (const auto& raw : urls) {
      std::string url = canonical_url(raw);
      if (url.empty()) continue;
      if (manifest.contains(url) || !seen.insert(url).second) {
        ++report.skipped;
        continue;
      }
      queue.push_back(std::move(url));
    }

    std::mutex mu;
    std::atomic<std::size_t> in_flight{0};
    std::atomic<std::size_t> peak{0};
    auto worker = [&] {
      for (;;) {
        std::string url;
        {
          std::lock_guard lock(mu);
          if (queue.empty()) return;
          url = std::move(queue.front());
          queue.pop_front();
        }
        wait_for_host_slot(url);
        std::size_t now = ++in_flight;
        for (std::size_t p = peak.load(); now > p && !peak.compare_exchange_weak(p, now);) {
        }
        std::optional<PageRecord> page;
        std::optional<FetchError> error;
        try {
          page = fetch_(url, options_);
        } catch (const FetchError& e) {
          error = e;
        } catch (const std::exception& e) {
          error = FetchError(url, e.what());
        }
        --in_flight;
        std::lock_guard lock(mu);
        if (page) {
          manifest.upsert(std::move(*page));
          ++report.fetched;
        } else {
          report.errors.push_back(std::move(*error));
        }
      }
    };

    std::size_t workers = std::min(options_.max_concurrency, std::max<std::size_t>(queue.size(), 1));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    report.peak_in_flight = peak.load();
    return report;
  }

 private:
  void wait_for_host_slot(const std::string& url) {
    auto parsed = parse_url(url);
    std::string host = parsed ? parsed->host + ":" + parsed->port : url;
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(host_mu_);
      auto now = std::chrono::steady_clock::now();
      auto& next = next_slot_[host];
      slot = std::max(now, next);
      next = slot + options_.per_host_delay;
    }
    std::this_thread::sleep_until(slot);
  }

  FetchOptions options_;
  FetchFn fetch_;
  std::mutex host_mu_;
  std::map<std::string, std::chrono::steady_clock::time_point> next_slot_;
};

}  // namespace flexirank
