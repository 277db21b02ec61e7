#pragma once

// HTTP front end over RankingEngine. Request handling is split from the
// socket layer so handlers can be exercised without a listener.

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "httplib.h"
#include "json.hpp"

#include "flexirank/corpus.hpp"
#include "flexirank/error.hpp"
#include "flexirank/profiles.hpp"
#include "flexirank/ranking.hpp"

namespace flexirank {

inline constexpr std::size_t kMaxResults = 100;
inline constexpr std::string_view kProfilesEnv = "FLEXIRANK_PROFILES";

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using QueryParams = std::multimap<std::string, std::string>;

namespace detail {

inline HttpReply error_reply(int status, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = message;
  return {status, j.dump() + "\n"};
}

inline std::optional<std::string> param(const QueryParams& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

inline std::optional<std::size_t> parse_count(std::string_view s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// JSON document for a ranked result list. Field order is fixed.
inline std::string search_response_json(std::string_view query, PageType type, std::size_t k,
                                        std::size_t corpus_size, const std::vector<RankedResult>& results) {
  nlohmann::ordered_json j;
  j["query"] = query;
  j["type"] = to_string(type);
  j["k"] = k;
  j["corpus_size"] = corpus_size;
  auto& list = j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json item;
    item["rank"] = r.rank;
    item["score"] = r.score;
    item["url"] = r.url;
    auto& contrib = item["contributions"] = nlohmann::ordered_json::object();
    for (const auto& c : r.contributions) contrib[std::string(to_string(c.attribute))] = c.value;
    list.push_back(std::move(item));
  }
  return j.dump() + "\n";
}

/// GET /search. Parameters: q (required), type (default "default"), k (default 10, 1..100).
inline HttpReply handle_search(const RankingEngine& engine, const QueryParams& params) {
  auto q = detail::param(params, "q").value_or("");
  PageType type = PageType::default_type;
  if (auto t = detail::param(params, "type"); t && !t->empty()) {
    try {
      type = parse_page_type(*t);
    } catch (const InvalidArgument& e) {
      return detail::error_reply(400, e.what());
    }
  }
  std::size_t k = 10;
  if (auto ks = detail::param(params, "k"); ks && !ks->empty()) {
    auto v = detail::parse_count(*ks);
    if (!v || *v < 1 || *v > kMaxResults) return detail::error_reply(400, "k must be an integer in [1, 100]");
    k = *v;
  }
  try {
    auto results = engine.rank(q, type, k);
    return {200, search_response_json(detail::trim(q), type, k, engine.corpus().size(), results)};
  } catch (const EmptyQueryError& e) {
    return detail::error_reply(400, e.what());
  } catch (const std::exception& e) {
    return detail::error_reply(500, e.what());
  }
}

inline HttpReply handle_types() {
  nlohmann::ordered_json j;
  j["types"] = nlohmann::ordered_json::array();
  for (auto name : kPageTypeNames) j["types"].push_back(name);
  return {200, j.dump() + "\n"};
}

inline HttpReply handle_healthz(const RankingEngine& engine) {
  nlohmann::ordered_json j;
  j["status"] = "ok";
  j["corpus_size"] = engine.corpus().size();
  return {200, j.dump() + "\n"};
}

/// Profiles path after the environment override.
inline std::string resolve_profiles_path(std::string configured) {
  if (const char* env = std::getenv(std::string(kProfilesEnv).c_str()); env && *env) return env;
  return configured;
}

struct Bind {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// "host:port", ":port" or "port".
inline Bind parse_bind(std::string_view text) {
  Bind b;
  auto colon = text.rfind(':');
  std::string_view port = colon == std::string_view::npos ? text : text.substr(colon + 1);
  if (colon != std::string_view::npos && colon > 0) b.host = std::string(text.substr(0, colon));
  auto v = detail::parse_count(port);
  if (!v || *v > 65535) throw InvalidArgument("bad bind address '" + std::string(text) + "'");
  b.port = static_cast<int>(*v);
  return b;
}

/// Installs the routes on `server`. The engine must outlive the server.
inline void install_routes(httplib::Server& server, const RankingEngine& engine, const std::string& static_dir = {}) {
  auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };
  server.Get("/search", [&engine, send](const httplib::Request& req, httplib::Response& res) {
    auto start = std::chrono::steady_clock::now();
    QueryParams params(req.params.begin(), req.params.end());
    send(res, handle_search(engine, params));
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    res.set_header("X-Elapsed-Ms", std::to_string(ms));
  });
  server.Get("/types", [send](const httplib::Request&, httplib::Response& res) { send(res, handle_types()); });
  server.Get("/healthz",
             [&engine, send](const httplib::Request&, httplib::Response& res) { send(res, handle_healthz(engine)); });
  if (!static_dir.empty() && !server.set_mount_point("/", static_dir))
    throw Error("static directory not found: " + static_dir);
  server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, detail::error_reply(500, what));
  });
}

}  // namespace flexirank
