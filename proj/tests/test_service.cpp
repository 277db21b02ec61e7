#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

#include "flexirank/service.hpp"
#include "support/cli_runner.hpp"

using namespace flexirank;
using nlohmann::json;

namespace {

const RankingEngine& engine() {
  static const RankingEngine e(fixtures::hci_corpus());
  return e;
}

QueryParams params(std::initializer_list<std::pair<const std::string, std::string>> kv) { return QueryParams(kv); }

}  // namespace

TEST(Service, SearchReturnsRankedJson) {
  auto reply = handle_search(engine(), params({{"q", fixtures::kQuery}, {"type", "index"}}));
  ASSERT_EQ(reply.status, 200) << reply.body;
  auto j = json::parse(reply.body);
  EXPECT_EQ(j["query"], fixtures::kQuery);
  EXPECT_EQ(j["type"], "index");
  EXPECT_EQ(j["k"], 10);
  EXPECT_EQ(j["corpus_size"], 12);
  ASSERT_EQ(j["results"].size(), 10u);
  EXPECT_EQ(j["results"][0]["url"], fixtures::kIndexPage);
  for (std::size_t i = 0; i < j["results"].size(); ++i) {
    const auto& r = j["results"][i];
    EXPECT_EQ(r["rank"], i + 1);
    EXPECT_TRUE(r["contributions"].contains("relevance"));
    EXPECT_TRUE(r["contributions"].contains("links_per_length"));
  }
}

TEST(Service, DefaultsToDefaultType) {
  auto j = json::parse(handle_search(engine(), params({{"q", fixtures::kQuery}})).body);
  EXPECT_EQ(j["type"], "default");
  EXPECT_EQ(j["results"][0]["contributions"].size(), kAttributeCount);
}

TEST(Service, InvalidInputIs400) {
  auto empty = handle_search(engine(), params({{"q", ""}, {"type", "index"}}));
  EXPECT_EQ(empty.status, 400);
  EXPECT_EQ(json::parse(empty.body)["error"], "empty query");
  EXPECT_EQ(handle_search(engine(), params({{"type", "index"}})).status, 400);
  EXPECT_EQ(handle_search(engine(), params({{"q", "the of"}})).status, 400);
  EXPECT_EQ(handle_search(engine(), params({{"q", "x"}, {"type", "blog"}})).status, 400);
  for (const char* k : {"0", "101", "-1", "ten", "5x"})
    EXPECT_EQ(handle_search(engine(), params({{"q", "x"}, {"k", k}})).status, 400) << k;
  EXPECT_EQ(handle_search(engine(), params({{"q", "hci"}, {"k", "100"}})).status, 200);
}

TEST(Service, TypesListsAllProfiles) {
  auto j = json::parse(handle_types().body);
  ASSERT_EQ(j["types"].size(), 11u);
  EXPECT_EQ(j["types"][0], "index");
  EXPECT_EQ(j["types"][10], "default");
}

TEST(Service, ChangingTypeReorders) {
  auto a = json::parse(handle_search(engine(), params({{"q", fixtures::kQuery}, {"type", "index"}})).body);
  auto b = json::parse(handle_search(engine(), params({{"q", fixtures::kQuery}, {"type", "article"}})).body);
  EXPECT_NE(a["results"][0]["url"], b["results"][0]["url"]);
}

TEST(Service, MatchesCliRankFieldForField) {
  for (const char* type : {"index", "article", "downloads", "default"}) {
    auto cli = fixtures::run({"rank", fixtures::hci_corpus_file(), "--query", fixtures::kQuery, "--type", type,
                              "--k", "7"});
    ASSERT_EQ(cli.code, 0) << cli.err;
    auto rows = fixtures::split_tsv(cli.out);
    auto j = json::parse(
        handle_search(engine(), params({{"q", fixtures::kQuery}, {"type", type}, {"k", "7"}})).body);
    ASSERT_EQ(rows.size(), j["results"].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = j["results"][i];
      EXPECT_EQ(std::stoul(rows[i][0]), r["rank"].get<std::size_t>());
      EXPECT_EQ(std::stod(rows[i][1]), r["score"].get<double>());
      EXPECT_EQ(rows[i][2], r["url"].get<std::string>());
    }
  }
}

TEST(Service, OverHttp) {
  httplib::Server server;
  install_routes(server, engine());
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  client.set_url_encode(false);  // send "+" as a form-encoded space
  auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  auto types = client.Get("/types");
  ASSERT_TRUE(types);
  EXPECT_EQ(json::parse(types->body)["types"].size(), 11u);

  auto first = client.Get("/search?q=human+computer+interaction&type=index");
  auto second = client.Get("/search?q=human%20computer%20interaction&type=index");
  ASSERT_TRUE(first && second);
  EXPECT_EQ(first->status, 200);
  EXPECT_EQ(first->body, second->body);
  EXPECT_TRUE(first->has_header("X-Elapsed-Ms"));
  EXPECT_EQ(first->get_header_value("Content-Type"), "application/json");

  auto bad = client.Get("/search?q=&type=index");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body)["error"], "empty query");
  auto bad_k = client.Get("/search?q=hci&k=1000");
  ASSERT_TRUE(bad_k);
  EXPECT_EQ(bad_k->status, 400);

  server.stop();
  t.join();
}

TEST(Service, ProfilesEnvironmentOverride) {
  ::unsetenv("FLEXIRANK_PROFILES");
  EXPECT_EQ(resolve_profiles_path("conf/p.ini"), "conf/p.ini");
  ::setenv("FLEXIRANK_PROFILES", "/etc/flexirank.ini", 1);
  EXPECT_EQ(resolve_profiles_path("conf/p.ini"), "/etc/flexirank.ini");
  ::unsetenv("FLEXIRANK_PROFILES");
}

TEST(Service, ParseBind) {
  auto b = parse_bind("0.0.0.0:9000");
  EXPECT_EQ(b.host, "0.0.0.0");
  EXPECT_EQ(b.port, 9000);
  EXPECT_EQ(parse_bind(":81").host, "127.0.0.1");
  EXPECT_EQ(parse_bind("8081").port, 8081);
  EXPECT_THROW(parse_bind("host:port"), InvalidArgument);
  EXPECT_THROW(parse_bind("h:70000"), InvalidArgument);
}
