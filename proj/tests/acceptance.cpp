// Acceptance criteria, one line each:  PASS|FAIL  <name>  (<ms> ms, limit <ms>)  <detail>
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flexirank/cli.hpp"
#include "flexirank/corpus.hpp"
#include "flexirank/fcm.hpp"
#include "flexirank/features.hpp"
#include "flexirank/link_graph.hpp"
#include "flexirank/mlp.hpp"
#include "flexirank/ranking.hpp"
#include "flexirank/relevance.hpp"
#include "flexirank/service.hpp"
#include "support/fixtures.hpp"
#include "support/link_levels.hpp"
#include "support/oracles.hpp"

using namespace flexirank;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(const char* name, double limit_ms, const std::function<void(Check&)>& body) {
  Check c;
  auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (ms > limit_ms) c.expect(false, "over time limit");
  std::printf("%s  %-28s (%.0f ms, limit %.0f)  %s\n", c.ok ? "PASS" : "FAIL", name, ms, limit_ms,
              c.detail.c_str());
  std::fflush(stdout);
  failures += !c.ok;
}

std::string num(double v) { return format_double(v); }

// Rows near one of four page archetypes: index, article, homepage, portal.
void archetype_set(std::uint64_t seed, Matrix& x, std::vector<int>& y) {
  // relevance, n_images, n_links, n_self_links, n_same_links, n_lower_links, doc_length
  const double centres[4][7] = {{12, 1, 60, 2, 3, 5, 1500},
                                {30, 2, 4, 1, 0, 1, 20000},
                                {6, 4, 25, 3, 2, 20, 3000},
                                {8, 12, 40, 5, 25, 6, 4000}};
  const double spread[7] = {2, 1, 5, 1, 2, 2, 500};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  x = Matrix(30, 7);
  y.clear();
  for (std::size_t i = 0; i < 30; ++i) {
    int label = int(i % 4);
    y.push_back(label);
    for (std::size_t j = 0; j < 7; ++j) x(i, j) = std::max(0.0, centres[label][j] + spread[j] * noise(rng));
  }
}

}  // namespace

int main() {
  criterion("relevance arithmetic", 1000, [](Check& c) {
    auto q = normalize_query("Data Mining");
    double coal = calc_relevance_weight("coal mining", q);
    c.expect(std::abs(coal - 0.545) <= 0.001, "coal mining scored " + num(coal));
    std::vector<std::string> words = {"data", "mining", "fun"};
    double want = 1.0 * double(oracle::count_words(words, {"data", "mining"})) +
                  4.0 / 11.0 * double(oracle::count_words(words, {"data"})) +
                  6.0 / 11.0 * double(oracle::count_words(words, {"mining"}));
    double got = calc_relevance_weight("data mining is fun", q);
    c.expect(got == want, "data mining is fun scored " + num(got) + ", oracle " + num(want));
    if (c.ok) c.detail = "coal=" + num(coal) + " fun=" + num(got);
  });

  criterion("hits oracle equivalence", 5000, [](Check& c) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      auto g = oracle::random_graph(seed, 10);
      auto want = oracle::dense_hits(g.n, g.edges);
      auto got = hits(NeighborhoodGraph::from_edges(g.n, g.edges), 1e-14, 1000000);
      for (std::size_t i = 0; i < g.n; ++i) {
        worst = std::max({worst, std::abs(got.hub[i] - want.hub[i]), std::abs(got.authority[i] - want.authority[i])});
      }
    }
    c.expect(worst <= 1e-9, "max deviation " + num(worst));
    auto s = hits(NeighborhoodGraph::from_edges(3, {{0, 2}, {1, 2}}));
    double r = 1.0 / std::sqrt(2.0);
    bool two_hub = std::abs(s.authority[0]) <= 1e-9 && std::abs(s.authority[1]) <= 1e-9 &&
                   std::abs(s.authority[2] - 1) <= 1e-9 && std::abs(s.hub[0] - r) <= 1e-9 &&
                   std::abs(s.hub[1] - r) <= 1e-9 && std::abs(s.hub[2]) <= 1e-9;
    c.expect(two_hub, "two-hub graph off its fixed point");
    if (c.ok) c.detail = "50 graphs, max deviation " + num(worst);
  });

  criterion("link-level classifier", 1000, [](Check& c) {
    std::size_t n = 0;
    for (const auto& lc : fixtures::kLevelTable) {
      auto got = classify_link_level(lc.source, lc.target);
      c.expect(got == lc.want, std::string(lc.source) + " -> " + lc.target + " gave " + std::string(to_string(got)));
      ++n;
    }
    c.expect(n - fixtures::kBasicCases >= 30, "edge-case table too short");
    if (c.ok)
      c.detail = std::to_string(fixtures::kBasicCases) + " basic + " + std::to_string(n - fixtures::kBasicCases) +
                 " edge cases";
  });

  criterion("flexibility fixture", 2000, [](Check& c) {
    RankingEngine engine(fixtures::hci_corpus());
    c.expect(engine.corpus().size() == 12, "fixture corpus has " + std::to_string(engine.corpus().size()) + " pages");
    auto index = engine.rank(fixtures::kQuery, PageType::index, 12);
    auto article = engine.rank(fixtures::kQuery, PageType::article, 12);
    auto downloads = engine.rank(fixtures::kQuery, PageType::downloads, 12);
    c.expect(index.front().url != article.front().url, "index and article share top-1 " + index.front().url);

    // High relevance: at or above the median relevance of the candidates.
    auto ev = engine.evaluate(fixtures::kQuery);
    std::vector<double> rel;
    for (const auto& v : ev.measured) rel.push_back(v[Attribute::relevance]);
    std::sort(rel.begin(), rel.end());
    double median = rel[(rel.size() - 1) / 2];
    const FeatureVector* top_hub = nullptr;
    for (const auto& v : ev.measured)
      if (v[Attribute::relevance] >= median && (!top_hub || v[Attribute::hub] > (*top_hub)[Attribute::hub]))
        top_hub = &v;
    c.expect(top_hub && index.front().url == top_hub->url,
             "index top-1 " + index.front().url + " is not the max-hub page " + (top_hub ? top_hub->url : "?"));

    const auto* dl = engine.corpus().find(downloads.front().url);
    std::size_t zip_links = 0;
    if (dl)
      for (const auto& l : extract_links(*dl)) zip_links += l.target.ends_with(".zip");
    c.expect(zip_links >= 3, "downloads top-1 " + downloads.front().url + " has " + std::to_string(zip_links) +
                                 " .zip links");
    if (c.ok)
      c.detail = "index=" + index.front().url + " article=" + article.front().url +
                 " downloads=" + downloads.front().url;
  });

  criterion("fcm suite", 10000, [](Check& c) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0, 50);
      std::size_t n = 10 + seed % 20;
      Matrix x(n, 7);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 7; ++j) x(i, j) = u(rng);
      FcmOptions o;
      o.c = 2 + seed % 4;
      o.seed = seed;
      o.tol = 1e-9;
      o.observer = [&](const Matrix& mu, std::size_t it) {
        for (std::size_t i = 0; i < mu.rows(); ++i) {
          double s = 0;
          for (double v : mu.row(i)) s += v;
          c.expect(std::abs(s - 1) <= 1e-9, "seed " + std::to_string(seed) + " iteration " + std::to_string(it) +
                                                " row sum " + num(s));
        }
      };
      auto model = fcm_fit(x, o);
      for (std::size_t t = 1; t < model.objective_trace.size(); ++t)
        c.expect(model.objective_trace[t] <= model.objective_trace[t - 1] * (1 + 1e-12),
                 "seed " + std::to_string(seed) + " objective rose at iteration " + std::to_string(t + 1));
    }

    // Two blobs, sigma 0.1, generator means 10 apart.
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 0.1);
    const double offset = 10.0 / std::sqrt(7.0);
    Matrix blobs(80, 7);
    for (std::size_t i = 0; i < 80; ++i)
      for (std::size_t j = 0; j < 7; ++j) blobs(i, j) = (i < 40 ? 0.0 : offset) + noise(rng);
    auto model = fcm_fit(blobs, 2, 2.0, 1e-9, 500, 42);
    double worst = 0;
    for (std::size_t k = 0; k < 2; ++k) {
      double d0 = 0, d1 = 0;
      for (std::size_t j = 0; j < 7; ++j) {
        d0 = std::max(d0, std::abs(model.centers(k, j)));
        d1 = std::max(d1, std::abs(model.centers(k, j) - offset));
      }
      worst = std::max(worst, std::min(d0, d1));
    }
    bool split = (model.centers(0, 0) < offset / 2) != (model.centers(1, 0) < offset / 2);
    c.expect(split && worst <= 0.5, "blob centres off by " + num(worst));

    Matrix crisp(6, 3, 0.0);
    for (std::size_t i = 0; i < 6; ++i) crisp(i, i % 3) = 1.0;
    Matrix uniform(6, 3, 1.0 / 3.0);
    c.expect(classification_entropy(crisp) == 0.0, "crisp entropy " + num(classification_entropy(crisp)));
    c.expect(std::abs(classification_entropy(uniform) - std::log(3.0)) <= 1e-12,
             "uniform entropy " + num(classification_entropy(uniform)));
    if (c.ok) c.detail = "20 datasets; blob error " + num(worst);
  });

  criterion("mlp suite", 30000, [](Check& c) {
    auto net = mlp_init(7, 5, 4, 3);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    Matrix x(3, 7);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 7; ++j) x(i, j) = u(rng);
    auto t = one_hot({0, 3, 1}, {0, 1, 2, 3});
    auto grad = mlp_gradient(net, x, t);
    auto p = net.parameters();
    double worst = 0;
    const double h = 1e-6;
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto plus = net, minus = net;
      auto pp = p, pm = p;
      pp[i] += h;
      pm[i] -= h;
      plus.set_parameters(pp);
      minus.set_parameters(pm);
      double numeric = (mlp_loss(plus, x, t) - mlp_loss(minus, x, t)) / (2 * h);
      double scale = std::max({std::abs(numeric), std::abs(grad[i]), 1e-8});
      worst = std::max(worst, std::abs(numeric - grad[i]) / scale);
    }
    c.expect(worst <= 1e-4, "gradient relative error " + num(worst));

    Matrix data;
    std::vector<int> labels;
    archetype_set(17, data, labels);
    MlpOptions o;
    o.epochs = 2000;
    auto trained = mlp_train(data, labels, o);
    c.expect(trained.rms_error < 0.2, "rms error " + num(trained.rms_error));
    if (c.ok) c.detail = "grad rel err " + num(worst) + ", rms " + num(trained.rms_error);
  });

  criterion("corpus round-trip", 1000, [](Check& c) {
    std::mt19937_64 rng(99);
    CorpusManifest m;
    for (int i = 0; i < 100; ++i) {
      PageRecord p;
      p.url = "http://host" + std::to_string(i % 7) + ".example/page/" + std::to_string(i);
      p.status = i % 10 == 0 ? 404 : 200;
      p.content_type = i % 3 ? "text/html; charset=utf-8" : "text/html";
      p.fetched_at = Timestamp{std::chrono::seconds{1100000000 + i * 3600}};
      std::string html = "<html>\n\t<body>\r\n";
      for (int b = 0; b < 40; ++b) html.push_back(static_cast<char>(rng() & 0xFF));
      html += "\n</body>\t</html>\n";
      p.html = html;
      m.upsert(std::move(p));
    }
    std::stringstream buf;
    write_corpus(m, buf);
    auto back = read_corpus(buf);
    c.expect(back.size() == 100, "read back " + std::to_string(back.size()) + " records");
    c.expect(back == m, "records differ after the round trip");
    if (c.ok) c.detail = "100 records, " + std::to_string(buf.str().size()) + " bytes";
  });

  criterion("service conformance", 10000, [](Check& c) {
    auto path = (std::filesystem::temp_directory_path() / "flexirank_acceptance.corpus").string();
    save_corpus(fixtures::hci_corpus(), path);
    RankingEngine engine(load_corpus(path));
    std::size_t compared = 0;
    for (std::size_t ti = 0; ti < kPageTypeNames.size(); ++ti) {
      std::string type(kPageTypeNames[ti]);
      std::ostringstream out, err;
      int code = run_cli({"rank", path, "--query", fixtures::kQuery, "--type", type, "--k", "12"}, out, err);
      c.expect(code == 0, "cli rank failed: " + err.str());
      auto reply = handle_search(engine, {{"q", fixtures::kQuery}, {"type", type}, {"k", "12"}});
      c.expect(reply.status == 200, "search " + type + " returned " + std::to_string(reply.status));
      if (reply.status != 200) continue;
      auto results = nlohmann::json::parse(reply.body)["results"];
      std::istringstream lines(out.str());
      std::size_t i = 0;
      for (std::string line; std::getline(lines, line); ++i) {
        std::istringstream f(line);
        std::string rank, score, url;
        std::getline(f, rank, '\t');
        std::getline(f, score, '\t');
        std::getline(f, url, '\t');
        c.expect(i < results.size(), "cli printed more rows than the service for " + type);
        if (i >= results.size()) break;
        c.expect(std::stoul(rank) == results[i]["rank"].get<std::size_t>() &&
                     std::stod(score) == results[i]["score"].get<double>() && url == results[i]["url"],
                 type + " row " + std::to_string(i + 1) + " differs");
        ++compared;
      }
      c.expect(i == results.size(), "row count differs for " + type);
    }
    const std::vector<QueryParams> bad = {
        {{"q", ""}, {"type", "index"}}, {{"q", "x"}, {"type", "blog"}}, {{"q", "x"}, {"k", "0"}},
        {{"q", "x"}, {"k", "101"}},     {{"type", "index"}}};
    for (const auto& params : bad) {
      auto r = handle_search(engine, params);
      c.expect(r.status == 400, "invalid request returned " + std::to_string(r.status));
    }
    auto empty = handle_search(engine, {{"q", ""}});
    c.expect(nlohmann::json::parse(empty.body)["error"] == "empty query", "empty query message: " + empty.body);
    std::filesystem::remove(path);
    if (c.ok) c.detail = std::to_string(compared) + " rows compared, " + std::to_string(bad.size()) + " rejections";
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
