#pragma once

// The flexirank command line. run_cli() takes its streams as arguments so
// tests can drive every subcommand in-process.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flexirank/corpus.hpp"
#include "flexirank/fcm.hpp"
#include "flexirank/features.hpp"
#include "flexirank/fetch.hpp"
#include "flexirank/mlp.hpp"
#include "flexirank/profiles.hpp"
#include "flexirank/ranking.hpp"
#include "flexirank/relevance.hpp"
#include "flexirank/service.hpp"

namespace flexirank {

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

/// Column order of `flexirank features`.
inline constexpr std::array<std::string_view, 16> kFeatureColumns = {
    "url",           "n_links",         "n_self_links",     "n_lower_links",   "n_same_links",
    "n_images",      "n_thumbnails",    "n_download_links", "n_paper_links",   "n_dynamic_links",
    "doc_length",    "anchor_alphabet_score", "links_per_length", "text_to_image", "title_text",
    "heading_text"};

namespace detail {

inline std::string tsv_safe(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline bool is_ok(const PageRecord& p) { return p.status >= 200 && p.status < 300; }

inline std::shared_ptr<const StopList> load_stops(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<const StopList>(StopList::from_file(path));
}

inline ProfileSet load_profiles(const std::string& path) {
  return path.empty() ? ProfileSet::builtin() : ProfileSet::from_file(path);
}

// Rows of the clustering matrix (kClusterFeatureNames order) for every 2xx page.
inline std::pair<std::vector<std::string>, Matrix> cluster_rows(const CorpusManifest& corpus, const QueryTerms& q) {
  std::vector<std::string> urls;
  std::vector<std::vector<double>> rows;
  const auto& stops = *q.stop_list;
  for (const auto& page : corpus.records()) {
    if (!is_ok(page)) continue;
    auto a = analyze_page(page);
    const auto& f = a.features;
    double rel = relevance_of_tokens(analyze_text(a.visible_text, stops), q);
    urls.push_back(page.url);
    rows.push_back({rel, double(f.n_images), double(f.n_links), double(f.n_self_links), double(f.n_same_links),
                    double(f.n_lower_links), double(f.doc_length)});
  }
  return {std::move(urls), Matrix::from_rows(rows)};
}

// Numeric TSV. '#' lines are comments; a non-numeric first field is a row label and skipped.
inline Matrix read_feature_table(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::istringstream fields(line);
    bool first = true;
    for (std::string field; std::getline(fields, field, '\t'); first = false) {
      auto f = trim(field);
      double v = 0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || p != f.data() + f.size()) {
        if (first) continue;
        throw ParseError(lineno, "not a number: '" + std::string(f) + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ParseError(lineno, "inconsistent column count");
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

inline std::vector<int> read_labels(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<int> labels;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) throw ParseError(lineno, "bad label '" + std::string(t) + "'");
    labels.push_back(v);
  }
  return labels;
}

inline std::vector<std::string> read_url_list(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> urls;
  for (std::string line; std::getline(in, line);) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    urls.emplace_back(t);
  }
  return urls;
}

}  // namespace detail

/// Runs one command line (args exclude the program name). Returns the exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"flexirank: type-sensitive web page ranking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "flexirank 0.1.0");

  std::string corpus_path, out_path, urls_path, map_path, query, type_name = "default", profiles_path,
      stoplist_path, url_filter, fetched_at, features_path, labels_path, static_dir, bind = "127.0.0.1:8080",
      check_path;
  long delay_ms = 500, timeout_ms = 10000;
  std::size_t concurrency = 4, k = 10, max_iter = kDefaultHitsMaxIter, c = 4, hidden = 5, epochs = 1000;
  double tol = kDefaultHitsTolerance, m = 2.0, rate = 0.5;
  std::uint64_t seed = 42;
  bool emit_matrix = false;

  auto* fetch = app.add_subcommand("fetch", "fetch a URL list into a corpus file");
  fetch->add_option("--urls", urls_path, "file with one URL per line")->required();
  fetch->add_option("--out", out_path, "corpus file; existing records are kept and not refetched")->required();
  fetch->add_option("--delay-ms", delay_ms, "per-host delay")->capture_default_str();
  fetch->add_option("--concurrency", concurrency, "maximum concurrent requests")->capture_default_str();
  fetch->add_option("--timeout-ms", timeout_ms, "connect/read timeout")->capture_default_str();

  auto* corpus = app.add_subcommand("corpus", "inspect or build corpus files");
  corpus->require_subcommand(1);
  auto* ls = corpus->add_subcommand("ls", "list records");
  ls->add_option("corpus", corpus_path)->required();
  auto* import = corpus->add_subcommand("import", "build a corpus from local HTML files");
  import->add_option("--map", map_path, "TSV of url<TAB>file; files relative to the map")->required();
  import->add_option("--out", out_path)->required();
  import->add_option("--fetched-at", fetched_at, "RFC 3339 timestamp for every record");

  auto* features = app.add_subcommand("features", "per-page syntactic features");
  features->add_option("corpus", corpus_path)->required();
  features->add_option("--url", url_filter, "only URLs containing this substring");

  auto* relevance = app.add_subcommand("relevance", "query relevance weight per page");
  relevance->add_option("corpus", corpus_path)->required();
  relevance->add_option("--query", query)->required();
  relevance->add_option("--stoplist", stoplist_path);

  auto* hits_cmd = app.add_subcommand("hits", "hub and authority scores of the query neighbourhood");
  hits_cmd->add_option("corpus", corpus_path)->required();
  hits_cmd->add_option("--query", query)->required();
  hits_cmd->add_option("--tol", tol)->capture_default_str();
  hits_cmd->add_option("--max-iter", max_iter)->capture_default_str();
  hits_cmd->add_option("--stoplist", stoplist_path);

  auto* rank_cmd = app.add_subcommand("rank", "rank pages for a query and page type");
  rank_cmd->add_option("corpus", corpus_path)->required();
  rank_cmd->add_option("--query", query)->required();
  rank_cmd->add_option("--type", type_name)->capture_default_str();
  rank_cmd->add_option("--k", k)->capture_default_str();
  rank_cmd->add_option("--profiles", profiles_path);
  rank_cmd->add_option("--stoplist", stoplist_path);

  auto* cluster = app.add_subcommand("cluster", "fuzzy c-means over page features");
  cluster->add_option("corpus", corpus_path)->required();
  cluster->add_option("--query", query, "query for the relevance column")->required();
  cluster->add_option("--c", c)->capture_default_str();
  cluster->add_option("--m", m)->capture_default_str();
  cluster->add_option("--seed", seed)->capture_default_str();
  cluster->add_option("--stoplist", stoplist_path);
  cluster->add_flag("--emit-matrix", emit_matrix, "print the feature matrix instead of clustering");

  auto* train = app.add_subcommand("classify-train", "train the page classifier and report rms error");
  train->add_option("features", features_path, "numeric TSV, one row per page")->required();
  train->add_option("labels", labels_path, "one integer label per line")->required();
  train->add_option("--hidden", hidden)->capture_default_str();
  train->add_option("--epochs", epochs)->capture_default_str();
  train->add_option("--rate", rate)->capture_default_str();
  train->add_option("--seed", seed)->capture_default_str();

  auto* serve = app.add_subcommand("serve", "run the HTTP search service");
  serve->add_option("--corpus", corpus_path)->required();
  serve->add_option("--profiles", profiles_path, "overridden by $FLEXIRANK_PROFILES");
  serve->add_option("--bind", bind)->capture_default_str();
  serve->add_option("--static", static_dir, "directory served at /");

  auto* profiles = app.add_subcommand("profiles", "print the builtin profiles, or validate a file");
  profiles->add_option("--check", check_path);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    for (auto* sub : app.get_subcommands())
      if (sub->parsed()) err << sub->help();
    return e.get_exit_code() ? e.get_exit_code() : 2;
  }

  try {
    if (*fetch) {
      CorpusManifest manifest;
      if (std::filesystem::exists(out_path)) manifest = load_corpus(out_path);
      FetchOptions opts;
      opts.per_host_delay = std::chrono::milliseconds(delay_ms);
      opts.timeout = std::chrono::milliseconds(timeout_ms);
      opts.max_concurrency = concurrency;
      auto report = Fetcher(opts).ingest(detail::read_url_list(urls_path), manifest);
      save_corpus(manifest, out_path);
      for (const auto& e : report.errors) err << "error: " << e.what() << "\n";
      err << "fetched " << report.fetched << ", skipped " << report.skipped << ", failed " << report.errors.size()
          << "\n";
      return report.errors.empty() ? 0 : 1;
    }

    if (*ls) {
      auto manifest = load_corpus(corpus_path);
      out << "# url\tstatus\tfetched_at\tcontent_type\tbytes\n";
      for (const auto& p : manifest.records())
        out << p.url << '\t' << p.status << '\t' << format_rfc3339(p.fetched_at) << '\t' << p.content_type << '\t'
            << p.html.size() << '\n';
      return 0;
    }

    if (*import) {
      Timestamp when = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
      if (!fetched_at.empty()) {
        auto t = parse_rfc3339(fetched_at);
        if (!t) throw InvalidArgument("bad --fetched-at '" + fetched_at + "'");
        when = *t;
      }
      auto base = std::filesystem::path(map_path).parent_path();
      std::istringstream in(detail::read_file(map_path));
      CorpusManifest manifest;
      manifest.source_note = "imported from " + map_path;
      std::size_t lineno = 0;
      for (std::string line; std::getline(in, line);) {
        ++lineno;
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto tab = t.find('\t');
        if (tab == std::string_view::npos) throw ParseError(lineno, "expected url<TAB>file");
        auto url = canonical_url(t.substr(0, tab));
        auto file = std::string(detail::trim(t.substr(tab + 1)));
        PageRecord page;
        page.url = url;
        page.fetched_at = when;
        page.status = 200;
        page.content_type = "text/html; charset=utf-8";
        page.html = decode_body(detail::read_file((base / file).string()), "text/html");
        try {
          validate(page);
        } catch (const Error& e) {
          throw ParseError(lineno, e.what());
        }
        manifest.upsert(std::move(page));
      }
      save_corpus(manifest, out_path);
      err << "imported " << manifest.size() << " records\n";
      return 0;
    }

    if (*features) {
      auto manifest = load_corpus(corpus_path);
      out << '#';
      for (std::size_t i = 0; i < kFeatureColumns.size(); ++i) out << (i ? "\t" : " ") << kFeatureColumns[i];
      out << '\n';
      for (const auto& p : manifest.records()) {
        if (!url_filter.empty() && p.url.find(url_filter) == std::string::npos) continue;
        auto f = extract_features(p);
        out << p.url << '\t' << f.n_links << '\t' << f.n_self_links << '\t' << f.n_lower_links << '\t'
            << f.n_same_links << '\t' << f.n_images << '\t' << f.n_thumbnails << '\t' << f.n_download_links << '\t'
            << f.n_paper_links << '\t' << f.n_dynamic_links << '\t' << f.doc_length << '\t'
            << format_double(f.anchor_alphabet_score) << '\t' << format_double(f.links_per_length) << '\t'
            << format_double(f.text_to_image) << '\t' << detail::tsv_safe(f.title_text) << '\t'
            << detail::tsv_safe(f.heading_text) << '\n';
      }
      return 0;
    }

    if (*relevance) {
      auto manifest = load_corpus(corpus_path);
      auto q = normalize_query(query, detail::load_stops(stoplist_path));
      std::vector<std::pair<double, std::string>> scored;
      for (const auto& p : manifest.records()) {
        if (!detail::is_ok(p)) continue;
        scored.emplace_back(calc_relevance_weight(analyze_page(p).visible_text, q), p.url);
      }
      std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      for (const auto& [score, url] : scored) out << url << '\t' << format_double(score) << '\n';
      return 0;
    }

    if (*hits_cmd) {
      RankOptions ro;
      ro.hits_tol = tol;
      ro.hits_max_iter = max_iter;
      RankingEngine engine(load_corpus(corpus_path), ProfileSet::builtin(), detail::load_stops(stoplist_path), ro);
      auto ev = engine.evaluate(query);
      std::vector<std::size_t> order(ev.graph.size());
      std::iota(order.begin(), order.end(), 0);
      const auto& nodes = ev.graph.nodes();
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ev.scores.authority[a] != ev.scores.authority[b]) return ev.scores.authority[a] > ev.scores.authority[b];
        return nodes[a] < nodes[b];
      });
      out << "# url\thub\tauthority\n";
      for (auto i : order)
        out << nodes[i] << '\t' << format_double(ev.scores.hub[i]) << '\t' << format_double(ev.scores.authority[i])
            << '\n';
      err << "iterations " << ev.scores.iterations << (ev.scores.converged ? ", converged" : ", not converged")
          << "\n";
      return 0;
    }

    if (*rank_cmd) {
      auto type = parse_page_type(type_name);
      RankingEngine engine(load_corpus(corpus_path), detail::load_profiles(profiles_path),
                           detail::load_stops(stoplist_path));
      for (const auto& r : engine.rank(query, type, k))
        out << r.rank << '\t' << format_double(r.score) << '\t' << r.url << '\n';
      return 0;
    }

    if (*cluster) {
      auto manifest = load_corpus(corpus_path);
      auto q = normalize_query(query, detail::load_stops(stoplist_path));
      auto [urls, data] = detail::cluster_rows(manifest, q);
      if (emit_matrix) {
        out << "# url";
        for (auto name : kClusterFeatureNames) out << '\t' << name;
        out << '\n';
        for (std::size_t i = 0; i < urls.size(); ++i) {
          out << urls[i];
          for (double v : data.row(i)) out << '\t' << format_double(v);
          out << '\n';
        }
        return 0;
      }
      FcmOptions fo;
      fo.c = c;
      fo.m = m;
      fo.seed = seed;
      auto model = fcm_fit(data, fo);
      out << "# cluster";
      for (auto name : kClusterFeatureNames) out << '\t' << name;
      out << '\n';
      for (std::size_t kk = 0; kk < model.c; ++kk) {
        out << kk + 1;
        for (double v : model.centers.row(kk)) out << '\t' << format_double(v);
        out << '\n';
      }
      out << "entropy\t" << format_double(classification_entropy(model)) << '\n';
      err << "iterations " << model.iterations << (model.converged ? ", converged" : ", not converged") << "\n";
      return 0;
    }

    if (*train) {
      auto data = detail::read_feature_table(features_path);
      auto labels = detail::read_labels(labels_path);
      MlpOptions mo;
      mo.hidden = hidden;
      mo.epochs = epochs;
      mo.rate = rate;
      mo.seed = seed;
      auto net = mlp_train(data, labels, mo);
      out << "rms_error\t" << format_double(net.rms_error) << '\n';
      return 0;
    }

    if (*serve) {
      auto path = resolve_profiles_path(profiles_path);
      RankingEngine engine(load_corpus(corpus_path), detail::load_profiles(path));
      auto where = parse_bind(bind);
      httplib::Server server;
      install_routes(server, engine, static_dir);
      if (!server.bind_to_port(where.host, where.port)) {
        err << "cannot bind " << bind << "\n";
        return 1;
      }
      err << "listening on " << where.host << ":" << where.port << " (" << engine.corpus().size() << " pages)\n";
      return server.listen_after_bind() ? 0 : 1;
    }

    if (*profiles) {
      if (!check_path.empty()) {
        ProfileSet::from_file(check_path);
        out << check_path << ": ok\n";
      } else {
        out << kBuiltinProfiles;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "flexirank: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace flexirank
