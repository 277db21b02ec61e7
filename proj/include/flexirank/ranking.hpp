#pragma once

// Type-sensitive ranking: measure every registry attribute for the pages that
// match a query, min-max normalise across that candidate set, and score each
// page by the weighted average prescribed by the requested page type.

#include <algorithm>
#include <array>
#include <cstdio>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "flexirank/corpus.hpp"
#include "flexirank/features.hpp"
#include "flexirank/link_graph.hpp"
#include "flexirank/profiles.hpp"
#include "flexirank/relevance.hpp"

namespace flexirank {

struct FeatureVector {
  std::string url;
  std::array<double, kAttributeCount> values{};

  double& operator[](Attribute a) { return values[static_cast<std::size_t>(a)]; }
  double operator[](Attribute a) const { return values[static_cast<std::size_t>(a)]; }

  /// Throws InvalidArgument for names outside the registry.
  double value(std::string_view name) const {
    auto a = parse_attribute(name);
    if (!a) throw InvalidArgument("unknown attribute '" + std::string(name) + "'");
    return (*this)[*a];
  }
};

struct Contribution {
  Attribute attribute;
  double value = 0.0;  // weight * normalised value
};

struct RankedResult {
  std::string url;
  double score = 0.0;
  std::vector<Contribution> contributions;  // profile order
  std::size_t rank = 0;
};

/// Copies `features`, relevance scores and HITS scores into a FeatureVector.
inline FeatureVector make_feature_vector(std::string url, const DocumentFeatures& f, double relevance,
                                         const TagRelevance& tags, double hub, double authority) {
  FeatureVector v;
  v.url = std::move(url);
  v[Attribute::relevance] = relevance;
  v[Attribute::hub] = hub;
  v[Attribute::authority] = authority;
  v[Attribute::title_relevance] = tags.title;
  v[Attribute::heading_relevance] = tags.heading;
  v[Attribute::relevance_density] = relevance / double(std::max<std::size_t>(f.doc_length, 1));
  v[Attribute::n_links] = double(f.n_links);
  v[Attribute::n_self_links] = double(f.n_self_links);
  v[Attribute::n_lower_links] = double(f.n_lower_links);
  v[Attribute::n_same_links] = double(f.n_same_links);
  v[Attribute::n_images] = double(f.n_images);
  v[Attribute::n_thumbnails] = double(f.n_thumbnails);
  v[Attribute::n_download_links] = double(f.n_download_links);
  v[Attribute::n_paper_links] = double(f.n_paper_links);
  v[Attribute::n_dynamic_links] = double(f.n_dynamic_links);
  v[Attribute::doc_length] = double(f.doc_length);
  v[Attribute::anchor_alphabet_score] = f.anchor_alphabet_score;
  v[Attribute::links_per_length] = f.links_per_length;
  v[Attribute::text_to_image] = f.text_to_image;
  return v;
}

/// Min-max scales every attribute to [0,1] across the candidates. Constant
/// attributes become 0. Attributes the profile marks inverted become 1 - x.
inline std::vector<FeatureVector> normalize_features(std::vector<FeatureVector> vectors,
                                                     const TypeProfile* profile = nullptr) {
  if (vectors.empty()) return vectors;
  for (std::size_t a = 0; a < kAttributeCount; ++a) {
    auto attr = static_cast<Attribute>(a);
    double lo = vectors.front().values[a], hi = lo;
    for (const auto& v : vectors) {
      lo = std::min(lo, v.values[a]);
      hi = std::max(hi, v.values[a]);
    }
    bool invert = profile && profile->inverted(attr);
    for (auto& v : vectors) {
      if (!(hi > lo)) {
        v.values[a] = 0.0;
        continue;
      }
      double x = (v.values[a] - lo) / (hi - lo);
      v.values[a] = invert ? 1.0 - x : x;
    }
  }
  return vectors;
}

/// Weighted average of normalised values; sorted by score descending, ties by URL.
inline std::vector<RankedResult> score_candidates(const std::vector<FeatureVector>& normalized,
                                                  const TypeProfile& profile) {
  std::vector<RankedResult> results;
  results.reserve(normalized.size());
  for (const auto& v : normalized) {
    RankedResult r;
    r.url = v.url;
    for (const auto& e : profile.entries) {
      double c = e.weight * v[e.attribute];
      r.contributions.push_back({e.attribute, c});
      r.score += c;
    }
    r.score = std::clamp(r.score, 0.0, 1.0);
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(), [](const RankedResult& a, const RankedResult& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.url < b.url;
  });
  for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = i + 1;
  return results;
}

struct RankOptions {
  std::size_t root_limit = kDefaultRootLimit;
  double hits_tol = kDefaultHitsTolerance;
  std::size_t hits_max_iter = kDefaultHitsMaxIter;
};

/// Everything computed for one query, kept for inspection and the CLI.
struct QueryEvaluation {
  QueryTerms query;
  std::vector<FeatureVector> measured;  // raw values, candidates only, corpus order
  NeighborhoodGraph graph;
  HubAuthScores scores;
};

/// Holds a corpus with every page parsed once. Immutable after construction,
/// so concurrent rank() calls are safe.
class RankingEngine {
 public:
  explicit RankingEngine(CorpusManifest corpus, ProfileSet profiles = ProfileSet::builtin(),
                         std::shared_ptr<const StopList> stops = nullptr, RankOptions options = {},
                         FeatureOptions feature_options = {})
      : corpus_(std::move(corpus)),
        profiles_(std::move(profiles)),
        stops_(stops ? std::move(stops) : detail::default_stop_list()),
        options_(options) {
    for (const auto& page : corpus_.records()) {
      if (page.status < 200 || page.status >= 300) continue;
      Page p;
      p.url = canonical_url(page.url);
      auto analysis = analyze_page(page, feature_options);
      p.tokens = analyze_text(analysis.visible_text, *stops_);
      p.features = std::move(analysis.features);
      links_.add(p.url, analysis.links);
      pages_.push_back(std::move(p));
    }
  }

  const CorpusManifest& corpus() const noexcept { return corpus_; }
  const ProfileSet& profiles() const noexcept { return profiles_; }
  const std::shared_ptr<const StopList>& stop_list() const noexcept { return stops_; }
  const LinkIndex& link_index() const noexcept { return links_; }

  /// Measures all attributes for the pages with positive relevance.
  QueryEvaluation evaluate(std::string_view raw_query) const {
    QueryEvaluation ev;
    ev.query = normalize_query(raw_query, stops_);

    struct Scored {
      std::size_t page;
      double relevance;
    };
    std::vector<Scored> matches;
    for (std::size_t i = 0; i < pages_.size(); ++i) {
      double r = relevance_of_tokens(pages_[i].tokens, ev.query);
      if (r > 0.0) matches.push_back({i, r});
    }
    std::vector<Scored> by_relevance = matches;
    std::stable_sort(by_relevance.begin(), by_relevance.end(), [&](const Scored& a, const Scored& b) {
      if (a.relevance != b.relevance) return a.relevance > b.relevance;
      return pages_[a.page].url < pages_[b.page].url;
    });
    std::vector<std::string> root;
    for (const auto& s : by_relevance) root.push_back(pages_[s.page].url);

    if (!root.empty()) {
      ev.graph = build_neighborhood(root, links_, options_.root_limit);
      ev.scores = hits(ev.graph, options_.hits_tol, options_.hits_max_iter);
    }
    std::unordered_map<std::string, std::size_t> node_of;
    for (std::size_t i = 0; i < ev.graph.size(); ++i) node_of.emplace(ev.graph.nodes()[i], i);

    for (const auto& s : matches) {
      const auto& p = pages_[s.page];
      double hub = 0.0, auth = 0.0;
      if (auto it = node_of.find(p.url); it != node_of.end()) {
        hub = ev.scores.hub[it->second];
        auth = ev.scores.authority[it->second];
      }
      ev.measured.push_back(
          make_feature_vector(p.url, p.features, s.relevance, tag_relevance(p.features, ev.query), hub, auth));
    }
    return ev;
  }

  /// Top-k pages for `raw_query` under the profile of `type`.
  std::vector<RankedResult> rank(std::string_view raw_query, PageType type, std::size_t k = 10) const {
    if (k < 1) throw InvalidArgument("k must be >= 1");
    auto ev = evaluate(raw_query);
    const auto& profile = select_attributes(type, profiles_);
    auto results = score_candidates(normalize_features(std::move(ev.measured), &profile), profile);
    if (results.size() > k) results.resize(k);
    return results;
  }

 private:
  struct Page {
    std::string url;
    std::vector<std::string> tokens;
    DocumentFeatures features;
  };

  CorpusManifest corpus_;
  ProfileSet profiles_;
  std::shared_ptr<const StopList> stops_;
  RankOptions options_;
  std::vector<Page> pages_;
  LinkIndex links_;
};

inline std::vector<RankedResult> rank(std::string_view query, PageType type, const CorpusManifest& corpus,
                                      std::size_t k = 10, const ProfileSet& profiles = ProfileSet::builtin()) {
  return RankingEngine(corpus, profiles).rank(query, type, k);
}

}  // namespace flexirank
