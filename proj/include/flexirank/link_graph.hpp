#pragma once

// HITS over a query neighbourhood: the root result set expanded by the
// corpus pages it links to and the corpus pages linking into it.

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flexirank/corpus.hpp"
#include "flexirank/error.hpp"
#include "flexirank/features.hpp"
#include "flexirank/url.hpp"

namespace flexirank {

class NeighborhoodGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  NeighborhoodGraph() = default;

  /// Self-edges and duplicates are dropped; out-of-range endpoints throw.
  NeighborhoodGraph(std::vector<std::string> nodes, const std::vector<Edge>& edges, std::vector<bool> root = {})
      : nodes_(std::move(nodes)), root_(std::move(root)) {
    root_.resize(nodes_.size(), false);
    in_.resize(nodes_.size());
    out_.resize(nodes_.size());
    std::set<Edge> seen;
    for (auto [from, to] : edges) {
      if (from >= nodes_.size() || to >= nodes_.size()) throw InvalidArgument("edge endpoint out of range");
      if (from == to || !seen.insert({from, to}).second) continue;
      edges_.emplace_back(from, to);
      out_[from].push_back(to);
      in_[to].push_back(from);
    }
  }

  /// Anonymous graph with nodes named "0".."n-1".
  static NeighborhoodGraph from_edges(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return NeighborhoodGraph(std::move(names), edges);
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool is_root(std::size_t i) const { return root_.at(i); }
  const std::vector<std::size_t>& in(std::size_t p) const { return in_.at(p); }
  const std::vector<std::size_t>& out(std::size_t p) const { return out_.at(p); }

  std::optional<std::size_t> index_of(std::string_view url) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), url);
    if (it == nodes_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<bool> root_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::vector<std::size_t>> out_;
};

/// Canonical URL -> distinct non-self out-link targets, for every corpus page.
class LinkIndex {
 public:
  LinkIndex() = default;

  explicit LinkIndex(const CorpusManifest& corpus, const FeatureOptions& options = {}) {
    for (const auto& page : corpus.records()) add(page.url, extract_links(page, options));
  }

  void add(const std::string& url, const std::vector<LinkInfo>& links) {
    auto key = canonical_url(url);
    if (!targets_.contains(key)) order_.push_back(key);
    auto& out = targets_[key];
    out.clear();
    std::set<std::string> seen;
    for (const auto& link : links) {
      if (link.level == LinkLevel::Self) continue;
      auto target = canonical_url(link.target);
      if (target != key && seen.insert(target).second) out.push_back(std::move(target));
    }
  }

  bool contains(const std::string& canonical) const { return targets_.contains(canonical); }
  const std::vector<std::string>& pages() const noexcept { return order_; }

  const std::vector<std::string>& targets(const std::string& canonical) const {
    static const std::vector<std::string> none;
    auto it = targets_.find(canonical);
    return it == targets_.end() ? none : it->second;
  }

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::vector<std::string>> targets_;
};

inline constexpr std::size_t kDefaultRootLimit = 200;

/// Root URLs are taken in rank order and truncated to `root_limit`.
inline NeighborhoodGraph build_neighborhood(std::span<const std::string> root_urls, const LinkIndex& index,
                                            std::size_t root_limit = kDefaultRootLimit) {
  std::vector<std::string> nodes;
  std::vector<bool> is_root;
  std::unordered_map<std::string, std::size_t> position;
  auto add_node = [&](const std::string& url, bool root) {
    auto [it, inserted] = position.emplace(url, nodes.size());
    if (inserted) {
      nodes.push_back(url);
      is_root.push_back(root);
    }
    return it->second;
  };

  std::vector<std::string> roots;
  for (const auto& url : root_urls) {
    if (roots.size() >= root_limit) break;
    auto key = canonical_url(url);
    if (!position.contains(key)) roots.push_back(key);
    add_node(key, true);
  }
  std::set<std::string> root_set(roots.begin(), roots.end());
  for (const auto& r : roots)
    for (const auto& target : index.targets(r))
      if (index.contains(target)) add_node(target, false);
  for (const auto& page : index.pages()) {
    const auto& targets = index.targets(page);
    if (std::any_of(targets.begin(), targets.end(), [&](const std::string& t) { return root_set.contains(t); }))
      add_node(page, false);
  }

  std::vector<NeighborhoodGraph::Edge> edges;
  for (std::size_t from = 0; from < nodes.size(); ++from)
    for (const auto& target : index.targets(nodes[from]))
      if (auto it = position.find(target); it != position.end()) edges.emplace_back(from, it->second);
  return NeighborhoodGraph(std::move(nodes), edges, std::move(is_root));
}

inline NeighborhoodGraph build_neighborhood(std::span<const PageRecord> root, const CorpusManifest& corpus,
                                            std::size_t root_limit = kDefaultRootLimit) {
  std::vector<std::string> urls;
  urls.reserve(root.size());
  for (const auto& page : root) urls.push_back(page.url);
  return build_neighborhood(urls, LinkIndex(corpus), root_limit);
}

struct HubAuthScores {
  std::vector<double> hub;
  std::vector<double> authority;
  std::size_t iterations = 0;
  bool converged = false;
};

inline constexpr double kDefaultHitsTolerance = 1e-8;
inline constexpr std::size_t kDefaultHitsMaxIter = 100;

/// Iterates authority <- sum of in-neighbour hubs, hub <- sum of out-neighbour
/// authorities from all-ones vectors, L2-normalising both each round, until
/// neither vector moves by `tol` (max norm) or `max_iter` rounds have run.
inline HubAuthScores hits(const NeighborhoodGraph& graph, double tol = kDefaultHitsTolerance,
                          std::size_t max_iter = kDefaultHitsMaxIter) {
  if (!(tol > 0.0)) throw InvalidArgument("hits: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("hits: max_iter must be >= 1");
  const std::size_t n = graph.size();
  HubAuthScores s;
  if (graph.edges().empty()) {
    s.hub.assign(n, 0.0);
    s.authority.assign(n, 0.0);
    s.iterations = 1;
    s.converged = true;
    return s;
  }

  auto normalize = [](std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& x : v) x /= norm;
  };

  std::vector<double> hub(n, 1.0), auth(n, 1.0), next_hub(n), next_auth(n);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    for (std::size_t p = 0; p < n; ++p) {
      double sum = 0.0;
      for (auto q : graph.in(p)) sum += hub[q];
      next_auth[p] = sum;
    }
    normalize(next_auth);
    for (std::size_t p = 0; p < n; ++p) {
      double sum = 0.0;
      for (auto q : graph.out(p)) sum += next_auth[q];
      next_hub[p] = sum;
    }
    normalize(next_hub);
    double delta = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      delta = std::max({delta, std::abs(next_auth[p] - auth[p]), std::abs(next_hub[p] - hub[p])});
    auth.swap(next_auth);
    hub.swap(next_hub);
    s.iterations = it;
    if (delta < tol) {
      s.converged = true;
      break;
    }
  }
  s.hub = std::move(hub);
  s.authority = std::move(auth);
  return s;
}

}  // namespace flexirank
