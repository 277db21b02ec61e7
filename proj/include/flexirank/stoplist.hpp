#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_set>

#include "flexirank/error.hpp"
#include "flexirank/url.hpp"

namespace flexirank {

/// Set of lowercase function words removed from queries and documents before
/// term matching.
class StopList {
 public:
  StopList() = default;
  StopList(std::initializer_list<std::string_view> words) {
    for (auto w : words) add(w);
  }

  /// The shipped English list.
  static const StopList& english() {
    static const StopList list{
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
        "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
        "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
        "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
        "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just",
        "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once",
        "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she",
        "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
        "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too",
        "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
        "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
        "yourselves"};
    return list;
  }

  /// One word per line; blank lines and lines starting with '#' are skipped.
  static StopList from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open stop list " + path);
    StopList list;
    for (std::string line; std::getline(in, line);) {
      auto word = detail::trim(line);
      if (word.empty() || word.front() == '#') continue;
      list.add(word);
    }
    return list;
  }

  void add(std::string_view word) { words_.insert(detail::to_lower(word)); }
  bool contains(std::string_view lowercase_word) const { return words_.contains(std::string(lowercase_word)); }
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

}  // namespace flexirank
