#pragma once

// Query-phrase relevance. A query is reduced to its non-stop words; every
// contiguous run of those words is a keyword weighted by its surface length
// over the length of the raw query. A document's relevance is the sum over
// keywords of weight times occurrence count, where each keyword is counted
// independently of the others.

#include <algorithm>
#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "flexirank/error.hpp"
#include "flexirank/features.hpp"
#include "flexirank/html.hpp"
#include "flexirank/porter_stemmer.hpp"
#include "flexirank/stoplist.hpp"

namespace flexirank {

struct Keyword {
  std::string term;                // lowercase surface form, words joined by one space
  std::vector<std::string> stems;  // what is matched against documents
  double weight = 0.0;             // length(term) / length(query)
};

struct QueryTerms {
  std::string original;  // trimmed raw query
  std::vector<Keyword> keywords;
  std::shared_ptr<const StopList> stop_list;

  std::size_t count() const noexcept { return keywords.size(); }
};

namespace detail {

struct Word {
  std::string lower;
  std::size_t length = 0;  // code points of the surface form
};

inline bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

inline std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) {
      auto surface = text.substr(start, i - start);
      words.push_back({to_lower(surface), html::utf8_length(surface)});
    }
  }
  return words;
}

inline std::shared_ptr<const StopList> default_stop_list() {
  return {std::shared_ptr<void>{}, &StopList::english()};
}

// Non-overlapping left-to-right occurrences of `needle` in `hay`.
inline std::size_t count_phrase(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i + needle.size() <= hay.size();) {
    bool hit = true;
    for (std::size_t k = 0; k < needle.size() && hit; ++k) hit = hay[i + k] == needle[k];
    if (hit) {
      ++count;
      i += needle.size();
    } else {
      ++i;
    }
  }
  return count;
}

}  // namespace detail

/// Lowercased, stop-word-free, stemmed token sequence of a text.
inline std::vector<std::string> analyze_text(std::string_view text, const StopList& stops) {
  std::vector<std::string> out;
  for (auto& w : detail::split_words(text)) {
    if (stops.contains(w.lower)) continue;
    out.push_back(porter_stem(std::move(w.lower)));
  }
  return out;
}

/// Builds the weighted keyword set of a raw query. Throws EmptyQueryError
/// when nothing remains after stop-word removal.
inline QueryTerms normalize_query(std::string_view raw, std::shared_ptr<const StopList> stops = nullptr) {
  if (!stops) stops = detail::default_stop_list();
  QueryTerms q;
  q.original = std::string(detail::trim(raw));
  q.stop_list = stops;
  if (q.original.empty()) throw EmptyQueryError();

  std::vector<detail::Word> kept;
  for (auto& w : detail::split_words(q.original))
    if (!stops->contains(w.lower)) kept.push_back(std::move(w));
  if (kept.empty()) throw EmptyQueryError();

  const double query_length = double(html::utf8_length(q.original));
  // Longest n-grams first so the full phrase leads and wins duplicate merges.
  for (std::size_t n = kept.size(); n >= 1; --n) {
    for (std::size_t start = 0; start + n <= kept.size(); ++start) {
      Keyword kw;
      std::size_t length = n - 1;  // separating spaces
      for (std::size_t k = start; k < start + n; ++k) {
        if (k > start) kw.term += ' ';
        kw.term += kept[k].lower;
        kw.stems.push_back(porter_stem(kept[k].lower));
        length += kept[k].length;
      }
      bool duplicate = false;
      for (const auto& existing : q.keywords) duplicate = duplicate || existing.stems == kw.stems;
      if (duplicate) continue;
      kw.weight = std::min(1.0, double(length) / query_length);
      q.keywords.push_back(std::move(kw));
    }
  }
  return q;
}

/// Relevance of pre-analysed document tokens (see analyze_text).
inline double relevance_of_tokens(const std::vector<std::string>& tokens, const QueryTerms& q) {
  double total = 0.0;
  for (const auto& kw : q.keywords) total += kw.weight * double(detail::count_phrase(tokens, kw.stems));
  return total;
}

inline double calc_relevance_weight(std::string_view doc_text, const QueryTerms& q) {
  const auto& stops = q.stop_list ? *q.stop_list : StopList::english();
  return relevance_of_tokens(analyze_text(doc_text, stops), q);
}

struct TagRelevance {
  double title = 0.0;
  double heading = 0.0;
};

inline TagRelevance tag_relevance(const DocumentFeatures& features, const QueryTerms& q) {
  return {calc_relevance_weight(features.title_text, q), calc_relevance_weight(features.heading_text, q)};
}

inline TagRelevance tag_relevance(const PageRecord& page, const QueryTerms& q) {
  return tag_relevance(extract_features(page), q);
}

}  // namespace flexirank
