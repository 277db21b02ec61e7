#pragma once

// Attribute registry and per-page-type weight profiles.
//
// Profile files are INI-like: one [section] per page type, then
// `attribute = weight` lines. A trailing `inverted` marks attributes where a
// small value is desirable; they are scaled as 1 - normalised value.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flexirank/error.hpp"
#include "flexirank/url.hpp"

namespace flexirank {

enum class Attribute : std::size_t {
  relevance,
  hub,
  authority,
  title_relevance,
  heading_relevance,
  relevance_density,
  n_links,
  n_self_links,
  n_lower_links,
  n_same_links,
  n_images,
  n_thumbnails,
  n_download_links,
  n_paper_links,
  n_dynamic_links,
  doc_length,
  anchor_alphabet_score,
  links_per_length,
  text_to_image,
};

inline constexpr std::size_t kAttributeCount = 19;

inline constexpr std::array<std::string_view, kAttributeCount> kAttributeNames = {
    "relevance",       "hub",          "authority",        "title_relevance",  "heading_relevance",
    "relevance_density", "n_links",    "n_self_links",     "n_lower_links",    "n_same_links",
    "n_images",        "n_thumbnails", "n_download_links", "n_paper_links",    "n_dynamic_links",
    "doc_length",      "anchor_alphabet_score", "links_per_length", "text_to_image"};

inline std::string_view to_string(Attribute a) { return kAttributeNames[static_cast<std::size_t>(a)]; }

inline std::optional<Attribute> parse_attribute(std::string_view name) {
  for (std::size_t i = 0; i < kAttributeCount; ++i)
    if (kAttributeNames[i] == name) return static_cast<Attribute>(i);
  return std::nullopt;
}

enum class PageType {
  index,
  homepage,
  portal,
  article,
  advertisement,
  research_paper,
  glossary,
  tutorial,
  definition,
  downloads,
  default_type,
};

inline constexpr std::array<std::string_view, 11> kPageTypeNames = {
    "index",    "homepage", "portal",     "article",   "advertisement", "research_paper",
    "glossary", "tutorial", "definition", "downloads", "default"};

inline std::string_view to_string(PageType t) { return kPageTypeNames[static_cast<std::size_t>(t)]; }

inline std::string valid_page_types() {
  std::string s;
  for (auto n : kPageTypeNames) s += (s.empty() ? "" : ", ") + std::string(n);
  return s;
}

/// Throws InvalidArgument naming the valid types.
inline PageType parse_page_type(std::string_view name) {
  for (std::size_t i = 0; i < kPageTypeNames.size(); ++i)
    if (kPageTypeNames[i] == name) return static_cast<PageType>(i);
  throw InvalidArgument("unknown page type '" + std::string(name) + "'; valid types: " + valid_page_types());
}

inline constexpr std::array<Attribute, 3> kMandatoryAttributes = {Attribute::relevance, Attribute::hub,
                                                                  Attribute::authority};

struct ProfileEntry {
  Attribute attribute;
  double weight = 0.0;
  bool inverted = false;

  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

struct TypeProfile {
  PageType page_type = PageType::default_type;
  std::vector<ProfileEntry> entries;  // in file order

  bool selects(Attribute a) const { return entry(a) != nullptr; }

  const ProfileEntry* entry(Attribute a) const {
    for (const auto& e : entries)
      if (e.attribute == a) return &e;
    return nullptr;
  }

  double weight(Attribute a) const {
    const auto* e = entry(a);
    return e ? e->weight : 0.0;
  }

  bool inverted(Attribute a) const {
    const auto* e = entry(a);
    return e && e->inverted;
  }

  /// Sum to 1 within 1e-9, non-negative weights, mandatory attributes present.
  void validate() const {
    double sum = 0.0;
    for (const auto& e : entries) {
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
        throw InvalidArgument("profile " + std::string(to_string(page_type)) + ": negative weight for " +
                              std::string(to_string(e.attribute)));
      sum += e.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw InvalidArgument("profile " + std::string(to_string(page_type)) + ": weights sum to " +
                            std::to_string(sum) + ", expected 1");
    for (auto m : kMandatoryAttributes)
      if (!selects(m))
        throw InvalidArgument("profile " + std::string(to_string(page_type)) + ": mandatory attribute " +
                              std::string(to_string(m)) + " missing");
  }

  friend bool operator==(const TypeProfile&, const TypeProfile&) = default;
};

/// Shipped defaults; data/profiles.ini is a copy of this text.
inline constexpr std::string_view kBuiltinProfiles = R"ini(# flexirank page-type profiles
#
# attribute = weight [inverted]
# Weights in a section sum to 1. relevance, hub and authority are mandatory
# (weight 0 is allowed). "inverted" attributes reward small values.

[index]
relevance = 0.25
hub = 0.40
authority = 0.10
n_links = 0.15
links_per_length = 0.10 inverted

[homepage]
relevance = 0.25
hub = 0.10
authority = 0.20
n_lower_links = 0.30
n_images = 0.15 inverted

[portal]
relevance = 0.25
hub = 0.15
authority = 0.15
n_same_links = 0.45

[article]
relevance = 0.30
hub = 0.0
authority = 0.25
doc_length = 0.20
links_per_length = 0.15 inverted
title_relevance = 0.10

[advertisement]
relevance = 0.15
hub = 0.25
authority = 0.10
n_thumbnails = 0.30
n_dynamic_links = 0.20

[research_paper]
relevance = 0.25
hub = 0.05
authority = 0.15
doc_length = 0.20
n_paper_links = 0.20
links_per_length = 0.15 inverted

[glossary]
relevance = 0.25
hub = 0.10
authority = 0.10
anchor_alphabet_score = 0.55

[tutorial]
relevance = 0.25
hub = 0.05
authority = 0.15
doc_length = 0.30
links_per_length = 0.25 inverted

[definition]
relevance = 0.20
hub = 0.05
authority = 0.10
relevance_density = 0.65

[downloads]
relevance = 0.20
hub = 0.05
authority = 0.10
n_download_links = 0.65

[default]
relevance = 0.20
hub = 0.20
authority = 0.20
title_relevance = 0.025
heading_relevance = 0.025
relevance_density = 0.025
n_links = 0.025
n_self_links = 0.025
n_lower_links = 0.025
n_same_links = 0.025
n_images = 0.025
n_thumbnails = 0.025
n_download_links = 0.025
n_paper_links = 0.025
n_dynamic_links = 0.025
doc_length = 0.025
anchor_alphabet_score = 0.025
links_per_length = 0.025
text_to_image = 0.025
)ini";

class ProfileSet {
 public:
  /// Parses profile text. Sections absent from `text` keep the builtin profile.
  static ProfileSet parse(std::string_view text) { return parse(text, &builtin()); }

  static const ProfileSet& builtin() {
    static const ProfileSet set = parse(kBuiltinProfiles, nullptr);
    return set;
  }

  static ProfileSet from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open profiles " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  const TypeProfile& get(PageType t) const { return profiles_.at(static_cast<std::size_t>(t)); }

 private:
  static ProfileSet parse(std::string_view text, const ProfileSet* fallback) {
    std::array<std::optional<TypeProfile>, kPageTypeNames.size()> parsed;
    std::optional<std::size_t> current;
    std::istringstream in{std::string(text)};
    std::size_t lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
      ++lineno;
      std::string_view line = detail::trim(raw);
      if (line.empty() || line.front() == '#' || line.front() == ';') continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
        auto name = detail::trim(line.substr(1, line.size() - 2));
        PageType t;
        try {
          t = parse_page_type(name);
        } catch (const InvalidArgument& e) {
          throw ParseError(lineno, e.what());
        }
        current = static_cast<std::size_t>(t);
        if (parsed[*current]) throw ParseError(lineno, "duplicate section [" + std::string(name) + "]");
        parsed[*current] = TypeProfile{t, {}};
        continue;
      }
      if (!current) throw ParseError(lineno, "attribute outside of a section");
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError(lineno, "expected attribute = weight");
      auto name = detail::trim(line.substr(0, eq));
      auto attr = parse_attribute(name);
      if (!attr) throw ParseError(lineno, "unknown attribute '" + std::string(name) + "'");
      std::istringstream value{std::string(line.substr(eq + 1))};
      ProfileEntry entry{*attr, 0.0, false};
      if (!(value >> entry.weight)) throw ParseError(lineno, "bad weight for " + std::string(name));
      if (std::string flag; value >> flag) {
        if (flag != "inverted") throw ParseError(lineno, "unexpected token '" + flag + "'");
        entry.inverted = true;
      }
      if (std::string extra; value >> extra) throw ParseError(lineno, "unexpected token '" + extra + "'");
      auto& profile = *parsed[*current];
      if (profile.selects(*attr)) throw ParseError(lineno, "duplicate attribute " + std::string(name));
      profile.entries.push_back(entry);
    }

    ProfileSet set;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      if (parsed[i]) {
        parsed[i]->validate();
        set.profiles_[i] = std::move(*parsed[i]);
      } else if (fallback) {
        set.profiles_[i] = fallback->profiles_[i];
      } else {
        throw ParseError(0, "missing profile [" + std::string(kPageTypeNames[i]) + "]");
      }
    }
    return set;
  }

  std::array<TypeProfile, kPageTypeNames.size()> profiles_{};
};

/// The profile used when a user asks for pages of type `t`.
inline const TypeProfile& select_attributes(PageType t, const ProfileSet& profiles = ProfileSet::builtin()) {
  return profiles.get(t);
}

}  // namespace flexirank
