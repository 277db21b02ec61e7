#pragma once

// Syntactic measurements of a single page: hyperlinks and their position in
// the domain tree, anchor texts, images, visible text and special-tag text.

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "flexirank/corpus.hpp"
#include "flexirank/html.hpp"
#include "flexirank/url.hpp"

namespace flexirank {

/// Position of a link target in the domain tree relative to its source page.
enum class LinkLevel { Self, Lower, Same, Other };

inline std::string_view to_string(LinkLevel level) {
  switch (level) {
    case LinkLevel::Self: return "self";
    case LinkLevel::Lower: return "lower";
    case LinkLevel::Same: return "same";
    case LinkLevel::Other: return "other";
  }
  return "other";
}

struct LinkInfo {
  std::string target;  // absolute, fragment stripped
  std::string anchor_text;
  LinkLevel level = LinkLevel::Other;
  bool is_dynamic = false;
  bool is_download = false;
  bool is_frame = false;
};

struct DocumentFeatures {
  std::size_t n_links = 0;  // a href + frame/iframe src, self-links excluded
  std::size_t n_self_links = 0;
  std::size_t n_lower_links = 0;
  std::size_t n_same_links = 0;
  std::size_t n_images = 0;
  std::size_t n_thumbnails = 0;
  std::size_t n_download_links = 0;
  std::size_t n_paper_links = 0;  // subset of download links ending in .ps or .pdf
  std::size_t n_dynamic_links = 0;
  std::size_t doc_length = 0;  // code points of collapsed visible text
  std::string title_text;
  std::string heading_text;
  double anchor_alphabet_score = 0.0;
  double links_per_length = 0.0;
  double text_to_image = 0.0;

  friend bool operator==(const DocumentFeatures&, const DocumentFeatures&) = default;
};

struct FeatureOptions {
  std::vector<std::string> download_extensions{".zip", ".tar", ".gz", ".exe", ".ps", ".pdf"};
  std::vector<std::string> paper_extensions{".ps", ".pdf"};
  std::vector<std::string> dynamic_extensions{".php", ".asp", ".aspx", ".jsp", ".cgi"};
};

/// Everything measured from one parse of a page.
struct PageAnalysis {
  std::vector<LinkInfo> links;
  DocumentFeatures features;
  std::string visible_text;
};

namespace detail {

inline std::vector<std::string_view> host_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t start = 0;
  for (;;) {
    auto dot = host.find('.', start);
    labels.push_back(host.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return labels;
}

inline bool is_ip_literal(std::string_view host) {
  if (!host.empty() && host.front() == '[') return true;
  return !host.empty() && std::all_of(host.begin(), host.end(), [](unsigned char c) {
    return std::isdigit(c) || c == '.';
  });
}

inline std::string_view directory_of(std::string_view path) {
  auto slash = path.rfind('/');
  return slash == std::string_view::npos ? std::string_view("/") : path.substr(0, slash + 1);
}

inline bool ends_with_any(std::string_view path, const std::vector<std::string>& suffixes) {
  std::string lower = to_lower(path);
  return std::any_of(suffixes.begin(), suffixes.end(), [&](const std::string& s) { return lower.ends_with(s); });
}

inline bool is_single_letter(std::string_view text) {
  return text.size() == 1 && std::isalpha(static_cast<unsigned char>(text[0]));
}

inline bool is_block_tag(std::string_view name) {
  static constexpr std::array<std::string_view, 33> kBlocks = {
      "address", "article", "aside", "blockquote", "body", "br", "dd", "div", "dl", "dt", "fieldset",
      "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr",
      "li", "main", "nav", "ol", "p", "pre", "section", "table", "td", "tr"};
  return std::find(kBlocks.begin(), kBlocks.end(), name) != kBlocks.end() || name == "th" || name == "ul" ||
         name == "option" || name == "img";
}

inline bool is_heading(std::string_view name) {
  return name.size() == 2 && name[0] == 'h' && name[1] >= '1' && name[1] <= '6';
}

}  // namespace detail

/// Classifies `target` relative to the page at `source`. Fragments, scheme and
/// query strings are ignored; hosts are compared case-insensitively together
/// with any non-default port.
///  - self:  same host and path
///  - lower: same host, target path strictly extends the source's directory
///  - same:  sibling host, i.e. only the leftmost label differs under a common
///           parent domain of at least two labels (a.b.com, x.b.com)
///  - other: everything else
inline LinkLevel classify_link_level(const Url& source, const Url& target) {
  if (source.host == target.host && source.port == target.port) {
    if (source.path == target.path) return LinkLevel::Self;
    auto dir = detail::directory_of(source.path);
    if (target.path.size() > dir.size() && target.path.starts_with(dir)) return LinkLevel::Lower;
    return LinkLevel::Other;
  }
  if (detail::is_ip_literal(source.host) || detail::is_ip_literal(target.host)) return LinkLevel::Other;
  auto a = detail::host_labels(source.host);
  auto b = detail::host_labels(target.host);
  if (a.size() != b.size() || a.size() < 3 || a.front() == b.front()) return LinkLevel::Other;
  if (!std::equal(a.begin() + 1, a.end(), b.begin() + 1)) return LinkLevel::Other;
  return LinkLevel::Same;
}

/// String overload; unparseable input classifies as other.
inline LinkLevel classify_link_level(std::string_view source, std::string_view target) {
  auto s = parse_url(source);
  auto t = parse_url(target);
  if (!s || !t) return LinkLevel::Other;
  return classify_link_level(*s, *t);
}

/// Single tolerant parse of the page, producing links, features and visible text.
inline PageAnalysis analyze_page(const PageRecord& page, const FeatureOptions& options = {}) {
  PageAnalysis out;
  auto page_url = parse_url(page.url);
  if (!page_url) return out;
  page_url->fragment.reset();
  Url base = *page_url;

  std::string visible;
  std::string title;
  std::string headings;
  int skip_depth = 0;  // inside script/style/noscript/template
  bool in_title = false;
  bool in_head = false;
  int heading_depth = 0;
  std::optional<std::size_t> open_anchor;  // index into out.links
  std::string anchor_buf;
  std::size_t a_href_count = 0;
  std::size_t alphabet_anchors = 0;
  bool base_seen = false;

  auto close_anchor = [&] {
    if (!open_anchor) return;
    auto text = html::collapse_whitespace(anchor_buf);
    if (detail::is_single_letter(text)) ++alphabet_anchors;
    out.links[*open_anchor].anchor_text = std::move(text);
    open_anchor.reset();
    anchor_buf.clear();
  };

  auto add_link = [&](std::string_view href, bool frame) -> bool {
    auto trimmed = detail::trim(href);
    if (trimmed.empty()) return false;
    auto target = resolve_url(base, trimmed);
    if (!target || !target->is_http()) return false;
    target->fragment.reset();
    LinkInfo link;
    link.level = classify_link_level(*page_url, *target);
    link.is_frame = frame;
    link.is_download = detail::ends_with_any(target->path, options.download_extensions);
    link.is_dynamic = target->query.has_value() || detail::ends_with_any(target->path, options.dynamic_extensions);
    link.target = target->without_fragment();
    out.links.push_back(std::move(link));
    return true;
  };

  for (const auto& tok : html::tokenize(page.html)) {
    switch (tok.kind) {
      case html::TokenKind::Comment:
        break;
      case html::TokenKind::Text:
        if (skip_depth > 0) break;
        if (in_title) {
          title += tok.text;
          break;
        }
        if (in_head) break;
        visible += tok.text;
        if (open_anchor) anchor_buf += tok.text;
        if (heading_depth > 0) headings += tok.text;
        break;
      case html::TokenKind::StartTag: {
        const auto& name = tok.name;
        if (name == "script" || name == "style" || name == "noscript" || name == "template") {
          if (!tok.self_closing) ++skip_depth;
          break;
        }
        if (name == "head") in_head = true;
        if (name == "body") in_head = false;
        if (name == "title") in_title = !tok.self_closing;
        if (name == "base" && !base_seen) {
          if (const auto* href = tok.attribute("href")) {
            if (auto b = resolve_url(*page_url, *href); b && b->is_http()) {
              base = *b;
              base_seen = true;
            }
          }
        }
        if (detail::is_block_tag(name)) {
          visible += ' ';
          if (open_anchor) anchor_buf += ' ';
          if (heading_depth > 0) headings += ' ';
        }
        if (detail::is_heading(name)) {
          ++heading_depth;
          headings += ' ';
        }
        if (name == "a") {
          close_anchor();  // anchors do not nest
          if (const auto* href = tok.attribute("href")) {
            if (add_link(*href, false)) {
              ++a_href_count;
              open_anchor = out.links.size() - 1;
              if (tok.self_closing) close_anchor();
            }
          }
        } else if (name == "frame" || name == "iframe") {
          if (const auto* src = tok.attribute("src")) add_link(*src, true);
        } else if (name == "img") {
          ++out.features.n_images;
          if (open_anchor) ++out.features.n_thumbnails;
        }
        break;
      }
      case html::TokenKind::EndTag: {
        const auto& name = tok.name;
        if (name == "script" || name == "style" || name == "noscript" || name == "template") {
          if (skip_depth > 0) --skip_depth;
          break;
        }
        if (name == "head") in_head = false;
        if (name == "title") in_title = false;
        if (name == "a") close_anchor();
        if (detail::is_heading(name) && heading_depth > 0) {
          --heading_depth;
          headings += ' ';
        }
        if (detail::is_block_tag(name)) {
          visible += ' ';
          if (open_anchor) anchor_buf += ' ';
        }
        break;
      }
    }
  }
  close_anchor();

  auto& f = out.features;
  out.visible_text = html::collapse_whitespace(visible);
  f.title_text = html::collapse_whitespace(title);
  f.heading_text = html::collapse_whitespace(headings);
  f.doc_length = html::utf8_length(out.visible_text);
  for (const auto& link : out.links) {
    if (link.level == LinkLevel::Self) {
      ++f.n_self_links;
      continue;
    }
    ++f.n_links;
    if (link.level == LinkLevel::Lower) ++f.n_lower_links;
    if (link.level == LinkLevel::Same) ++f.n_same_links;
    if (link.is_download) {
      ++f.n_download_links;
      if (detail::ends_with_any(parse_url(link.target)->path, options.paper_extensions)) ++f.n_paper_links;
    }
    if (link.is_dynamic) ++f.n_dynamic_links;
  }
  f.anchor_alphabet_score = a_href_count ? double(alphabet_anchors) / double(a_href_count) : 0.0;
  f.links_per_length = double(f.n_links) / double(std::max<std::size_t>(f.doc_length, 1));
  f.text_to_image = double(f.doc_length) / double(std::max<std::size_t>(f.n_images, 1));
  return out;
}

/// One LinkInfo per `a href`, `frame src` and `iframe src` with an http(s)
/// target, self-links included.
inline std::vector<LinkInfo> extract_links(const PageRecord& page, const FeatureOptions& options = {}) {
  return analyze_page(page, options).links;
}

inline DocumentFeatures extract_features(const PageRecord& page, const FeatureOptions& options = {}) {
  return analyze_page(page, options).features;
}

}  // namespace flexirank
