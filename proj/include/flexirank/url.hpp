#pragma once

// Minimal RFC 3986 URL handling: parsing, reference resolution and the
// canonical form used to compare pages and link targets.

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flexirank {

struct Url {
  std::string scheme;  // lowercase
  std::string host;    // lowercase, no trailing dot
  std::string port;    // empty when absent or equal to the scheme default
  std::string path;    // "/" when empty on a hierarchical URL
  std::optional<std::string> query;
  std::optional<std::string> fragment;
  std::string userinfo;

  bool is_http() const { return scheme == "http" || scheme == "https"; }

  /// Serialised form without the fragment.
  std::string without_fragment() const {
    std::string out = scheme + "://";
    if (!userinfo.empty()) out += userinfo + "@";
    out += host;
    if (!port.empty()) out += ":" + port;
    out += path;
    if (query) out += "?" + *query;
    return out;
  }

  std::string str() const {
    std::string out = without_fragment();
    if (fragment) out += "#" + *fragment;
    return out;
  }

  friend bool operator==(const Url&, const Url&) = default;
};

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string_view trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string default_port(std::string_view scheme) {
  if (scheme == "http") return "80";
  if (scheme == "https") return "443";
  return {};
}

// RFC 3986 section 5.2.4.
inline std::string remove_dot_segments(std::string_view input) {
  std::vector<std::string> out;
  bool absolute = !input.empty() && input.front() == '/';
  bool trailing = false;
  std::size_t pos = absolute ? 1 : 0;
  while (pos <= input.size()) {
    std::size_t next = input.find('/', pos);
    if (next == std::string_view::npos) next = input.size();
    std::string_view seg = input.substr(pos, next - pos);
    bool last = next == input.size();
    trailing = false;
    if (seg == ".") {
      trailing = true;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing = true;
    } else {
      out.emplace_back(seg);
    }
    if (last) break;
    pos = next + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) result += '/';
    result += out[i];
  }
  if (trailing && !out.empty() && !result.ends_with('/')) result += '/';
  return result;
}

struct RawReference {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

inline RawReference split_reference(std::string_view s) {
  RawReference r;
  if (auto hash = s.find('#'); hash != std::string_view::npos) {
    r.fragment = std::string(s.substr(hash + 1));
    s = s.substr(0, hash);
  }
  if (auto q = s.find('?'); q != std::string_view::npos) {
    r.query = std::string(s.substr(q + 1));
    s = s.substr(0, q);
  }
  auto colon = s.find(':');
  if (colon != std::string_view::npos && colon > 0 && std::isalpha(static_cast<unsigned char>(s[0]))) {
    bool valid = std::all_of(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(colon), [](unsigned char c) {
      return std::isalnum(c) || c == '+' || c == '-' || c == '.';
    });
    auto slash = s.find('/');
    if (valid && (slash == std::string_view::npos || colon < slash)) {
      r.scheme = to_lower(s.substr(0, colon));
      s = s.substr(colon + 1);
    }
  }
  if (s.starts_with("//")) {
    s.remove_prefix(2);
    auto end = s.find('/');
    if (end == std::string_view::npos) end = s.size();
    r.authority = std::string(s.substr(0, end));
    s = s.substr(end);
  }
  r.path = std::string(s);
  return r;
}

inline bool split_authority(std::string_view auth, std::string_view scheme, Url& url) {
  if (auto at = auth.rfind('@'); at != std::string_view::npos) {
    url.userinfo = std::string(auth.substr(0, at));
    auth = auth.substr(at + 1);
  }
  std::string_view host = auth;
  std::string_view port;
  if (!auth.empty() && auth.front() == '[') {
    auto close = auth.find(']');
    if (close == std::string_view::npos) return false;
    host = auth.substr(0, close + 1);
    auto rest = auth.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') return false;
      port = rest.substr(1);
    }
  } else if (auto colon = auth.rfind(':'); colon != std::string_view::npos) {
    host = auth.substr(0, colon);
    port = auth.substr(colon + 1);
  }
  if (!std::all_of(port.begin(), port.end(), [](unsigned char c) { return std::isdigit(c); })) return false;
  while (port.size() > 1 && port.front() == '0') port.remove_prefix(1);
  url.host = to_lower(host);
  while (!url.host.empty() && url.host.back() == '.') url.host.pop_back();
  url.port = std::string(port);
  if (url.port == default_port(scheme)) url.port.clear();
  return !url.host.empty();
}

inline std::optional<Url> build(std::string scheme, const std::string& authority, std::string path,
                                std::optional<std::string> query, std::optional<std::string> fragment) {
  Url url;
  url.scheme = std::move(scheme);
  if (!split_authority(authority, url.scheme, url)) return std::nullopt;
  url.path = remove_dot_segments(path);
  if (url.path.empty()) url.path = "/";
  url.query = std::move(query);
  url.fragment = std::move(fragment);
  return url;
}

}  // namespace detail

/// Parses an absolute URL with an authority component. Whitespace around the
/// input is ignored; returns nullopt for relative references.
inline std::optional<Url> parse_url(std::string_view text) {
  auto ref = detail::split_reference(detail::trim(text));
  if (!ref.scheme || !ref.authority) return std::nullopt;
  return detail::build(*ref.scheme, *ref.authority, ref.path, ref.query, ref.fragment);
}

/// Resolves `reference` against `base` (RFC 3986 section 5.2.2). Returns nullopt
/// when the result has no authority (mailto:, javascript: and friends).
inline std::optional<Url> resolve_url(const Url& base, std::string_view reference) {
  auto ref = detail::split_reference(detail::trim(reference));
  if (ref.scheme) {
    if (!ref.authority) return std::nullopt;
    return detail::build(*ref.scheme, *ref.authority, ref.path, ref.query, ref.fragment);
  }
  std::string authority = base.userinfo.empty() ? base.host : base.userinfo + "@" + base.host;
  if (!base.port.empty()) authority += ":" + base.port;
  if (ref.authority) return detail::build(base.scheme, *ref.authority, ref.path, ref.query, ref.fragment);

  std::string path;
  std::optional<std::string> query;
  if (ref.path.empty()) {
    path = base.path;
    query = ref.query ? ref.query : base.query;
  } else {
    if (ref.path.front() == '/') {
      path = ref.path;
    } else {
      auto slash = base.path.rfind('/');
      path = (slash == std::string::npos ? std::string("/") : base.path.substr(0, slash + 1)) + ref.path;
    }
    query = ref.query;
  }
  return detail::build(base.scheme, authority, path, query, ref.fragment);
}

/// Canonical string used as the identity of a page: parsed, fragment dropped.
/// Unparseable input is returned trimmed and unchanged.
inline std::string canonical_url(std::string_view text) {
  if (auto url = parse_url(text)) return url->without_fragment();
  return std::string(detail::trim(text));
}

}  // namespace flexirank
