#pragma once

// Error-tolerant HTML tokenizer. It never fails: anything that does not look
// like markup is emitted as text, unterminated constructs run to end of input.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flexirank/charset.hpp"
#include "flexirank/url.hpp"

namespace flexirank::html {

enum class TokenKind { StartTag, EndTag, Text, Comment };

struct Attribute {
  std::string name;  // lowercase
  std::string value;  // entities decoded
};

struct Token {
  TokenKind kind = TokenKind::Text;
  std::string name;  // lowercase tag name for tags
  std::vector<Attribute> attributes;
  std::string text;  // decoded text for Text, raw body for Comment
  bool self_closing = false;

  const std::string* attribute(std::string_view key) const {
    for (const auto& a : attributes)
      if (a.name == key) return &a.value;
    return nullptr;
  }
};

namespace detail {

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

inline constexpr NamedEntity kEntities[] = {
    {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
    {"nbsp", 0xA0},    {"copy", 0xA9},    {"reg", 0xAE},     {"trade", 0x2122}, {"mdash", 0x2014},
    {"ndash", 0x2013}, {"hellip", 0x2026}, {"laquo", 0xAB},  {"raquo", 0xBB},   {"lsquo", 0x2018},
    {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"middot", 0xB7},  {"bull", 0x2022},
    {"eacute", 0xE9},  {"egrave", 0xE8},  {"aacute", 0xE1},  {"uuml", 0xFC},    {"ouml", 0xF6},
    {"auml", 0xE4},    {"szlig", 0xDF},   {"euro", 0x20AC},  {"deg", 0xB0},     {"times", 0xD7},
};

inline bool is_tag_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == ':' || c == '_';
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

// Position of the first "</name" (case-insensitive) at or after `from`.
inline std::size_t find_end_tag(std::string_view html, std::size_t from, std::string_view name) {
  for (std::size_t pos = html.find("</", from); pos != std::string_view::npos; pos = html.find("</", pos + 2)) {
    if (pos + 2 + name.size() > html.size()) return std::string_view::npos;
    bool match = true;
    for (std::size_t k = 0; k < name.size() && match; ++k)
      match = std::tolower(static_cast<unsigned char>(html[pos + 2 + k])) == name[k];
    if (match) return pos;
  }
  return std::string_view::npos;
}

}  // namespace detail

/// Decodes character references; unknown ones are kept verbatim.
inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += s[i++];
      continue;
    }
    std::string_view ref = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    bool ok = false;
    if (ref.size() > 1 && ref[0] == '#') {
      bool hex = ref[1] == 'x' || ref[1] == 'X';
      std::string_view digits = ref.substr(hex ? 2 : 1);
      ok = !digits.empty();
      for (char c : digits) {
        int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                : hex && std::isxdigit(static_cast<unsigned char>(c))
                    ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
                    : -1;
        if (d < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + char32_t(d);
      }
      if (ok && (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) cp = 0xFFFD;
    } else {
      for (const auto& e : detail::kEntities)
        if (e.name == ref) {
          cp = e.cp;
          ok = true;
          break;
        }
    }
    if (!ok) {
      out += s[i++];
      continue;
    }
    flexirank::detail::append_utf8(out, cp);
    i = semi + 1;
  }
  return out;
}

inline std::vector<Token> tokenize(std::string_view html) {
  std::vector<Token> tokens;
  std::string pending_text;
  auto flush_text = [&] {
    if (pending_text.empty()) return;
    Token t;
    t.kind = TokenKind::Text;
    t.text = decode_entities(pending_text);
    tokens.push_back(std::move(t));
    pending_text.clear();
  };

  const std::size_t n = html.size();
  std::size_t i = 0;
  while (i < n) {
    char c = html[i];
    if (c != '<' || i + 1 >= n) {
      pending_text += c;
      ++i;
      continue;
    }
    char next = html[i + 1];
    if (html.substr(i, 4) == "<!--") {
      flush_text();
      auto end = html.find("-->", i + 4);
      Token t;
      t.kind = TokenKind::Comment;
      t.text = std::string(html.substr(i + 4, end == std::string_view::npos ? std::string_view::npos : end - i - 4));
      tokens.push_back(std::move(t));
      i = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    if (next == '!' || next == '?') {
      flush_text();
      auto end = html.find('>', i + 2);
      i = end == std::string_view::npos ? n : end + 1;
      continue;
    }
    bool closing = next == '/';
    std::size_t name_start = i + (closing ? 2 : 1);
    if (name_start >= n || !std::isalpha(static_cast<unsigned char>(html[name_start]))) {
      pending_text += c;
      ++i;
      continue;
    }
    flush_text();
    std::size_t p = name_start;
    while (p < n && detail::is_tag_char(html[p])) ++p;
    Token tag;
    tag.kind = closing ? TokenKind::EndTag : TokenKind::StartTag;
    tag.name = flexirank::detail::to_lower(html.substr(name_start, p - name_start));

    // Attributes.
    while (p < n && html[p] != '>') {
      if (detail::is_space(html[p])) {
        ++p;
        continue;
      }
      if (html[p] == '/') {
        if (p + 1 < n && html[p + 1] == '>') tag.self_closing = true;
        ++p;
        continue;
      }
      std::size_t an = p;
      while (p < n && !detail::is_space(html[p]) && html[p] != '>' && html[p] != '=' &&
             !(html[p] == '/' && p + 1 < n && html[p + 1] == '>'))
        ++p;
      if (p == an) {  // stray '='
        ++p;
        continue;
      }
      Attribute attr;
      attr.name = flexirank::detail::to_lower(html.substr(an, p - an));
      while (p < n && detail::is_space(html[p])) ++p;
      if (p < n && html[p] == '=') {
        ++p;
        while (p < n && detail::is_space(html[p])) ++p;
        if (p < n && (html[p] == '"' || html[p] == '\'')) {
          char q = html[p++];
          auto end = html.find(q, p);
          if (end == std::string_view::npos) end = n;
          attr.value = decode_entities(html.substr(p, end - p));
          p = end == n ? n : end + 1;
        } else {
          std::size_t vs = p;
          while (p < n && !detail::is_space(html[p]) && html[p] != '>') ++p;
          attr.value = decode_entities(html.substr(vs, p - vs));
        }
      }
      if (!closing) tag.attributes.push_back(std::move(attr));
    }
    i = p < n ? p + 1 : n;

    std::string name = tag.name;
    bool opened = tag.kind == TokenKind::StartTag && !tag.self_closing;
    tokens.push_back(std::move(tag));

    // Raw text and escapable raw text elements run to their end tag.
    bool raw = name == "script" || name == "style";
    bool rcdata = name == "title" || name == "textarea";
    if (opened && (raw || rcdata)) {
      auto end = detail::find_end_tag(html, i, name);
      std::string_view body = html.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i);
      if (!body.empty()) {
        Token t;
        t.kind = TokenKind::Text;
        t.text = rcdata ? decode_entities(body) : std::string(body);
        tokens.push_back(std::move(t));
      }
      if (end == std::string_view::npos) {
        i = n;
      } else {
        Token close;
        close.kind = TokenKind::EndTag;
        close.name = name;
        tokens.push_back(std::move(close));
        auto gt = html.find('>', end);
        i = gt == std::string_view::npos ? n : gt + 1;
      }
    }
  }
  flush_text();
  return tokens;
}

/// Collapses whitespace runs (including U+00A0) to one space and trims.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool space = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    bool ws = detail::is_space(char(c)) || c == '\v';
    if (c == 0xC2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xA0) {
      ws = true;
      ++i;
    }
    if (ws) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += char(c);
  }
  return out;
}

/// Number of Unicode code points in a UTF-8 string.
inline std::size_t utf8_length(std::string_view s) {
  std::size_t count = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++count;
  return count;
}

}  // namespace flexirank::html
