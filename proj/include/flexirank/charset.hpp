#pragma once

// Body decoding for fetched pages. Declared charsets are honoured in the order
// Content-Type header, then <meta charset>, then UTF-8. Undecodable input is
// never an error; invalid sequences become U+FFFD.

#include <iconv.h>

#include <array>
#include <cerrno>
#include <cstdint>
#include <string>
#include <string_view>

#include "flexirank/url.hpp"

namespace flexirank {

namespace detail {

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += char(cp);
  } else if (cp < 0x800) {
    out += char(0xC0 | (cp >> 6));
    out += char(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += char(0xE0 | (cp >> 12));
    out += char(0x80 | ((cp >> 6) & 0x3F));
    out += char(0x80 | (cp & 0x3F));
  } else {
    out += char(0xF0 | (cp >> 18));
    out += char(0x80 | ((cp >> 12) & 0x3F));
    out += char(0x80 | ((cp >> 6) & 0x3F));
    out += char(0x80 | (cp & 0x3F));
  }
}

// Length of the valid UTF-8 sequence starting at s[i], or 0.
inline std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  auto b = [&](std::size_t k) { return std::uint8_t(s[k]); };
  std::uint8_t c = b(i);
  if (c < 0x80) return 1;
  std::size_t len = c >= 0xF0 && c <= 0xF4 ? 4 : c >= 0xE0 ? 3 : c >= 0xC2 && c < 0xE0 ? 2 : 0;
  if (len == 0 || i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k)
    if ((b(i + k) & 0xC0) != 0x80) return 0;
  if (len == 3) {
    if (c == 0xE0 && b(i + 1) < 0xA0) return 0;
    if (c == 0xED && b(i + 1) >= 0xA0) return 0;
  }
  if (len == 4) {
    if (c == 0xF0 && b(i + 1) < 0x90) return 0;
    if (c == 0xF4 && b(i + 1) >= 0x90) return 0;
  }
  return len;
}

inline constexpr std::array<char16_t, 32> kCp1252High = {
    0x20AC, 0xFFFD, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0xFFFD, 0x017D, 0xFFFD, 0xFFFD, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0xFFFD, 0x017E, 0x0178};

inline std::string charset_param(std::string_view text) {
  std::string lower = to_lower(text);
  auto pos = lower.find("charset=");
  if (pos == std::string::npos) return {};
  std::string_view v = std::string_view(lower).substr(pos + 8);
  while (!v.empty() && (v.front() == '"' || v.front() == '\'' || v.front() == ' ')) v.remove_prefix(1);
  auto end = v.find_first_of("\"'; >/\t\r\n");
  return std::string(v.substr(0, end));
}

}  // namespace detail

/// Replaces every invalid UTF-8 sequence with U+FFFD.
inline std::string sanitize_utf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  for (std::size_t i = 0; i < bytes.size();) {
    if (std::size_t n = detail::utf8_sequence_length(bytes, i)) {
      out.append(bytes.substr(i, n));
      i += n;
    } else {
      detail::append_utf8(out, 0xFFFD);
      ++i;
    }
  }
  return out;
}

inline std::string charset_from_content_type(std::string_view content_type) {
  return detail::charset_param(content_type);
}

/// Looks for a charset declaration in the first <meta> tags of a document.
inline std::string sniff_meta_charset(std::string_view html) {
  std::string head = detail::to_lower(html.substr(0, 4096));
  for (std::size_t pos = head.find("<meta"); pos != std::string::npos; pos = head.find("<meta", pos + 5)) {
    auto end = head.find('>', pos);
    std::string_view tag = std::string_view(head).substr(pos, end == std::string::npos ? end : end - pos + 1);
    if (auto cs = detail::charset_param(tag); !cs.empty()) return cs;
  }
  return {};
}

/// Converts `bytes` in `charset` to UTF-8. Unknown charsets fall back to lossy UTF-8.
inline std::string decode_to_utf8(std::string_view bytes, std::string_view charset) {
  std::string cs = detail::to_lower(charset);
  if (cs.empty() || cs == "utf-8" || cs == "utf8" || cs == "us-ascii" || cs == "ascii") return sanitize_utf8(bytes);
  if (cs == "iso-8859-1" || cs == "latin1" || cs == "latin-1" || cs == "windows-1252" || cs == "cp1252") {
    std::string out;
    out.reserve(bytes.size());
    bool cp1252 = cs == "windows-1252" || cs == "cp1252";
    for (unsigned char c : bytes) {
      if (cp1252 && c >= 0x80 && c < 0xA0)
        detail::append_utf8(out, detail::kCp1252High[c - 0x80]);
      else
        detail::append_utf8(out, c);
    }
    return out;
  }
  iconv_t cd = iconv_open("UTF-8", cs.c_str());
  if (cd == reinterpret_cast<iconv_t>(-1)) return sanitize_utf8(bytes);
  std::string out;
  std::string input(bytes);
  char* in = input.data();
  std::size_t in_left = input.size();
  char buf[4096];
  while (in_left > 0) {
    char* o = buf;
    std::size_t o_left = sizeof buf;
    std::size_t rc = iconv(cd, &in, &in_left, &o, &o_left);
    out.append(buf, sizeof buf - o_left);
    if (rc == static_cast<std::size_t>(-1)) {
      if (errno == E2BIG) continue;
      // EILSEQ or truncated input: substitute and skip one byte.
      detail::append_utf8(out, 0xFFFD);
      ++in;
      --in_left;
    }
  }
  iconv_close(cd);
  return sanitize_utf8(out);
}

/// Decodes a response body using the header charset, then the meta charset.
inline std::string decode_body(std::string_view bytes, std::string_view content_type) {
  std::string cs = charset_from_content_type(content_type);
  if (cs.empty()) cs = sniff_meta_charset(bytes);
  return decode_to_utf8(bytes, cs);
}

}  // namespace flexirank
