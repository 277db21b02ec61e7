#pragma once

// PageRecord and the line-delimited corpus file.
//
// One record per line, tab-separated, in this order:
//   url  fetched_at (RFC 3339, UTC)  status  content_type  base64(html)
// Lines starting with '#' and blank lines are ignored.

#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flexirank/error.hpp"
#include "flexirank/url.hpp"

namespace flexirank {

using Timestamp = std::chrono::sys_seconds;

struct PageRecord {
  std::string url;
  std::string html;
  Timestamp fetched_at{};
  int status = 0;
  std::string content_type;

  friend bool operator==(const PageRecord&, const PageRecord&) = default;
};

/// Throws InvalidArgument when the record violates its invariants.
inline void validate(const PageRecord& page) {
  auto url = parse_url(page.url);
  if (!url || !url->is_http()) throw InvalidArgument("not an absolute http(s) url: " + page.url);
  if (page.status >= 200 && page.status < 300 && page.html.empty())
    throw InvalidArgument("empty body for 2xx record: " + page.url);
}

/// Ordered set of pages keyed by URL; inserting an existing URL replaces the
/// earlier record in place.
class CorpusManifest {
 public:
  std::string source_note;

  const std::vector<PageRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  void upsert(PageRecord page) {
    if (auto it = index_.find(page.url); it != index_.end()) {
      records_[it->second] = std::move(page);
      return;
    }
    index_.emplace(page.url, records_.size());
    records_.push_back(std::move(page));
  }

  bool contains(std::string_view url) const { return index_.contains(std::string(url)); }

  const PageRecord* find(std::string_view url) const {
    auto it = index_.find(std::string(url));
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  friend bool operator==(const CorpusManifest& a, const CorpusManifest& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<PageRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    std::uint32_t v = (std::uint32_t(std::uint8_t(bytes[i])) << 16) |
                      (std::uint32_t(std::uint8_t(bytes[i + 1])) << 8) | std::uint8_t(bytes[i + 2]);
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += kBase64Alphabet[v & 63];
  }
  if (std::size_t rest = bytes.size() - i; rest) {
    std::uint32_t v = std::uint32_t(std::uint8_t(bytes[i])) << 16;
    if (rest == 2) v |= std::uint32_t(std::uint8_t(bytes[i + 1])) << 8;
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += rest == 2 ? kBase64Alphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

/// Strict decoder: length must be a multiple of 4, padding only at the end.
inline std::optional<std::string> base64_decode(std::string_view text) {
  static const auto table = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    for (std::size_t i = 0; i < kBase64Alphabet.size(); ++i) t[std::uint8_t(kBase64Alphabet[i])] = int(i);
    return t;
  }();
  if (text.size() % 4) return std::nullopt;
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    bool final_quad = i + 4 == text.size();
    int pad = 0;
    std::uint32_t v = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      char c = text[i + j];
      if (c == '=') {
        if (!final_quad || j < 2) return std::nullopt;
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad) return std::nullopt;
      int d = table[std::uint8_t(c)];
      if (d < 0) return std::nullopt;
      v = (v << 6) | std::uint32_t(d);
    }
    out += char((v >> 16) & 0xFF);
    if (pad < 2) out += char((v >> 8) & 0xFF);
    if (pad < 1) out += char(v & 0xFF);
  }
  return out;
}

}  // namespace detail

inline std::string format_rfc3339(Timestamp t) {
  std::time_t secs = t.time_since_epoch().count();
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Accepts "YYYY-MM-DDTHH:MM:SS[.frac](Z|+hh:mm|-hh:mm)". Fractions are truncated.
inline std::optional<Timestamp> parse_rfc3339(std::string_view s) {
  int y, mo, d, h, mi, sec;
  int consumed = 0;
  std::string buf(s);
  if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%*1[Tt ]%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &sec, &consumed) != 6)
    return std::nullopt;
  if (consumed != 19) return std::nullopt;
  std::string_view rest = s.substr(19);
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    if (rest.empty() || !std::isdigit(static_cast<unsigned char>(rest.front()))) return std::nullopt;
    while (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
  }
  long offset = 0;
  if (rest == "Z" || rest == "z") {
  } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
    int oh = 0, om = 0;
    if (std::sscanf(std::string(rest.substr(1)).c_str(), "%2d:%2d", &oh, &om) != 2) return std::nullopt;
    offset = (rest[0] == '+' ? 1 : -1) * (oh * 3600L + om * 60L);
  } else {
    return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} - seconds{offset};
}

inline void write_corpus(const CorpusManifest& manifest, std::ostream& out) {
  out << "# flexirank corpus v1: url\tfetched_at\tstatus\tcontent_type\tbase64(html)\n";
  if (!manifest.source_note.empty()) {
    std::istringstream note(manifest.source_note);
    for (std::string line; std::getline(note, line);) out << "# note: " << line << '\n';
  }
  for (const auto& page : manifest.records()) {
    auto bad = [](std::string_view s) { return s.find_first_of("\t\r\n") != std::string_view::npos; };
    if (bad(page.url) || bad(page.content_type))
      throw InvalidArgument("tab or newline in url/content_type: " + page.url);
    out << page.url << '\t' << format_rfc3339(page.fetched_at) << '\t' << page.status << '\t'
        << page.content_type << '\t' << detail::base64_encode(page.html) << '\n';
  }
}

inline CorpusManifest read_corpus(std::istream& in) {
  CorpusManifest manifest;
  std::string line;
  std::size_t lineno = 0;
  std::string note;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.starts_with("# note: ")) note += (note.empty() ? "" : "\n") + line.substr(8);
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 5)
      throw ParseError(lineno, "expected 5 tab-separated fields, got " + std::to_string(fields.size()));
    PageRecord page;
    page.url = std::string(fields[0]);
    auto ts = parse_rfc3339(fields[1]);
    if (!ts) throw ParseError(lineno, "bad timestamp '" + std::string(fields[1]) + "'");
    page.fetched_at = *ts;
    int status = 0;
    auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), status);
    if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size() || fields[2].empty())
      throw ParseError(lineno, "bad status '" + std::string(fields[2]) + "'");
    page.status = status;
    page.content_type = std::string(fields[3]);
    auto html = detail::base64_decode(fields[4]);
    if (!html) throw ParseError(lineno, "bad base64 body");
    page.html = std::move(*html);
    try {
      validate(page);
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
    manifest.upsert(std::move(page));
  }
  manifest.source_note = std::move(note);
  return manifest;
}

inline void save_corpus(const CorpusManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_corpus(manifest, out);
  out.flush();
  if (!out) throw Error("write failed: " + path);
}

inline CorpusManifest load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus " + path);
  return read_corpus(in);
}

}  // namespace flexirank
