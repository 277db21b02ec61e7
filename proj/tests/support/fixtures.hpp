#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "flexirank/corpus.hpp"
#include "flexirank/url.hpp"

namespace fixtures {

inline constexpr const char* kQuery = "human computer interaction";

inline std::string path(const std::string& rel) { return std::string(FLEXIRANK_FIXTURES) + "/" + rel; }

inline std::string read(const std::string& rel) {
  std::ifstream in(path(rel), std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline flexirank::PageRecord page(std::string url, std::string html) {
  flexirank::PageRecord p;
  p.url = std::move(url);
  p.html = std::move(html);
  p.status = 200;
  p.content_type = "text/html";
  p.fetched_at = flexirank::Timestamp{std::chrono::seconds{1115000000}};
  return p;
}

/// The 12-page fixture corpus described by hci/urls.tsv.
inline flexirank::CorpusManifest hci_corpus() {
  flexirank::CorpusManifest m;
  std::istringstream in(read("hci/urls.tsv"));
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    m.upsert(page(line.substr(0, tab), read("hci/" + line.substr(tab + 1))));
  }
  return m;
}

// URLs of the fixture pages by role.
inline constexpr const char* kIndexPage = "http://is.hcilab.example.org/hci/";
inline constexpr const char* kArticlePage = "http://sigchi.example.org/cdg/cdg2.html";
inline constexpr const char* kDownloadsPage = "http://tools.example.com/downloads.html";

}  // namespace fixtures
