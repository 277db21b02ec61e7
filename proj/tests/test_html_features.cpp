#include <gtest/gtest.h>

#include <cmath>

#include "flexirank/features.hpp"
#include "flexirank/html.hpp"
#include "support/fixtures.hpp"
#include "support/link_levels.hpp"

using namespace flexirank;

namespace {

PageRecord at(std::string url, std::string html) { return fixtures::page(std::move(url), std::move(html)); }

}  // namespace

TEST(Tokenizer, ToleratesBrokenMarkup) {
  auto toks = html::tokenize("<p class=a>x<b>y</p <a href='q'>z<!-- c --></a><unterminated");
  ASSERT_FALSE(toks.empty());
  EXPECT_EQ(toks[0].kind, html::TokenKind::StartTag);
  EXPECT_EQ(toks[0].name, "p");
  ASSERT_NE(toks[0].attribute("class"), nullptr);
  EXPECT_EQ(*toks[0].attribute("class"), "a");
}

TEST(Tokenizer, ScriptBodyIsOpaque) {
  auto toks = html::tokenize("<script>if (a < b) document.write('<a href=x>')</SCRIPT><a href=y>k</a>");
  int anchors = 0;
  for (const auto& t : toks) anchors += t.kind == html::TokenKind::StartTag && t.name == "a";
  EXPECT_EQ(anchors, 1);
}

TEST(Tokenizer, DecodesEntities) {
  EXPECT_EQ(html::decode_entities("a&amp;b &lt;&gt; &#65;&#x42; &copy; &bogus;"), "a&b <> AB \xC2\xA9 &bogus;");
}

TEST(Features, EmptyBody) {
  auto f = extract_features(at("http://a.b.com/", ""));
  EXPECT_EQ(f.doc_length, 0u);
  EXPECT_EQ(f.n_links, 0u);
  EXPECT_EQ(f.n_images, 0u);
  EXPECT_EQ(f.links_per_length, 0.0);
  EXPECT_EQ(f.anchor_alphabet_score, 0.0);
}

TEST(Features, SelfLinkExcludedFromCount) {
  auto page = at("http://a.b.com/", "<a href=\"/x\">x</a><a href=\"#top\">t</a>");
  auto links = extract_links(page);
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[0].target, "http://a.b.com/x");
  EXPECT_EQ(links[0].level, LinkLevel::Lower);
  EXPECT_EQ(links[1].level, LinkLevel::Self);
  auto f = extract_features(page);
  EXPECT_EQ(f.n_links, 1u);
  EXPECT_EQ(f.n_self_links, 1u);
}

TEST(Features, FrameSourcesAreLinks) {
  auto links = extract_links(at("http://a.b.com/dir/", "<frameset><frame src=\"menu.html\"></frameset>"));
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].target, "http://a.b.com/dir/menu.html");
  EXPECT_TRUE(links[0].anchor_text.empty());
  EXPECT_TRUE(links[0].is_frame);
}

TEST(Features, NoAnchors) { EXPECT_TRUE(extract_links(at("http://a.b.com/", "<p>plain</p>")).empty()); }

TEST(Features, AlphabetAnchors) {
  std::string html;
  for (char c = 'A'; c <= 'Z'; ++c) html += std::string("<a href=\"#") + c + "\">" + c + "</a> ";
  auto f = extract_features(at("http://g.example/", html));
  EXPECT_DOUBLE_EQ(f.anchor_alphabet_score, 1.0);
}

TEST(Features, DownloadsFixtureHandCount) {
  auto f = extract_features(at("http://tools.example.com/downloads.html", fixtures::read("downloads.html")));
  EXPECT_EQ(f.n_download_links, 4u);
  EXPECT_EQ(f.n_paper_links, 0u);
}

TEST(Features, DynamicLinks) {
  auto f = extract_features(at("http://a.example/",
                               "<a href=\"/q?x=1\">1</a><a href=\"/p.php\">2</a><a href=\"/s.html\">3</a>"
                               "<a href=\"/c.CGI\">4</a>"));
  EXPECT_EQ(f.n_dynamic_links, 3u);
}

TEST(Features, ThumbnailsAreImagesInsideAnchors) {
  auto f = extract_features(at("http://a.example/",
                               "<img src=a.png><a href=/x><span><img src=b.png></span></a><img src=c.png>"));
  EXPECT_EQ(f.n_images, 3u);
  EXPECT_EQ(f.n_thumbnails, 1u);
}

TEST(Features, VisibleTextSkipsScriptsAndStyles) {
  auto a = analyze_page(at("http://a.example/",
                           "<html><head><title>T</title><style>p{}</style><script>var x=1;</script></head>"
                           "<body><p>Hello&nbsp;<b>world</b></p><p>again</p></body></html>"));
  EXPECT_EQ(a.visible_text, "Hello world again");
  EXPECT_EQ(a.features.doc_length, 17u);
  EXPECT_EQ(a.features.title_text, "T");
}

TEST(Features, HeadingsAndRatios) {
  auto f = extract_features(at("http://a.example/", "<h1>Top</h1><h3>Sub</h3><p>0123456789</p><img src=x>"
                                                   "<a href=http://b.example/>b</a>"));
  EXPECT_EQ(f.heading_text, "Top Sub");
  EXPECT_EQ(f.doc_length, 20u);  // "Top Sub 0123456789 b"
  EXPECT_DOUBLE_EQ(f.links_per_length, 1.0 / double(f.doc_length));
  EXPECT_DOUBLE_EQ(f.text_to_image, double(f.doc_length));
}

TEST(Features, BaseHrefIsHonoured) {
  auto links = extract_links(at("http://a.example/x/", "<base href=\"http://c.example/d/\"><a href=\"e\">e</a>"));
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].target, "http://c.example/d/e");
}

TEST(Features, NonHttpTargetsDropped) {
  auto links = extract_links(at("http://a.example/", "<a href=\"mailto:x@y\">m</a><a href=\"javascript:go()\">j</a>"
                                                     "<a name=\"anchor\">n</a>"));
  EXPECT_TRUE(links.empty());
}

TEST(Features, InvariantsOnFixtureCorpus) {
  const auto corpus = fixtures::hci_corpus();
  for (const auto& page : corpus.records()) {
    auto f = extract_features(page);
    EXPECT_LE(f.n_lower_links + f.n_same_links, f.n_links) << page.url;
    EXPECT_EQ(f.n_links + f.n_self_links, extract_links(page).size()) << page.url;
    EXPECT_LE(f.n_thumbnails, f.n_images);
    EXPECT_GE(f.anchor_alphabet_score, 0.0);
    EXPECT_LE(f.anchor_alphabet_score, 1.0);
    EXPECT_TRUE(std::isfinite(f.links_per_length));
    EXPECT_TRUE(std::isfinite(f.text_to_image));
    EXPECT_EQ(extract_features(page).n_links, f.n_links) << "deterministic";
  }
}

TEST(Features, AppendingAnAnchorAddsExactlyOneLink) {
  const auto corpus = fixtures::hci_corpus();
  for (const auto& page : corpus.records()) {
    auto before = extract_features(page);
    auto grown = page;
    grown.html += "<a href=\"http://elsewhere.example.net/new\">more</a>";
    auto after = extract_features(grown);
    EXPECT_EQ(after.n_links, before.n_links + 1) << page.url;
    EXPECT_EQ(after.n_images, before.n_images);
    EXPECT_EQ(after.n_thumbnails, before.n_thumbnails);
  }
}

TEST(LinkLevel, HandLabelledTable) {
  for (const auto& c : fixtures::kLevelTable)
    EXPECT_EQ(classify_link_level(c.source, c.target), c.want) << c.source << " -> " << c.target;
}

TEST(LinkLevel, SelfMeansSameHostAndPath) {
  const auto corpus = fixtures::hci_corpus();
  for (const auto& page : corpus.records()) {
    auto src = parse_url(page.url);
    for (const auto& link : extract_links(page)) {
      if (link.level != LinkLevel::Self) continue;
      auto dst = parse_url(link.target);
      ASSERT_TRUE(dst);
      EXPECT_EQ(dst->host, src->host);
      EXPECT_EQ(dst->path, src->path);
    }
  }
}
