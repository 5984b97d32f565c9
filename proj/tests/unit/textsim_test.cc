// Copyright 2026 The DocCapture Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doccap/textsim.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "doccap/error.h"
#include "oracles.h"

namespace doccap {
namespace {

std::string random_string(std::mt19937_64& rng, int max_len, const std::string& alphabet) {
  const int len = static_cast<int>(rng() % static_cast<unsigned>(max_len + 1));
  std::string s;
  for (int i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
  return s;
}

OcrWord word(const std::string& text, int x0, int y0, int x1, int y1) {
  return {text, {x0, y0, x1, y1}};
}

// Words of height 20 centred at yc.
OcrWord at_yc(const std::string& text, int x, int yc) { return word(text, x, yc - 10, x + 30, yc + 10); }

TEST(Levenshtein, Examples) {
  EXPECT_EQ(levenshtein("", "abc"), 3);
  EXPECT_EQ(levenshtein("abc", ""), 3);
  EXPECT_EQ(levenshtein("abc", "abc"), 0);
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3);
  EXPECT_EQ(oracle::levenshtein_table("kitten", "sitting"), 3);
  EXPECT_EQ(levenshtein("flaw", "lawn"), 2);
}

TEST(Levenshtein, CountsCodePointsNotBytes) {
  EXPECT_EQ(levenshtein("caf\xc3\xa9", "cafe"), 1);
  EXPECT_EQ(levenshtein("\xe2\x82\xac", "$"), 1);
  EXPECT_EQ(levenshtein("\xf0\x9f\x98\x80x", "x"), 1);
  EXPECT_DOUBLE_EQ(fuzzy_match("caf\xc3\xa9", "cafe"), 0.75);
}

TEST(Levenshtein, InvalidUtf8IsOneUnitPerByte) {
  EXPECT_EQ(levenshtein("\xff\xfe", "ab"), 2);
  EXPECT_EQ(levenshtein("\xc3", ""), 1);
}

TEST(Levenshtein, MatchesDpOracle) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const std::string a = random_string(rng, 12, "abcd");
    const std::string b = random_string(rng, 12, "abcd");
    ASSERT_EQ(levenshtein(a, b), oracle::levenshtein_table(a, b)) << a << " / " << b;
  }
}

TEST(Levenshtein, MetricAxioms) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const std::string a = random_string(rng, 8, "xyz");
    const std::string b = random_string(rng, 8, "xyz");
    const std::string c = random_string(rng, 8, "xyz");
    EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
    EXPECT_EQ(levenshtein(a, b) == 0, a == b);
    EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
  }
}

TEST(FuzzyMatch, Examples) {
  EXPECT_DOUBLE_EQ(fuzzy_match("", ""), 1.0);
  EXPECT_DOUBLE_EQ(fuzzy_match("invoice", "invoice"), 1.0);
  EXPECT_NEAR(fuzzy_match("kitten", "sitting"), 1.0 - 3.0 / 7.0, 1e-12);
  EXPECT_NEAR(fuzzy_match("kitten", "sitting"), 0.5714, 1e-4);
  EXPECT_DOUBLE_EQ(fuzzy_match("abc", ""), 0.0);
}

TEST(FuzzyMatch, Properties) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const std::string a = random_string(rng, 10, "abc");
    const std::string b = random_string(rng, 10, "abc");
    const double s = fuzzy_match(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_DOUBLE_EQ(s, fuzzy_match(b, a));
    EXPECT_EQ(s == 1.0, a == b);
  }
}

TEST(FuzzyMatch, SingleCorruptionCostsOneOverK) {
  std::mt19937_64 rng(4);
  for (int k = 1; k <= 15; ++k) {
    std::string a;
    for (int i = 0; i < k; ++i) a.push_back(static_cast<char>('a' + rng() % 26));
    std::string b = a;
    const std::size_t pos = rng() % static_cast<unsigned>(k);
    b[pos] = b[pos] == 'z' ? 'y' : 'z';
    EXPECT_NEAR(fuzzy_match(a, b), 1.0 - 1.0 / k, 1e-12);
  }
}

TEST(NormalizeText, Examples) {
  EXPECT_EQ(normalize_text("INV  1234"), "inv #");
  EXPECT_EQ(normalize_text(""), "");
  EXPECT_EQ(normalize_text("Total Due:"), "total due:");
  EXPECT_EQ(normalize_text("  \t a\n\nB  "), "a b");
  EXPECT_EQ(normalize_text("12.05.2019"), "#.#.#");
  EXPECT_EQ(normalize_text("INV  1234", false), "inv 1234");
  EXPECT_EQ(normalize_text("\xc3\x89t\xc3\xa9"), "\xc3\x89t\xc3\xa9");
}

TEST(AssembleLines, ClusteringRule) {
  OcrPage page{1000, 1000, {at_yc("a", 100, 100), at_yc("b", 10, 101)}};
  auto lines = assemble_lines(page);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0].words[0].text, "b");
  EXPECT_EQ(lines[0].words[1].text, "a");
  EXPECT_DOUBLE_EQ(lines[0].baseline_y, 100.5);

  page.words = {at_yc("a", 100, 100), at_yc("b", 10, 160)};
  lines = assemble_lines(page);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].words[0].text, "a");
  EXPECT_EQ(lines[1].words[0].text, "b");

  // Exactly at the tolerance (0.6 * 20 = 12) still joins.
  page.words = {at_yc("a", 100, 100), at_yc("b", 10, 112)};
  EXPECT_EQ(assemble_lines(page).size(), 1u);
  page.words = {at_yc("a", 100, 100), at_yc("b", 10, 113)};
  EXPECT_EQ(assemble_lines(page).size(), 2u);
}

TEST(AssembleLines, EmptyPage) { EXPECT_TRUE(assemble_lines(OcrPage{10, 10, {}}).empty()); }

TEST(AssembleLines, CoversEveryWordOnce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    OcrPage page{2000, 2000, {}};
    const int n = static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      const int x = static_cast<int>(rng() % 1900), y = static_cast<int>(rng() % 1900);
      const int h = 10 + static_cast<int>(rng() % 30);
      page.words.push_back(word("w" + std::to_string(i), x, y, x + 40, y + h));
    }
    std::multiset<std::string> seen;
    double last_y = -1e9;
    for (const auto& line : assemble_lines(page)) {
      ASSERT_FALSE(line.words.empty());
      EXPECT_GE(line.baseline_y, last_y);
      last_y = line.baseline_y;
      for (std::size_t i = 0; i < line.words.size(); ++i) {
        seen.insert(line.words[i].text);
        if (i > 0) EXPECT_LE(line.words[i - 1].box.x_min, line.words[i].box.x_min);
      }
    }
    ASSERT_EQ(seen.size(), page.words.size());
    for (const auto& w : page.words) EXPECT_EQ(seen.count(w.text), 1u);
  }
}

OcrPage ten_lines() {
  OcrPage page{1000, 2000, {}};
  for (int i = 0; i < 10; ++i) {
    page.words.push_back(at_yc("L" + std::string(1, static_cast<char>('a' + i)), 50, 100 + 100 * i));
  }
  return page;
}

TEST(HeaderFooter, Examples) {
  EXPECT_EQ(header_footer_text(ten_lines(), 2), "la lb li lj");
  EXPECT_EQ(header_footer_text(OcrPage{10, 10, {}}, 5), "");
  OcrPage three = ten_lines();
  three.words.resize(3);
  EXPECT_EQ(header_footer_text(three, 5), "la lb lc");
  EXPECT_EQ(header_footer_text(ten_lines(), 5), "la lb lc ld le lf lg lh li lj");
}

TEST(TextSimilarity, Examples) {
  const SimilarityConfig cfg;
  const OcrPage page = ten_lines();
  EXPECT_DOUBLE_EQ(text_similarity(page, page, cfg), 1.0);

  OcrPage a{1000, 1000, {at_yc("Invoice 2019-08-24", 10, 50), at_yc("Total 1,234.56", 10, 900)}};
  OcrPage b{1000, 1000, {at_yc("Invoice 2020-01-02", 10, 50), at_yc("Total 98,765.43", 10, 900)}};
  EXPECT_DOUBLE_EQ(text_similarity(a, b, cfg), 1.0);
  SimilarityConfig raw = cfg;
  raw.mask_digits = false;
  EXPECT_LT(text_similarity(a, b, raw), 1.0);

  OcrPage x{1000, 1000, {at_yc("aaaa bbbb", 10, 50), at_yc("cccc", 10, 900)}};
  OcrPage y{1000, 1000, {at_yc("xxxx yyyy", 10, 50), at_yc("zzzz", 10, 900)}};
  const double s = text_similarity(x, y, cfg);
  EXPECT_LT(s, 0.3);
  EXPECT_DOUBLE_EQ(s, fuzzy_match(header_footer_text(x, 5), header_footer_text(y, 5)));
}

TEST(SimilarityConfig, Validate) {
  SimilarityConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_lines = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.text_threshold = 1.5;
  EXPECT_THROW(c.validate(), ValidationError);
  c.text_threshold = -0.1;
  EXPECT_THROW(c.validate(), ValidationError);
}

}  // namespace
}  // namespace doccap
