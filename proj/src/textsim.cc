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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doccap/error.h"

namespace doccap {

namespace {

// Decodes UTF-8 into scalar values; invalid sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c >> 5) == 0x6) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c >> 4) == 0xE) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c >> 3) == 0x1E) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(U'\uFFFD');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

int edit_distance(const std::u32string& a, const std::u32string& b) {
  const std::u32string& shorter = a.size() <= b.size() ? a : b;
  const std::u32string& longer = a.size() <= b.size() ? b : a;
  std::vector<int> row(shorter.size() + 1);
  std::iota(row.begin(), row.end(), 0);
  for (std::size_t i = 1; i <= longer.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= shorter.size(); ++j) {
      const int up = row[j];
      const int cost = longer[i - 1] == shorter[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row.back();
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

void SimilarityConfig::validate() const {
  if (n_lines < 1) throw ValidationError("n_lines must be >= 1");
  if (!(text_threshold >= 0.0 && text_threshold <= 1.0)) {
    throw ValidationError("text_threshold must lie in [0, 1]");
  }
}

int levenshtein(std::string_view a, std::string_view b) {
  return edit_distance(decode_utf8(a), decode_utf8(b));
}

double fuzzy_match(std::string_view a, std::string_view b) {
  const auto ua = decode_utf8(a);
  const auto ub = decode_utf8(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(ua, ub)) / static_cast<double>(longest);
}

std::string normalize_text(std::string_view s, bool mask_digits) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (mask_digits && c >= '0' && c <= '9') {
      out.push_back('#');
      while (i + 1 < s.size() && s[i + 1] >= '0' && s[i + 1] <= '9') ++i;
    } else if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<TextLine> assemble_lines(const OcrPage& page) {
  const auto& words = page.words;
  if (words.empty()) return {};

  std::vector<int> heights;
  heights.reserve(words.size());
  for (const auto& w : words) heights.push_back(w.box.height());
  std::sort(heights.begin(), heights.end());
  const std::size_t mid = heights.size() / 2;
  const double median = heights.size() % 2 == 1 ? heights[mid]
                                                 : (heights[mid - 1] + heights[mid]) / 2.0;
  const double tolerance = 0.6 * median;

  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ya = words[a].box.center().y;
    const double yb = words[b].box.center().y;
    if (ya != yb) return ya < yb;
    return words[a].box.x_min < words[b].box.x_min;
  });

  std::vector<std::vector<std::size_t>> groups;
  double anchor = 0.0;
  for (std::size_t idx : order) {
    const double yc = words[idx].box.center().y;
    if (groups.empty() || yc - anchor > tolerance) {
      groups.emplace_back();
      anchor = yc;
    }
    groups.back().push_back(idx);
  }

  std::vector<TextLine> lines;
  lines.reserve(groups.size());
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) {
      return words[a].box.x_min < words[b].box.x_min;
    });
    TextLine line;
    double sum = 0.0;
    for (std::size_t idx : g) {
      line.words.push_back(words[idx]);
      sum += words[idx].box.center().y;
    }
    line.baseline_y = sum / static_cast<double>(g.size());
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string header_footer_text(const OcrPage& page, int n, bool mask_digits) {
  if (n < 1) throw ValidationError("header_footer_text: n must be >= 1");
  const auto lines = assemble_lines(page);
  const std::size_t count = lines.size();
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n), count);

  std::string joined;
  auto append_line = [&](const TextLine& line) {
    for (const auto& w : line.words) {
      if (!joined.empty()) joined.push_back(' ');
      joined += w.text;
    }
  };
  for (std::size_t i = 0; i < count; ++i) {
    if (i < take || i >= count - take) append_line(lines[i]);
  }
  return normalize_text(joined, mask_digits);
}

double text_similarity(const OcrPage& input, const OcrPage& tpl, const SimilarityConfig& cfg) {
  cfg.validate();
  return fuzzy_match(header_footer_text(input, cfg.n_lines, cfg.mask_digits),
                     header_footer_text(tpl, cfg.n_lines, cfg.mask_digits));
}

}  // namespace doccap
