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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "doccap/docmodel.h"

namespace doccap {

struct TextLine {
  std::vector<OcrWord> words;  // left to right
  double baseline_y = 0.0;     // mean of word vertical centres
};

struct SimilarityConfig {
  int n_lines = 5;
  double text_threshold = 0.8;
  bool mask_digits = true;

  // Throws ValidationError.
  void validate() const;
};

// Edit distance over Unicode scalar values (UTF-8 input).
int levenshtein(std::string_view a, std::string_view b);

// 1 - levenshtein / max length (in code points); 1.0 when both are empty.
double fuzzy_match(std::string_view a, std::string_view b);

// Lowercase, digit runs -> "#" (when mask_digits), whitespace runs collapsed
// to a single space, trimmed.
std::string normalize_text(std::string_view s, bool mask_digits = true);

// Groups words into reading-order lines by vertical-centre clustering.
std::vector<TextLine> assemble_lines(const OcrPage& page);

// Normalized concatenation of the first and last n lines (no line repeated).
std::string header_footer_text(const OcrPage& page, int n, bool mask_digits = true);

double text_similarity(const OcrPage& input, const OcrPage& tpl, const SimilarityConfig& cfg);

}  // namespace doccap
