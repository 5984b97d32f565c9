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

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doccap/docmodel.h"

namespace doccap {

inline constexpr int kSynthPageWidth = 1240;
inline constexpr int kSynthPageHeight = 1754;

// The five invoice fields, in report order.
const std::vector<std::string>& invoice_fields();

struct LayoutWord {
  std::string text;
  Rect box;
  std::string field;  // empty unless the word is part of a field value
};

// A procedurally laid-out page. Words are rendered as textures seeded by
// their normalized text, anchored at the word box origin.
struct PageLayout {
  int width = kSynthPageWidth;
  int height = kSynthPageHeight;
  int char_width = 16;
  int cell = 5;  // texture cell edge in pixels
  std::vector<LayoutWord> words;
};

Image render_layout(const PageLayout& layout, int intensity_shift = 0);
OcrPage layout_ocr(const PageLayout& layout);
// Value words of each field, unioned into one box per field.
Annotation layout_annotation(const PageLayout& layout);

// Rigid shift of every word; boxes must stay on the page.
PageLayout translate_layout(const PageLayout& layout, int dx, int dy);
// Multiplies page size, boxes, glyph width and texture cell by `factor`.
PageLayout scale_layout(const PageLayout& layout, int factor);
// Replaces each listed field's value. Value words are re-laid left to right
// from the field's original x_min, each sized to its text length.
PageLayout with_values(const PageLayout& layout, const std::map<std::string, std::string>& values);

// Fresh values in the same per-template formats. With same_shape, every
// word keeps its character count so boxes are unchanged.
std::map<std::string, std::string> random_values(std::mt19937_64& rng, const PageLayout& layout,
                                                 bool same_shape);

struct CorpusDocument {
  std::string id;
  std::string parent_id;  // empty for templates
  PageLayout layout;
  int intensity_shift = 0;
  Document doc;
  Annotation truth;
};

struct SynthOptions {
  double max_translation = 0.03;  // fraction of page size
  int max_intensity_shift = 20;
  bool change_values = true;
  bool translate = true;
  bool shift_intensity = true;
};

struct SyntheticCorpus {
  std::uint64_t seed = 0;
  std::vector<CorpusDocument> templates;
  std::vector<CorpusDocument> variants;
};

// Deterministic for a given seed and options. Template keyword
// vocabularies are pairwise disjoint.
SyntheticCorpus generate_corpus(std::uint64_t seed, int n_templates, int variants_per_template,
                                const SynthOptions& options = {});

// Writes <dir>/templates (template store layout), <dir>/variants/<id>/
// {image.png, ocr.json, truth.json} and <dir>/manifest.json.
void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir,
                  int canonical_width);

struct ManifestEntry {
  std::string id;
  std::string parent_id;
  std::filesystem::path image;
  std::filesystem::path ocr;
  Annotation truth;
};

// Paths in the manifest are resolved relative to its directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);

}  // namespace doccap
