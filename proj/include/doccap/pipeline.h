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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "doccap/docmodel.h"
#include "doccap/imaging.h"
#include "doccap/templatestore.h"
#include "doccap/textsim.h"

namespace doccap {

struct PipelineConfig {
  int canonical_width = kDefaultCanonicalWidth;
  SimilarityConfig similarity;
  double expand_fraction = 0.25;  // per side, fraction of rect dimension
  int expand_pad = 10;            // per side, canonical pixels
  double overlap_threshold = 0.5;

  // Throws ValidationError.
  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {});

struct MatchScores {
  double sim_visual = 0.0;
  double sim_text = 0.0;
  double sim_combined = 0.0;
};

struct TemplateCandidate {
  std::string id;
  MatchScores scores;
  bool passes_threshold = false;
};

// An input document with its canonical image and spectrum computed once.
struct PreparedDocument {
  const Document* doc = nullptr;
  CanonicalImage canonical;
  SingularSpectrum spectrum;
};

PreparedDocument prepare(const Document& doc, const PipelineConfig& cfg);

// Scores every template; sorted by combined score desc, then id asc.
std::vector<TemplateCandidate> rank_templates(const PreparedDocument& input, const TemplateDb& db,
                                              const PipelineConfig& cfg);

// Among candidates with sim_text >= threshold, the highest combined score;
// ties go to the lexicographically smallest id.
std::optional<TemplateCandidate> select_best(const std::vector<TemplateCandidate>& candidates,
                                             double text_threshold);

struct TemplateMatch {
  const TemplateRecord* record = nullptr;
  MatchScores scores;
};

std::optional<TemplateMatch> match_template(const PreparedDocument& input, const TemplateDb& db,
                                            const PipelineConfig& cfg);
std::optional<TemplateMatch> match_template(const Document& doc, const TemplateDb& db,
                                            const PipelineConfig& cfg);

// Moves each side outward by round(f * dimension) + pad, clamped to bounds.
Rect expand_rect(const Rect& r, double fraction, int pad, int bound_w, int bound_h);

// Native rect -> another frame, scaling each edge and rounding half-up.
Rect scale_rect(const Rect& r, double sx, double sy);

struct RegionProposal {
  std::string field;
  Rect region;  // input canonical space
  double score = 0.0;
  bool degenerate = false;
};

std::vector<RegionProposal> propose_regions(const PreparedDocument& input,
                                            const TemplateRecord& tpl,
                                            const PipelineConfig& cfg);

struct WordPair {
  std::size_t input_word = 0;     // index into the input page's words
  std::size_t template_word = 0;  // index into the template page's words
};

// Words whose normalized text is non-empty, equal, and unique inside both
// regions (a word is inside when its centre is). Regions are native pixels.
std::vector<WordPair> common_words(const OcrPage& input, const Rect& input_region,
                                   const OcrPage& tpl, const Rect& template_region,
                                   bool mask_digits = true);

struct FieldResult {
  std::string field;
  Rect box;  // input native pixels
  std::string text;
  bool anchored = false;
};

// Final boxes per proposal; text is left empty (see extract_text).
std::vector<FieldResult> select_final_areas(const PreparedDocument& input,
                                            const TemplateRecord& tpl,
                                            const std::vector<RegionProposal>& proposals,
                                            const PipelineConfig& cfg);

// Words whose box overlaps `box` by more than the threshold fraction of the
// word's own area, in reading order, joined with single spaces.
std::string extract_text(const OcrPage& ocr, const Rect& box, double overlap_threshold);

struct ExtractionResult {
  std::optional<std::string> template_id;
  MatchScores scores;
  std::vector<FieldResult> fields;  // sorted by field name
};

ExtractionResult process_document(const Document& doc, const TemplateDb& db,
                                  const PipelineConfig& cfg);

// Report shape mirrors the annotation format so it can be re-ingested.
nlohmann::json to_json(const ExtractionResult& result);
nlohmann::json to_report(const ExtractionResult& result, const PipelineConfig& cfg);
ExtractionResult extraction_from_json(const nlohmann::json& j);
// Field values and positions as an Annotation.
Annotation to_annotation(const ExtractionResult& result);

int round_half_up(double v);

}  // namespace doccap
