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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "doccap/pipeline.h"
#include "doccap/synth.h"

namespace doccap {

// Exact-match rate after trimming surrounding whitespace. Throws
// ValidationError for mismatched lengths or empty input.
double accuracy(const std::vector<std::string>& pred, const std::vector<std::string>& truth);
// Mean fuzzy_match over pairs. Same errors as accuracy().
double mean_fuzzy_match(const std::vector<std::string>& pred, const std::vector<std::string>& truth);

struct FieldStats {
  std::string field;
  std::size_t n = 0;
  double accuracy = 0.0;
  double mean_fuzzy = 0.0;
};

struct EvalReport {
  std::vector<FieldStats> fields;  // invoice fields first, then others by name
  FieldStats overall;              // pooled over every (document, field) sample
  std::size_t documents = 0;
  std::size_t template_correct = 0;  // only meaningful when parents are known
};

// Per-document predicted and expected field values.
struct EvalSample {
  std::string document;
  std::string expected_template;
  std::string matched_template;  // empty when nothing matched
  std::map<std::string, std::string> predicted;
  std::map<std::string, std::string> truth;
};

// Fields are taken from the truth side; a missing prediction counts as "".
EvalReport evaluate(const std::vector<EvalSample>& samples);

nlohmann::json to_json(const EvalReport& report);
// Aligned plain-text table: one row per field plus Overall, in percent.
std::string format_table(const EvalReport& report);
std::string field_display_name(const std::string& field);

struct BenchmarkResult {
  EvalReport report;
  std::vector<EvalSample> samples;  // one per variant, corpus order
};

// Registers the corpus templates in a fresh store under db_root (which must
// not already hold templates), then extracts every variant.
BenchmarkResult run_benchmark(const SyntheticCorpus& corpus, const PipelineConfig& cfg,
                              const std::filesystem::path& db_root);

// Runs process_document over documents using all hardware threads; result
// order matches input order.
std::vector<ExtractionResult> process_all(const std::vector<const Document*>& docs,
                                          const TemplateDb& db, const PipelineConfig& cfg);

}  // namespace doccap
