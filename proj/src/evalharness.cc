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

#include "doccap/evalharness.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <set>
#include <thread>

#include "doccap/error.h"
#include "doccap/textsim.h"

namespace doccap {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

void check_pairs(const std::vector<std::string>& pred, const std::vector<std::string>& truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("prediction and ground-truth lists differ in length (" +
                          std::to_string(pred.size()) + " vs " + std::to_string(truth.size()) +
                          ")");
  }
  if (pred.empty()) throw ValidationError("cannot evaluate an empty sample list");
}

}  // namespace

double accuracy(const std::vector<std::string>& pred, const std::vector<std::string>& truth) {
  check_pairs(pred, truth);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += trim(pred[i]) == trim(truth[i]);
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double mean_fuzzy_match(const std::vector<std::string>& pred,
                        const std::vector<std::string>& truth) {
  check_pairs(pred, truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += fuzzy_match(pred[i], truth[i]);
  return sum / static_cast<double>(pred.size());
}

std::string field_display_name(const std::string& field) {
  static const std::map<std::string, std::string> kNames = {{"invoice_no", "Invoice number"},
                                                            {"date", "Date"},
                                                            {"seller", "Seller"},
                                                            {"buyer", "Buyer"},
                                                            {"total", "Total due"}};
  auto it = kNames.find(field);
  return it == kNames.end() ? field : it->second;
}

EvalReport evaluate(const std::vector<EvalSample>& samples) {
  if (samples.empty()) throw ValidationError("cannot evaluate an empty sample list");

  std::set<std::string> names;
  for (const auto& s : samples)
    for (const auto& [field, value] : s.truth) names.insert(field);
  std::vector<std::string> order;
  for (const auto& f : invoice_fields()) {
    if (names.erase(f) > 0) order.push_back(f);
  }
  order.insert(order.end(), names.begin(), names.end());

  EvalReport report;
  report.documents = samples.size();
  std::vector<std::string> all_pred, all_truth;
  for (const auto& field : order) {
    std::vector<std::string> pred, truth;
    for (const auto& s : samples) {
      auto t = s.truth.find(field);
      if (t == s.truth.end()) continue;
      auto p = s.predicted.find(field);
      pred.push_back(p == s.predicted.end() ? std::string() : p->second);
      truth.push_back(t->second);
    }
    FieldStats fs{field, pred.size(), accuracy(pred, truth), mean_fuzzy_match(pred, truth)};
    report.fields.push_back(fs);
    all_pred.insert(all_pred.end(), pred.begin(), pred.end());
    all_truth.insert(all_truth.end(), truth.begin(), truth.end());
  }
  if (!all_pred.empty()) {
    report.overall = {"overall", all_pred.size(), accuracy(all_pred, all_truth),
                      mean_fuzzy_match(all_pred, all_truth)};
  } else {
    report.overall.field = "overall";
  }
  for (const auto& s : samples) {
    report.template_correct += !s.expected_template.empty() &&
                               s.expected_template == s.matched_template;
  }
  return report;
}

json to_json(const EvalReport& report) {
  auto stats = [](const FieldStats& f) {
    return json{{"n", f.n}, {"accuracy", f.accuracy}, {"mean_fuzzy_match", f.mean_fuzzy}};
  };
  json fields = json::object();
  for (const auto& f : report.fields) fields[f.field] = stats(f);
  return {{"documents", report.documents},
          {"template_correct", report.template_correct},
          {"fields", std::move(fields)},
          {"overall", stats(report.overall)}};
}

std::string format_table(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-18s %9s %17s %7s\n", "Field", "Accuracy",
                "Mean-Fuzzy-Match", "N");
  out += line;
  out += std::string(54, '-') + "\n";
  auto row = [&](const std::string& name, const FieldStats& f) {
    std::snprintf(line, sizeof(line), "%-18s %9.1f %17.1f %7zu\n", name.c_str(),
                  100.0 * f.accuracy, 100.0 * f.mean_fuzzy, f.n);
    out += line;
  };
  for (const auto& f : report.fields) row(field_display_name(f.field), f);
  out += std::string(54, '-') + "\n";
  row("Overall", report.overall);
  return out;
}

std::vector<ExtractionResult> process_all(const std::vector<const Document*>& docs,
                                          const TemplateDb& db, const PipelineConfig& cfg) {
  std::vector<ExtractionResult> results(docs.size());
  std::vector<std::exception_ptr> errors(docs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < docs.size(); i = next++) {
      try {
        results[i] = process_document(*docs[i], db, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(docs.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

BenchmarkResult run_benchmark(const SyntheticCorpus& corpus, const PipelineConfig& cfg,
                              const std::filesystem::path& db_root) {
  if (corpus.templates.empty() || corpus.variants.empty()) {
    throw ValidationError("benchmark corpus needs templates and variants");
  }
  cfg.validate();
  TemplateDb db = TemplateDb::open(db_root, cfg.canonical_width);
  if (!db.empty()) throw StoreError("benchmark store is not empty: " + db_root.string());
  for (const auto& t : corpus.templates) db.add(t.id, t.doc.image, t.doc.ocr, t.truth);

  std::vector<const Document*> docs;
  docs.reserve(corpus.variants.size());
  for (const auto& v : corpus.variants) docs.push_back(&v.doc);
  const auto results = process_all(docs, db, cfg);

  BenchmarkResult out;
  for (std::size_t i = 0; i < corpus.variants.size(); ++i) {
    const auto& v = corpus.variants[i];
    EvalSample s;
    s.document = v.id;
    s.expected_template = v.parent_id;
    s.matched_template = results[i].template_id.value_or("");
    for (const auto& f : results[i].fields) s.predicted[f.field] = f.text;
    for (const auto& [field, fa] : v.truth.fields) s.truth[field] = fa.value;
    out.samples.push_back(std::move(s));
  }
  out.report = evaluate(out.samples);
  return out;
}

}  // namespace doccap
