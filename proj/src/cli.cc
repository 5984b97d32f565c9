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

#include "doccap/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "doccap/error.h"
#include "doccap/evalharness.h"
#include "doccap/fileio.h"
#include "doccap/pipeline.h"
#include "doccap/synth.h"
#include "doccap/templatestore.h"

namespace doccap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string db;
  std::string image;
  std::string ocr;
  std::string annotation;
  std::string id;
  std::string config;
  std::optional<double> threshold;
  std::string out;
  std::string input_dir;
  std::string pred;
  std::string truth;
  std::uint64_t seed = 0;
  int templates = 35;
  int variants = 16;
  std::string work_dir;
  bool print_config = false;
};

PipelineConfig load_config(const Options& o) {
  PipelineConfig cfg;
  if (!o.config.empty()) {
    const json j = json::parse(read_text_file(o.config), nullptr, false);
    if (j.is_discarded()) throw ParseError("config " + o.config + ": malformed JSON");
    cfg = config_from_json(j);
  }
  if (o.threshold) cfg.similarity.text_threshold = *o.threshold;
  cfg.validate();
  return cfg;
}

Document load_document(const fs::path& image, const fs::path& ocr) {
  Document doc;
  doc.image = read_image(image);
  doc.ocr = parse_ocr(read_text_file(ocr));
  doc.source = image.string();
  return doc;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ValidationError(std::string("missing required option ") + flag);
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int cmd_add_template(const Options& o, std::ostream& out) {
  require(o.db, "--db");
  require(o.image, "--image");
  require(o.ocr, "--ocr");
  require(o.annotation, "--annotation");
  require(o.id, "--id");
  const PipelineConfig cfg = load_config(o);
  TemplateDb db = TemplateDb::open(o.db, cfg.canonical_width);
  const Image image = read_image(o.image);
  const OcrPage ocr = parse_ocr(read_text_file(o.ocr));
  const Annotation annotation = parse_annotation(read_text_file(o.annotation));
  const TemplateRecord& rec = db.add(o.id, image, ocr, annotation);
  out << "added template " << rec.id << "\n";
  out << "spectrum sha256 " << sha256_hex(encode_spectrum(rec.spectrum)) << "\n";
  return kExitOk;
}

int cmd_remove_template(const Options& o, std::ostream& out) {
  require(o.db, "--db");
  require(o.id, "--id");
  const PipelineConfig cfg = load_config(o);
  TemplateDb db = TemplateDb::load(o.db, cfg.canonical_width);
  db.remove(o.id);
  out << "removed template " << o.id << "\n";
  return kExitOk;
}

void print_summary(std::ostream& out, const std::string& name, const ExtractionResult& r) {
  out << name << ": ";
  if (!r.template_id) {
    out << "no template match\n";
    return;
  }
  out << "template " << *r.template_id << " sim_visual=" << fixed(r.scores.sim_visual)
      << " sim_text=" << fixed(r.scores.sim_text)
      << " sim_combined=" << fixed(r.scores.sim_combined) << "\n";
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.db, "--db");
  const PipelineConfig cfg = load_config(o);
  const TemplateDb db = TemplateDb::load(o.db, cfg.canonical_width);
  for (const auto& w : db.warnings()) err << "warning: " << w << "\n";

  if (!o.input_dir.empty()) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(o.input_dir)) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<Document> docs;
    std::vector<std::string> names;
    for (const auto& d : dirs) {
      fs::path image = d / "image.png";
      if (!fs::exists(image)) image = d / "image.pgm";
      docs.push_back(load_document(image, d / "ocr.json"));
      names.push_back(d.filename().string());
    }
    std::vector<const Document*> ptrs;
    for (const auto& d : docs) ptrs.push_back(&d);
    const auto results = process_all(ptrs, db, cfg);

    json documents = json::object();
    bool all_matched = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
      documents[names[i]] = to_json(results[i]);
      all_matched = all_matched && results[i].template_id.has_value();
      print_summary(out, names[i], results[i]);
    }
    const json report = {{"config", to_json(cfg)}, {"documents", std::move(documents)}};
    if (o.out.empty()) {
      out << report.dump(2) << "\n";
    } else {
      write_file_atomic(o.out, report.dump(2) + "\n");
    }
    return all_matched ? kExitOk : kExitNoMatch;
  }

  require(o.image, "--image or --input-dir");
  require(o.ocr, "--ocr");
  const Document doc = load_document(o.image, o.ocr);
  const ExtractionResult result = process_document(doc, db, cfg);
  const std::string report = to_report(result, cfg).dump(2) + "\n";
  if (o.out.empty()) {
    out << report;
  } else {
    write_file_atomic(o.out, report);
    print_summary(out, fs::path(o.image).filename().string(), result);
  }
  return result.template_id ? kExitOk : kExitNoMatch;
}

int cmd_match(const Options& o, std::ostream& out) {
  require(o.db, "--db");
  require(o.image, "--image");
  require(o.ocr, "--ocr");
  const PipelineConfig cfg = load_config(o);
  const TemplateDb db = TemplateDb::load(o.db, cfg.canonical_width);
  const Document doc = load_document(o.image, o.ocr);
  const auto ranked = rank_templates(prepare(doc, cfg), db, cfg);

  char line[200];
  std::snprintf(line, sizeof(line), "%-4s %-24s %10s %10s %12s  %s\n", "rank", "template",
                "sim_visual", "sim_text", "sim_combined", "verdict");
  out << line;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& c = ranked[i];
    std::snprintf(line, sizeof(line), "%-4zu %-24s %10.6f %10.6f %12.6f  %s\n", i + 1,
                  c.id.c_str(), c.scores.sim_visual, c.scores.sim_text, c.scores.sim_combined,
                  c.passes_threshold ? "pass" : "below-threshold");
    out << line;
  }
  const auto best = select_best(ranked, cfg.similarity.text_threshold);
  if (!best) {
    out << "no template passes text threshold " << fixed(cfg.similarity.text_threshold) << "\n";
    return kExitNoMatch;
  }
  out << "selected " << best->id << "\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  require(o.pred, "--pred");
  require(o.truth, "--truth");
  const json pred = json::parse(read_text_file(o.pred), nullptr, false);
  if (pred.is_discarded() || !pred.is_object() || !pred.contains("documents") ||
      !pred["documents"].is_object()) {
    throw ParseError("predictions: expected an extract --input-dir report");
  }
  const auto entries = read_manifest(o.truth);
  std::vector<EvalSample> samples;
  for (const auto& e : entries) {
    if (!pred["documents"].contains(e.id)) {
      throw ValidationError("manifest mismatch: no prediction for document \"" + e.id + "\"");
    }
    const ExtractionResult r = extraction_from_json(pred["documents"][e.id]);
    EvalSample s;
    s.document = e.id;
    s.expected_template = e.parent_id;
    s.matched_template = r.template_id.value_or("");
    for (const auto& f : r.fields) s.predicted[f.field] = f.text;
    for (const auto& [field, fa] : e.truth.fields) s.truth[field] = fa.value;
    samples.push_back(std::move(s));
  }
  if (pred["documents"].size() != entries.size()) {
    throw ValidationError("manifest mismatch: predictions cover documents absent from the truth");
  }
  const EvalReport report = evaluate(samples);
  out << format_table(report);
  out << "documents " << report.documents << ", template identified " << report.template_correct
      << "\n";
  if (!o.out.empty()) write_file_atomic(o.out, to_json(report).dump(2) + "\n");
  return kExitOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  require(o.out, "--out");
  const PipelineConfig cfg = load_config(o);
  const auto corpus = generate_corpus(o.seed, o.templates, o.variants);
  write_corpus(corpus, o.out, cfg.canonical_width);
  out << "wrote " << corpus.templates.size() << " templates and " << corpus.variants.size()
      << " variants to " << o.out << "\n";
  return kExitOk;
}

int cmd_benchmark(const Options& o, std::ostream& out) {
  require(o.work_dir, "--work-dir");
  const PipelineConfig cfg = load_config(o);
  const auto corpus = generate_corpus(o.seed, o.templates, o.variants);
  const auto result = run_benchmark(corpus, cfg, fs::path(o.work_dir) / "templates");
  out << format_table(result.report);
  out << "documents " << result.report.documents << ", template identified "
      << result.report.template_correct << "\n";
  if (!o.out.empty()) {
    json j = to_json(result.report);
    j["config"] = to_json(cfg);
    j["seed"] = o.seed;
    write_file_atomic(o.out, j.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"One-shot template matching for invoice field extraction", "doccap"};
  app.require_subcommand(0, 1);
  app.add_flag("--print-config", o.print_config, "Print the effective pipeline config and exit");
  app.add_option("--config", o.config, "Pipeline config JSON file");

  auto db_option = [&](CLI::App* sub) {
    sub->add_option("--db", o.db, "Template store directory")->envname("DOC_CAPTURE_DB");
  };
  auto config_options = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Pipeline config JSON file");
    sub->add_option("--threshold", o.threshold, "Override the text similarity threshold C");
  };

  auto* add = app.add_subcommand("add-template", "Register an annotated exemplar");
  db_option(add);
  config_options(add);
  add->add_option("--image", o.image, "PNG or PGM image");
  add->add_option("--ocr", o.ocr, "OCR JSON file");
  add->add_option("--annotation", o.annotation, "Annotation JSON file");
  add->add_option("--id", o.id, "Template id");

  auto* remove = app.add_subcommand("remove-template", "Delete a template");
  db_option(remove);
  config_options(remove);
  remove->add_option("--id", o.id, "Template id");

  auto* extract = app.add_subcommand("extract", "Extract fields from a document");
  db_option(extract);
  config_options(extract);
  extract->add_option("--image", o.image, "PNG or PGM image");
  extract->add_option("--ocr", o.ocr, "OCR JSON file");
  extract->add_option("--input-dir", o.input_dir,
                      "Directory of documents (subdirectories with image.png and ocr.json)");
  extract->add_option("--out", o.out, "Report output path");

  auto* match = app.add_subcommand("match", "Rank templates for a document");
  db_option(match);
  config_options(match);
  match->add_option("--image", o.image, "PNG or PGM image");
  match->add_option("--ocr", o.ocr, "OCR JSON file");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate_cmd->add_option("--pred", o.pred, "Predictions from extract --input-dir");
  evaluate_cmd->add_option("--truth", o.truth, "Corpus manifest.json");
  evaluate_cmd->add_option("--out", o.out, "Report output path");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic invoice corpus");
  config_options(synth);
  synth->add_option("--seed", o.seed, "Generator seed");
  synth->add_option("--templates", o.templates, "Number of templates")->check(CLI::PositiveNumber);
  synth->add_option("--variants", o.variants, "Variants per template")->check(CLI::NonNegativeNumber);
  synth->add_option("--out", o.out, "Output directory");

  auto* bench = app.add_subcommand("benchmark", "Generate a corpus and evaluate end to end");
  config_options(bench);
  bench->add_option("--seed", o.seed, "Generator seed");
  bench->add_option("--templates", o.templates, "Number of templates")->check(CLI::PositiveNumber);
  bench->add_option("--variants", o.variants, "Variants per template")->check(CLI::NonNegativeNumber);
  bench->add_option("--work-dir", o.work_dir, "Scratch directory for the template store");
  bench->add_option("--out", o.out, "Report output path");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    if (o.print_config) {
      out << to_json(load_config(o)).dump(2) << "\n";
      return kExitOk;
    }
    if (add->parsed()) return cmd_add_template(o, out);
    if (remove->parsed()) return cmd_remove_template(o, out);
    if (extract->parsed()) return cmd_extract(o, out, err);
    if (match->parsed()) return cmd_match(o, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(o, out);
    if (synth->parsed()) return cmd_synth(o, out);
    if (bench->parsed()) return cmd_benchmark(o, out);
    out << app.help();
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace doccap
