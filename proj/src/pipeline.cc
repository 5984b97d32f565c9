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

#include "doccap/pipeline.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "doccap/error.h"

namespace doccap {

using nlohmann::json;

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

void PipelineConfig::validate() const {
  if (canonical_width < kMinCanonicalWidth) {
    throw ValidationError("canonical_width must be >= " + std::to_string(kMinCanonicalWidth));
  }
  similarity.validate();
  if (!(expand_fraction > 0.0)) throw ValidationError("expand_fraction must be positive");
  if (expand_pad <= 0) throw ValidationError("expand_pad must be positive");
  if (!(overlap_threshold > 0.0 && overlap_threshold <= 1.0)) {
    throw ValidationError("overlap_threshold must lie in (0, 1]");
  }
}

json to_json(const PipelineConfig& cfg) {
  return {{"canonical_width", cfg.canonical_width},
          {"n_lines", cfg.similarity.n_lines},
          {"text_threshold", cfg.similarity.text_threshold},
          {"mask_digits", cfg.similarity.mask_digits},
          {"expand_fraction", cfg.expand_fraction},
          {"expand_pad", cfg.expand_pad},
          {"overlap_threshold", cfg.overlap_threshold}};
}

PipelineConfig config_from_json(const json& j, PipelineConfig base) {
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    auto need_number = [&] {
      if (!value.is_number()) throw ParseError("config: \"" + key + "\" must be a number");
    };
    auto need_int = [&] {
      if (!value.is_number_integer()) throw ParseError("config: \"" + key + "\" must be an integer");
    };
    if (key == "canonical_width") {
      need_int();
      base.canonical_width = value.get<int>();
    } else if (key == "n_lines") {
      need_int();
      base.similarity.n_lines = value.get<int>();
    } else if (key == "text_threshold") {
      need_number();
      base.similarity.text_threshold = value.get<double>();
    } else if (key == "mask_digits") {
      if (!value.is_boolean()) throw ParseError("config: \"mask_digits\" must be a boolean");
      base.similarity.mask_digits = value.get<bool>();
    } else if (key == "expand_fraction") {
      need_number();
      base.expand_fraction = value.get<double>();
    } else if (key == "expand_pad") {
      need_int();
      base.expand_pad = value.get<int>();
    } else if (key == "overlap_threshold") {
      need_number();
      base.overlap_threshold = value.get<double>();
    } else {
      throw ParseError("config: unknown key \"" + key + "\"");
    }
  }
  base.validate();
  return base;
}

// ---------------------------------------------------------------------------
// Template matching

PreparedDocument prepare(const Document& doc, const PipelineConfig& cfg) {
  if (doc.ocr.width != doc.image.width() || doc.ocr.height != doc.image.height()) {
    throw ValidationError("document OCR dimensions do not match its image");
  }
  PreparedDocument p{&doc, preprocess(doc.image, cfg.canonical_width), {}};
  p.spectrum = singular_spectrum(p.canonical);
  return p;
}

std::vector<TemplateCandidate> rank_templates(const PreparedDocument& input, const TemplateDb& db,
                                              const PipelineConfig& cfg) {
  if (db.canonical_width() != cfg.canonical_width) {
    throw ValidationError("template store canonical width differs from pipeline config");
  }
  const auto& sim = cfg.similarity;
  const std::string input_text =
      header_footer_text(input.doc->ocr, sim.n_lines, sim.mask_digits);

  std::vector<TemplateCandidate> out;
  out.reserve(db.size());
  for (const auto& [id, rec] : db.records()) {
    TemplateCandidate c;
    c.id = id;
    c.scores.sim_visual = visual_similarity(input.spectrum, rec.spectrum);
    c.scores.sim_text =
        fuzzy_match(input_text, header_footer_text(rec.ocr, sim.n_lines, sim.mask_digits));
    c.scores.sim_combined = c.scores.sim_text + c.scores.sim_visual;
    c.passes_threshold = c.scores.sim_text >= sim.text_threshold;
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.scores.sim_combined != b.scores.sim_combined) {
      return a.scores.sim_combined > b.scores.sim_combined;
    }
    return a.id < b.id;
  });
  return out;
}

std::optional<TemplateCandidate> select_best(const std::vector<TemplateCandidate>& candidates,
                                             double text_threshold) {
  const TemplateCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.scores.sim_text < text_threshold) continue;
    if (best == nullptr || c.scores.sim_combined > best->scores.sim_combined ||
        (c.scores.sim_combined == best->scores.sim_combined && c.id < best->id)) {
      best = &c;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

std::optional<TemplateMatch> match_template(const PreparedDocument& input, const TemplateDb& db,
                                            const PipelineConfig& cfg) {
  const auto best = select_best(rank_templates(input, db, cfg), cfg.similarity.text_threshold);
  if (!best) return std::nullopt;
  return TemplateMatch{db.find(best->id), best->scores};
}

std::optional<TemplateMatch> match_template(const Document& doc, const TemplateDb& db,
                                            const PipelineConfig& cfg) {
  return match_template(prepare(doc, cfg), db, cfg);
}

// ---------------------------------------------------------------------------
// Region proposal

Rect expand_rect(const Rect& r, double fraction, int pad, int bound_w, int bound_h) {
  const int dx = round_half_up(fraction * r.width()) + pad;
  const int dy = round_half_up(fraction * r.height()) + pad;
  return {std::clamp(r.x_min - dx, 0, bound_w), std::clamp(r.y_min - dy, 0, bound_h),
          std::clamp(r.x_max + dx, 0, bound_w), std::clamp(r.y_max + dy, 0, bound_h)};
}

Rect scale_rect(const Rect& r, double sx, double sy) {
  return {round_half_up(r.x_min * sx), round_half_up(r.y_min * sy), round_half_up(r.x_max * sx),
          round_half_up(r.y_max * sy)};
}

namespace {

struct Frame {
  double sx = 1.0;  // canonical / native
  double sy = 1.0;
};

Frame frame_of(int native_w, int native_h, const CanonicalImage& canonical) {
  return {static_cast<double>(canonical.width()) / native_w,
          static_cast<double>(canonical.height()) / native_h};
}

Rect clamp_rect(Rect r, int w, int h) {
  r.x_min = std::clamp(r.x_min, 0, w);
  r.x_max = std::clamp(r.x_max, r.x_min, w);
  r.y_min = std::clamp(r.y_min, 0, h);
  r.y_max = std::clamp(r.y_max, r.y_min, h);
  return r;
}

// The template's expanded field rectangle in template canonical space.
Rect template_field_region(const TemplateRecord& tpl, const FieldAnnotation& field,
                           const PipelineConfig& cfg) {
  const int cw = tpl.canonical.width();
  const int ch = tpl.canonical.height();
  const Frame f = frame_of(tpl.native_width, tpl.native_height, tpl.canonical);
  Rect r = clamp_rect(scale_rect(field.box, f.sx, f.sy), cw, ch);
  // Keep at least one canonical pixel so tiny boxes still produce a patch.
  if (r.width() == 0) r.x_max < cw ? ++r.x_max : --r.x_min;
  if (r.height() == 0) r.y_max < ch ? ++r.y_max : --r.y_min;
  return expand_rect(r, cfg.expand_fraction, cfg.expand_pad, cw, ch);
}

Rect to_native(const Rect& canonical_rect, const Frame& f) {
  return scale_rect(canonical_rect, 1.0 / f.sx, 1.0 / f.sy);
}

}  // namespace

std::vector<RegionProposal> propose_regions(const PreparedDocument& input,
                                            const TemplateRecord& tpl,
                                            const PipelineConfig& cfg) {
  std::vector<RegionProposal> out;
  if (tpl.annotation.fields.empty()) return out;
  const SceneCorrelator correlator(input.canonical.image());
  const int cw = input.canonical.width();
  const int ch = input.canonical.height();

  for (const auto& [name, field] : tpl.annotation.fields) {
    const Rect expanded = template_field_region(tpl, field, cfg);
    RegionProposal p;
    p.field = name;
    const Image patch = tpl.canonical.image().crop(expanded.x_min, expanded.y_min,
                                                   expanded.width(), expanded.height());
    if (patch.width() > cw || patch.height() > ch) {
      p.region = expanded;
      p.degenerate = true;
      out.push_back(std::move(p));
      continue;
    }
    const MatchPeak peak = correlator.match(patch);
    if (peak.degenerate) {
      p.region = clamp_rect(expanded, cw, ch);
      p.degenerate = true;
    } else {
      p.region = {peak.x, peak.y, peak.x + patch.width(), peak.y + patch.height()};
      p.score = peak.score;
    }
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Final area selection

std::vector<WordPair> common_words(const OcrPage& input, const Rect& input_region,
                                   const OcrPage& tpl, const Rect& template_region,
                                   bool mask_digits) {
  // normalized text -> (occurrences, index of the first occurrence)
  using Counts = std::map<std::string, std::pair<int, std::size_t>>;
  auto collect = [&](const OcrPage& page, const Rect& region) {
    Counts counts;
    for (std::size_t i = 0; i < page.words.size(); ++i) {
      const auto& w = page.words[i];
      if (!region.contains(w.box.center())) continue;
      std::string key = normalize_text(w.text, mask_digits);
      if (key.empty()) continue;
      auto [it, inserted] = counts.try_emplace(std::move(key), 0, i);
      ++it->second.first;
    }
    return counts;
  };
  const Counts in = collect(input, input_region);
  const Counts tp = collect(tpl, template_region);

  std::vector<WordPair> pairs;
  for (const auto& [key, entry] : in) {
    if (entry.first != 1) continue;
    auto it = tp.find(key);
    if (it == tp.end() || it->second.first != 1) continue;
    pairs.push_back({entry.second, it->second.second});
  }
  return pairs;
}

std::vector<FieldResult> select_final_areas(const PreparedDocument& input,
                                            const TemplateRecord& tpl,
                                            const std::vector<RegionProposal>& proposals,
                                            const PipelineConfig& cfg) {
  const OcrPage& in_page = input.doc->ocr;
  const int in_w = in_page.width;
  const int in_h = in_page.height;
  const Frame in_frame = frame_of(in_w, in_h, input.canonical);
  const Frame tpl_frame = frame_of(tpl.native_width, tpl.native_height, tpl.canonical);
  const double ratio_x = static_cast<double>(in_w) / tpl.native_width;
  const double ratio_y = static_cast<double>(in_h) / tpl.native_height;

  std::vector<FieldResult> out;
  out.reserve(proposals.size());
  for (const auto& p : proposals) {
    auto fit = tpl.annotation.fields.find(p.field);
    if (fit == tpl.annotation.fields.end()) {
      throw ValidationError("proposal for unknown field \"" + p.field + "\"");
    }
    const FieldAnnotation& value = fit->second;
    const Point value_center = value.box.center();
    const double box_w = value.box.width() * ratio_x;
    const double box_h = value.box.height() * ratio_y;

    const Rect in_region = to_native(p.region, in_frame);
    const Rect tpl_region = to_native(template_field_region(tpl, value, cfg), tpl_frame);
    const auto pairs = common_words(in_page, in_region, tpl.ocr, tpl_region,
                                    cfg.similarity.mask_digits);

    FieldResult r;
    r.field = p.field;
    Point center;
    if (!pairs.empty()) {
      const WordPair* best = nullptr;
      double best_d = std::numeric_limits<double>::infinity();
      Point best_c;
      for (const auto& pair : pairs) {
        const Point c = tpl.ocr.words[pair.template_word].box.center();
        const double d = std::hypot(c.x - value_center.x, c.y - value_center.y);
        const bool tie_wins = d == best_d && (c.y < best_c.y || (c.y == best_c.y && c.x < best_c.x));
        if (d < best_d || tie_wins) {
          best = &pair;
          best_d = d;
          best_c = c;
        }
      }
      // Displacement from anchor to value, normalized by the template page
      // and re-expressed in input page units.
      const double vx = (value_center.x - best_c.x) / tpl.native_width * in_w;
      const double vy = (value_center.y - best_c.y) / tpl.native_height * in_h;
      const Point anchor = in_page.words[best->input_word].box.center();
      center = {anchor.x + vx, anchor.y + vy};
      r.anchored = true;
    } else {
      const Point pc = p.region.center();
      center = {pc.x / in_frame.sx, pc.y / in_frame.sy};
    }
    r.box = clamp_rect({round_half_up(center.x - box_w / 2.0), round_half_up(center.y - box_h / 2.0),
                        round_half_up(center.x + box_w / 2.0), round_half_up(center.y + box_h / 2.0)},
                       in_w, in_h);
    out.push_back(std::move(r));
  }
  return out;
}

std::string extract_text(const OcrPage& ocr, const Rect& box, double overlap_threshold) {
  OcrPage selected{ocr.width, ocr.height, {}};
  for (const auto& w : ocr.words) {
    const long long area = w.box.area();
    if (area <= 0) continue;
    const double frac = static_cast<double>(intersection_area(w.box, box)) / area;
    if (frac > overlap_threshold) selected.words.push_back(w);
  }
  std::string text;
  for (const auto& line : assemble_lines(selected)) {
    for (const auto& w : line.words) {
      if (!text.empty()) text.push_back(' ');
      text += w.text;
    }
  }
  return text;
}

ExtractionResult process_document(const Document& doc, const TemplateDb& db,
                                  const PipelineConfig& cfg) {
  cfg.validate();
  const PreparedDocument input = prepare(doc, cfg);
  ExtractionResult result;
  const auto match = match_template(input, db, cfg);
  if (!match) return result;
  result.template_id = match->record->id;
  result.scores = match->scores;
  const auto proposals = propose_regions(input, *match->record, cfg);
  result.fields = select_final_areas(input, *match->record, proposals, cfg);
  for (auto& f : result.fields) f.text = extract_text(doc.ocr, f.box, cfg.overlap_threshold);
  return result;
}

// ---------------------------------------------------------------------------
// Reports

json to_json(const ExtractionResult& result) {
  json fields = json::object();
  for (const auto& f : result.fields) {
    fields[f.field] = {{"value", f.text},
                       {"position", {f.box.x_min, f.box.y_min, f.box.x_max, f.box.y_max}},
                       {"anchored", f.anchored}};
  }
  return {{"template_id", result.template_id ? json(*result.template_id) : json(nullptr)},
          {"sim_visual", result.scores.sim_visual},
          {"sim_text", result.scores.sim_text},
          {"sim_combined", result.scores.sim_combined},
          {"fields", std::move(fields)}};
}

json to_report(const ExtractionResult& result, const PipelineConfig& cfg) {
  json j = to_json(result);
  j["config"] = to_json(cfg);
  return j;
}

ExtractionResult extraction_from_json(const json& j) {
  try {
    ExtractionResult r;
    if (!j.at("template_id").is_null()) r.template_id = j.at("template_id").get<std::string>();
    r.scores.sim_visual = j.at("sim_visual").get<double>();
    r.scores.sim_text = j.at("sim_text").get<double>();
    r.scores.sim_combined = j.at("sim_combined").get<double>();
    for (const auto& [name, f] : j.at("fields").items()) {
      FieldResult fr;
      fr.field = name;
      fr.text = f.at("value").get<std::string>();
      const auto& pos = f.at("position");
      if (!pos.is_array() || pos.size() != 4) {
        throw ParseError("report field \"" + name + "\": position must have 4 entries");
      }
      fr.box = {pos[0].get<int>(), pos[1].get<int>(), pos[2].get<int>(), pos[3].get<int>()};
      fr.anchored = f.value("anchored", false);
      r.fields.push_back(std::move(fr));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("extraction report: ") + e.what());
  }
}

Annotation to_annotation(const ExtractionResult& result) {
  Annotation a;
  for (const auto& f : result.fields) a.fields[f.field] = {f.text, f.box};
  return a;
}

}  // namespace doccap
