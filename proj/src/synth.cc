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

#include "doccap/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "json.hpp"

#include "doccap/error.h"
#include "doccap/fileio.h"
#include "doccap/templatestore.h"
#include "doccap/textsim.h"

namespace doccap {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& invoice_fields() {
  static const std::vector<std::string> kFields = {"invoice_no", "date", "seller", "buyer",
                                                   "total"};
  return kFields;
}

namespace {

// --- deterministic helpers -------------------------------------------------

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// std distributions are implementation-defined; these are not.
int uniform(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

bool chance(std::mt19937_64& rng, double p) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

constexpr std::string_view kConsonants = "bcdfghjklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string pseudo_word(std::mt19937_64& rng, int length, bool capitalize) {
  std::string w;
  bool consonant = chance(rng, 0.7);
  while (static_cast<int>(w.size()) < length) {
    const auto& pool = consonant ? kConsonants : kVowels;
    w.push_back(pool[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pool.size()) - 1))]);
    consonant = !consonant;
  }
  if (capitalize) w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

std::string digits(std::mt19937_64& rng, int n, bool leading_nonzero) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    const int lo = (i == 0 && leading_nonzero) ? 1 : 0;
    s.push_back(static_cast<char>('0' + uniform(rng, lo, 9)));
  }
  return s;
}

int text_length(const std::string& s) {
  int n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// --- value styles ------------------------------------------------------------
// Per-template formats are recovered from the current value text, so a
// layout carries everything needed to draw fresh values.

const std::vector<std::string> kCompanySuffixes = {"Ltd.", "Inc.", "LLC", "GmbH", "Co.", "S.A."};
const std::vector<std::string> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

std::string company_name(std::mt19937_64& rng, const std::vector<int>& lengths,
                         const std::string& suffix) {
  std::string out;
  for (int len : lengths) {
    if (!out.empty()) out.push_back(' ');
    out += pseudo_word(rng, len, true);
  }
  return out + " " + suffix;
}

std::string random_date(std::mt19937_64& rng, int style) {
  const int year = uniform(rng, 2015, 2024);
  const int month = uniform(rng, 1, 12);
  const int day = uniform(rng, 1, 28);
  char buf[32];
  switch (style) {
    case 0:
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
      break;
    case 1:
      std::snprintf(buf, sizeof(buf), "%02d/%02d/%04d", day, month, year);
      break;
    case 2:
      std::snprintf(buf, sizeof(buf), "%02d.%02d.%04d", day, month, year);
      break;
    default:
      std::snprintf(buf, sizeof(buf), "%02d %s %04d", day, kMonths[month - 1].c_str(), year);
      break;
  }
  return buf;
}

int date_style(const std::string& value) {
  if (value.find(' ') != std::string::npos) return 3;
  if (value.find('/') != std::string::npos) return 1;
  if (value.find('.') != std::string::npos) return 2;
  return 0;
}

// Amount with `int_digits` integer digits, thousands separators, 2 decimals.
std::string random_amount(std::mt19937_64& rng, int int_digits, const std::string& currency) {
  const std::string d = digits(rng, int_digits, true);
  std::string grouped;
  for (int i = 0; i < int_digits; ++i) {
    if (i > 0 && (int_digits - i) % 3 == 0) grouped.push_back(',');
    grouped.push_back(d[static_cast<std::size_t>(i)]);
  }
  return currency + grouped + "." + digits(rng, 2, false);
}

// Replaces each digit run, keeping its length.
std::string redraw_digits(std::mt19937_64& rng, const std::string& value) {
  std::string out = value;
  for (auto& c : out) {
    if (c >= '0' && c <= '9') c = static_cast<char>('0' + uniform(rng, 0, 9));
  }
  return out;
}

std::string fresh_value(std::mt19937_64& rng, const std::string& field, const std::string& current,
                        bool same_shape) {
  if (field == "date") return random_date(rng, date_style(current));
  if (field == "total") {
    std::string currency;
    std::size_t i = 0;
    while (i < current.size() && !(current[i] >= '0' && current[i] <= '9')) ++i;
    currency = current.substr(0, i);
    int int_digits = 0;
    for (std::size_t k = i; k < current.size() && current[k] != '.'; ++k) {
      int_digits += current[k] >= '0' && current[k] <= '9';
    }
    return random_amount(rng, std::max(1, int_digits), currency);
  }
  if (field == "seller" || field == "buyer") {
    auto words = split_words(current);
    if (words.size() < 2) return redraw_digits(rng, current);
    const std::string suffix = words.back();
    words.pop_back();
    std::vector<int> lengths;
    for (const auto& w : words) {
      const int len = text_length(w);
      lengths.push_back(same_shape ? len : std::max(3, len + uniform(rng, -1, 1)));
    }
    return company_name(rng, lengths, suffix);
  }
  return redraw_digits(rng, current);
}

// --- layout ------------------------------------------------------------------

struct Segment {
  int x = 0;
  std::vector<std::string> words;
  std::string field;       // set for a label + value segment
  std::size_t label_words = 0;
};

int segment_width(const Segment& s, int cw) {
  int w = 0;
  for (const auto& word : s.words) w += text_length(word) * cw;
  return w + cw * static_cast<int>(s.words.size() > 0 ? s.words.size() - 1 : 0);
}

struct TemplateStyle {
  int char_width;
  int word_height;
  int pitch;
  int margin_x;
  int margin_y;
  int cell;
};

std::string unique_keyword(std::mt19937_64& rng, std::set<std::string>& used, int min_len,
                           int max_len) {
  for (;;) {
    std::string w = pseudo_word(rng, uniform(rng, min_len, max_len), true);
    if (used.insert(normalize_text(w)).second) return w;
  }
}

PageLayout generate_template_layout(std::mt19937_64& rng, std::set<std::string>& used) {
  TemplateStyle st;
  st.char_width = uniform(rng, 14, 18);
  st.word_height = uniform(rng, 26, 32);
  st.pitch = st.word_height + uniform(rng, 16, 24);
  st.margin_x = uniform(rng, 70, 110);
  st.margin_y = uniform(rng, 70, 110);
  st.cell = uniform(rng, 4, 6);

  PageLayout layout;
  layout.char_width = st.char_width;
  layout.cell = st.cell;
  const int cw = st.char_width;
  const int usable_w = layout.width - 2 * st.margin_x;
  const int rows = (layout.height - 2 * st.margin_y - st.word_height) / st.pitch + 1;

  // Template-specific vocabulary, disjoint from every other template.
  std::vector<std::string> vocab;
  for (int i = 0; i < 28; ++i) vocab.push_back(unique_keyword(rng, used, 3, 8));
  auto label = [&] { return unique_keyword(rng, used, 3, 6) + ":"; };

  // Field values in this template's formats.
  std::map<std::string, std::string> values;
  values["invoice_no"] = pick(rng, std::vector<std::string>{"INV-", "INV", "No.", "BL-", "F"}) +
                         digits(rng, uniform(rng, 4, 7), false);
  values["date"] = random_date(rng, uniform(rng, 0, 3));
  values["total"] = random_amount(rng, uniform(rng, 3, 6),
                                  pick(rng, std::vector<std::string>{"", "$", "EUR"}));
  for (const char* party : {"seller", "buyer"}) {
    std::vector<int> lengths(static_cast<std::size_t>(uniform(rng, 1, 2)));
    for (auto& l : lengths) l = uniform(rng, 4, 9);
    values[party] = company_name(rng, lengths, pick(rng, kCompanySuffixes));
  }

  // Field rows, distinct.
  std::map<int, std::string> field_rows;
  auto place = [&](const std::string& field, int lo, int hi) {
    for (;;) {
      const int r = uniform(rng, lo, hi);
      if (field_rows.try_emplace(r, field).second) return;
    }
  };
  place("seller", 0, 2);
  place("invoice_no", 3, 9);
  place("date", 3, 9);
  place("buyer", 5, 13);
  place("total", rows - 10, rows - 5);

  auto distractor = [&](int max_width) {
    Segment s;
    const int n = uniform(rng, 1, 5);
    for (int i = 0; i < n; ++i) {
      std::string w = chance(rng, 0.2) ? digits(rng, uniform(rng, 1, 4), true) +
                                             (chance(rng, 0.5) ? "." + digits(rng, 2, false) : "")
                                       : pick(rng, vocab);
      s.words.push_back(std::move(w));
      if (segment_width(s, cw) > max_width) {
        s.words.pop_back();
        break;
      }
    }
    return s;
  };

  for (int r = 0; r < rows; ++r) {
    std::vector<Segment> row;
    const bool edge_row = r < 5 || r >= rows - 5;
    if (auto it = field_rows.find(r); it != field_rows.end()) {
      Segment s;
      s.field = it->second;
      s.words.push_back(label());
      s.label_words = 1;
      for (auto& w : split_words(values[s.field])) s.words.push_back(w);
      const int width = segment_width(s, cw);
      const int half = usable_w / 2;
      const bool right = width <= half - 4 * cw && chance(rng, 0.4);
      s.x = st.margin_x + (right ? half : 0);
      // Companion text on the other half, well clear of the value.
      const int free_start = s.x + width + 6 * cw;
      if (!right && free_start < layout.width - st.margin_x - 4 * cw && chance(rng, 0.5)) {
        Segment d = distractor(layout.width - st.margin_x - free_start);
        if (!d.words.empty()) {
          d.x = std::max(free_start, st.margin_x + half);
          if (d.x + segment_width(d, cw) <= layout.width - st.margin_x) {
            row.push_back(std::move(s));
            row.push_back(std::move(d));
          } else {
            row.push_back(std::move(s));
          }
        } else {
          row.push_back(std::move(s));
        }
      } else {
        if (right && chance(rng, 0.5)) {
          Segment d = distractor(half - 6 * cw);
          d.x = st.margin_x;
          if (!d.words.empty()) row.push_back(std::move(d));
        }
        row.push_back(std::move(s));
      }
    } else if (edge_row || chance(rng, 0.75)) {
      Segment d = distractor(usable_w / 2 - 2 * cw);
      d.x = st.margin_x + (chance(rng, 0.3) ? uniform(rng, 0, usable_w / 4) : 0);
      if (!d.words.empty()) row.push_back(std::move(d));
      if (chance(rng, 0.5)) {
        Segment e = distractor(usable_w / 2 - 2 * cw);
        e.x = st.margin_x + usable_w / 2 + uniform(rng, 0, usable_w / 8);
        if (!e.words.empty() && e.x + segment_width(e, cw) <= layout.width - st.margin_x) {
          row.push_back(std::move(e));
        }
      }
    }

    const int y = st.margin_y + r * st.pitch;
    for (const auto& s : row) {
      int x = s.x;
      for (std::size_t i = 0; i < s.words.size(); ++i) {
        LayoutWord w;
        w.text = s.words[i];
        const int width = text_length(w.text) * cw;
        w.box = {x, y, x + width, y + st.word_height};
        if (!s.field.empty() && i >= s.label_words) w.field = s.field;
        layout.words.push_back(std::move(w));
        x += width + cw;
      }
    }
  }
  return layout;
}

}  // namespace

// --- rendering and transforms -------------------------------------------------

Image render_layout(const PageLayout& layout, int intensity_shift) {
  Image img(layout.width, layout.height, 255);
  for (const auto& w : layout.words) {
    const std::uint64_t seed = fnv1a(normalize_text(w.text));
    for (int y = std::max(0, w.box.y_min); y < std::min(layout.height, w.box.y_max); ++y) {
      const int cy = (y - w.box.y_min) / layout.cell;
      for (int x = std::max(0, w.box.x_min); x < std::min(layout.width, w.box.x_max); ++x) {
        const int cx = (x - w.box.x_min) / layout.cell;
        const std::uint64_t h =
            splitmix(seed ^ splitmix(static_cast<std::uint64_t>(cy) << 32 |
                                     static_cast<std::uint32_t>(cx)));
        const bool ink = (h & 3) != 0;
        img.at(x, y) = static_cast<std::uint8_t>(ink ? 20 + (h >> 8) % 80 : 170 + (h >> 16) % 60);
      }
    }
  }
  if (intensity_shift != 0) {
    for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(std::clamp(p + intensity_shift, 0, 255));
  }
  return img;
}

OcrPage layout_ocr(const PageLayout& layout) {
  OcrPage page{layout.width, layout.height, {}};
  page.words.reserve(layout.words.size());
  for (const auto& w : layout.words) page.words.push_back({w.text, w.box});
  return page;
}

Annotation layout_annotation(const PageLayout& layout) {
  Annotation a;
  for (const auto& w : layout.words) {
    if (w.field.empty()) continue;
    auto [it, inserted] = a.fields.try_emplace(w.field, FieldAnnotation{w.text, w.box});
    if (inserted) continue;
    auto& fa = it->second;
    fa.value += " " + w.text;
    fa.box = {std::min(fa.box.x_min, w.box.x_min), std::min(fa.box.y_min, w.box.y_min),
              std::max(fa.box.x_max, w.box.x_max), std::max(fa.box.y_max, w.box.y_max)};
  }
  return a;
}

PageLayout translate_layout(const PageLayout& layout, int dx, int dy) {
  PageLayout out = layout;
  for (auto& w : out.words) {
    w.box = {w.box.x_min + dx, w.box.y_min + dy, w.box.x_max + dx, w.box.y_max + dy};
    if (!w.box.within(out.width, out.height)) {
      throw ValidationError("translation moves word \"" + w.text + "\" off the page");
    }
  }
  return out;
}

PageLayout scale_layout(const PageLayout& layout, int factor) {
  if (factor < 1) throw ValidationError("scale factor must be >= 1");
  PageLayout out = layout;
  out.width *= factor;
  out.height *= factor;
  out.char_width *= factor;
  out.cell *= factor;
  for (auto& w : out.words) {
    w.box = {w.box.x_min * factor, w.box.y_min * factor, w.box.x_max * factor,
             w.box.y_max * factor};
  }
  return out;
}

PageLayout with_values(const PageLayout& layout, const std::map<std::string, std::string>& values) {
  PageLayout out;
  out.width = layout.width;
  out.height = layout.height;
  out.char_width = layout.char_width;
  out.cell = layout.cell;
  std::set<std::string> done;
  for (const auto& w : layout.words) {
    auto it = values.find(w.field);
    if (w.field.empty() || it == values.end()) {
      out.words.push_back(w);
      continue;
    }
    if (!done.insert(w.field).second) continue;  // later words of a replaced value
    int x = w.box.x_min;
    for (const auto& text : split_words(it->second)) {
      const int width = text_length(text) * layout.char_width;
      out.words.push_back({text, {x, w.box.y_min, x + width, w.box.y_max}, w.field});
      x += width + layout.char_width;
    }
  }
  return out;
}

std::map<std::string, std::string> random_values(std::mt19937_64& rng, const PageLayout& layout,
                                                 bool same_shape) {
  std::map<std::string, std::string> out;
  for (const auto& [field, fa] : layout_annotation(layout).fields) {
    out[field] = fresh_value(rng, field, fa.value, same_shape);
  }
  return out;
}

// --- corpus ------------------------------------------------------------------

namespace {

CorpusDocument make_document(std::string id, std::string parent, PageLayout layout, int shift) {
  CorpusDocument d;
  d.id = std::move(id);
  d.parent_id = std::move(parent);
  d.intensity_shift = shift;
  d.doc.image = render_layout(layout, shift);
  d.doc.ocr = layout_ocr(layout);
  d.doc.source = d.id;
  d.truth = layout_annotation(layout);
  d.layout = std::move(layout);
  return d;
}

std::string numbered(const std::string& prefix, int i, int width) {
  std::string n = std::to_string(i);
  return prefix + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(n.size()))), '0') + n;
}

}  // namespace

SyntheticCorpus generate_corpus(std::uint64_t seed, int n_templates, int variants_per_template,
                                const SynthOptions& options) {
  if (n_templates < 1) throw ValidationError("n_templates must be >= 1");
  if (variants_per_template < 0) throw ValidationError("variants_per_template must be >= 0");
  SyntheticCorpus corpus;
  corpus.seed = seed;
  std::set<std::string> used;
  for (int t = 0; t < n_templates; ++t) {
    std::mt19937_64 rng(splitmix(seed ^ splitmix(static_cast<std::uint64_t>(t) + 1)));
    const std::string tid = numbered("tpl-", t, 3);
    PageLayout base = generate_template_layout(rng, used);
    for (int v = 0; v < variants_per_template; ++v) {
      PageLayout layout = base;
      if (options.change_values) layout = with_values(layout, random_values(rng, layout, false));
      if (options.translate) {
        const int mx = static_cast<int>(options.max_translation * layout.width);
        const int my = static_cast<int>(options.max_translation * layout.height);
        layout = translate_layout(layout, uniform(rng, -mx, mx), uniform(rng, -my, my));
      }
      int shift = 0;
      if (options.shift_intensity && chance(rng, 0.5)) {
        shift = uniform(rng, -options.max_intensity_shift, options.max_intensity_shift);
      }
      corpus.variants.push_back(
          make_document(tid + numbered("-v", v, 2), tid, std::move(layout), shift));
    }
    corpus.templates.push_back(make_document(tid, "", std::move(base), 0));
  }
  return corpus;
}

void write_corpus(const SyntheticCorpus& corpus, const fs::path& dir, int canonical_width) {
  fs::create_directories(dir);
  if (fs::exists(dir / "manifest.json")) {
    throw StoreError("corpus directory already holds a manifest: " + dir.string());
  }
  TemplateDb db = TemplateDb::open(dir / "templates", canonical_width);
  for (const auto& t : corpus.templates) db.add(t.id, t.doc.image, t.doc.ocr, t.truth);

  json variants = json::array();
  for (const auto& v : corpus.variants) {
    const fs::path rel = fs::path("variants") / v.id;
    fs::create_directories(dir / rel);
    write_file(dir / rel / "image.png", encode_png(v.doc.image));
    write_file_atomic(dir / rel / "ocr.json", serialize_ocr(v.doc.ocr));
    write_file_atomic(dir / rel / "truth.json", serialize_annotation(v.truth));
    variants.push_back({{"id", v.id},
                        {"parent", v.parent_id},
                        {"image", (rel / "image.png").generic_string()},
                        {"ocr", (rel / "ocr.json").generic_string()},
                        {"truth", (rel / "truth.json").generic_string()}});
  }
  json templates = json::array();
  for (const auto& t : corpus.templates) templates.push_back(t.id);
  const json manifest = {{"seed", corpus.seed},
                         {"templates", std::move(templates)},
                         {"template_store", "templates"},
                         {"variants", std::move(variants)}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<ManifestEntry> read_manifest(const fs::path& manifest_path) {
  const json j = json::parse(read_text_file(manifest_path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("variants") || !j["variants"].is_array()) {
    throw ParseError("manifest: expected an object with a \"variants\" array");
  }
  const fs::path base = manifest_path.parent_path();
  std::vector<ManifestEntry> out;
  for (const auto& v : j["variants"]) {
    try {
      ManifestEntry e;
      e.id = v.at("id").get<std::string>();
      e.parent_id = v.value("parent", std::string());
      e.image = base / v.at("image").get<std::string>();
      e.ocr = base / v.at("ocr").get<std::string>();
      e.truth = parse_annotation(read_text_file(base / v.at("truth").get<std::string>()));
      out.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw ParseError(std::string("manifest entry: ") + e.what());
    }
  }
  return out;
}

}  // namespace doccap
