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

#include "doccap/docmodel.h"

#include <algorithm>
#include <set>
#include <vector>

#include "json.hpp"

#include "doccap/error.h"

namespace doccap {

using nlohmann::json;

long long intersection_area(const Rect& a, const Rect& b) {
  const long long w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const long long h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  return (w > 0 && h > 0) ? w * h : 0;
}

namespace {

// Parses JSON and rejects duplicate keys in any object, which the default
// parser would silently collapse.
json parse_strict(std::string_view bytes, const char* what) {
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  auto callback = [&](int /*depth*/, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        keys.emplace_back();
        break;
      case json::parse_event_t::object_end:
        keys.pop_back();
        break;
      case json::parse_event_t::key: {
        const auto& k = parsed.get_ref<const std::string&>();
        if (!keys.back().insert(k).second && duplicate.empty()) duplicate = k;
        break;
      }
      default:
        break;
    }
    return true;
  };
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end(), callback);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": malformed JSON at byte " + std::to_string(e.byte));
  }
  if (!duplicate.empty()) {
    throw ValidationError(std::string(what) + ": duplicate key \"" + duplicate + "\"");
  }
  return j;
}

// Four integers; returns false on shape or type mismatch.
bool read_rect(const json& j, Rect& r) {
  if (!j.is_array() || j.size() != 4) return false;
  for (const auto& v : j) {
    if (!v.is_number_integer()) return false;
  }
  auto get = [&](int i) {
    const auto v = j[i].get<long long>();
    return static_cast<int>(std::clamp<long long>(v, -1, 1'000'000'000));
  };
  r = {get(0), get(1), get(2), get(3)};
  return true;
}

json rect_json(const Rect& r) { return json::array({r.x_min, r.y_min, r.x_max, r.y_max}); }

std::string at_word(std::size_t i) { return " at word " + std::to_string(i); }

}  // namespace

void validate(const OcrPage& page) {
  if (page.width <= 0 || page.height <= 0) {
    throw ValidationError("page dimensions must be positive");
  }
  for (std::size_t i = 0; i < page.words.size(); ++i) {
    const auto& w = page.words[i];
    if (w.text.empty()) throw ValidationError("empty text" + at_word(i));
    if (w.text.find_first_of("\r\n") != std::string::npos) {
      throw ValidationError("line break in text" + at_word(i));
    }
    if (!w.box.has_positive_area()) throw ValidationError("invalid rect" + at_word(i));
    if (!w.box.within(page.width, page.height)) {
      throw ValidationError("box outside page" + at_word(i));
    }
  }
}

OcrPage parse_ocr(std::string_view bytes) {
  const json j = parse_strict(bytes, "ocr");
  if (!j.is_object()) throw ParseError("ocr: top level must be an object");
  for (const char* key : {"width", "height", "words"}) {
    if (!j.contains(key)) throw ParseError(std::string("ocr: missing \"") + key + "\"");
  }
  if (!j["width"].is_number_integer() || !j["height"].is_number_integer()) {
    throw ParseError("ocr: width and height must be integers");
  }
  if (!j["words"].is_array()) throw ParseError("ocr: \"words\" must be an array");

  OcrPage page;
  const auto w = j["width"].get<long long>();
  const auto h = j["height"].get<long long>();
  if (w <= 0 || h <= 0 || w > 1'000'000 || h > 1'000'000) {
    throw ValidationError("ocr: non-positive page dimensions");
  }
  page.width = static_cast<int>(w);
  page.height = static_cast<int>(h);

  const auto& words = j["words"];
  page.words.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& jw = words[i];
    if (!jw.is_object() || !jw.contains("text") || !jw.contains("box")) {
      throw ParseError("ocr: word must have \"text\" and \"box\"" + at_word(i));
    }
    if (!jw["text"].is_string()) throw ParseError("ocr: text must be a string" + at_word(i));
    OcrWord word;
    word.text = jw["text"].get<std::string>();
    if (!read_rect(jw["box"], word.box)) {
      throw ParseError("ocr: box must be 4 integers" + at_word(i));
    }
    page.words.push_back(std::move(word));
  }
  validate(page);
  return page;
}

std::string serialize_ocr(const OcrPage& page) {
  json words = json::array();
  for (const auto& w : page.words) {
    words.push_back({{"text", w.text}, {"box", rect_json(w.box)}});
  }
  json j = {{"width", page.width}, {"height", page.height}, {"words", std::move(words)}};
  return j.dump(1) + "\n";
}

Annotation parse_annotation(std::string_view bytes) {
  const json j = parse_strict(bytes, "annotation");
  if (!j.is_object()) throw ParseError("annotation: top level must be an object");
  Annotation a;
  for (const auto& [name, jf] : j.items()) {
    const std::string where = "annotation field \"" + name + "\"";
    if (name.empty()) throw ValidationError("annotation: empty field name");
    if (!jf.is_object() || !jf.contains("position") || !jf.contains("value")) {
      throw ParseError(where + ": expected {\"position\": [...], \"value\": \"...\"}");
    }
    const auto& pos = jf["position"];
    if (!pos.is_array()) throw ParseError(where + ": position must be an array");
    if (pos.size() != 4) throw ValidationError(where + ": position must have 4 entries");
    if (!jf["value"].is_string()) throw ParseError(where + ": value must be a string");
    FieldAnnotation fa;
    if (!read_rect(pos, fa.box)) throw ParseError(where + ": position entries must be integers");
    if (!fa.box.has_positive_area()) throw ValidationError(where + ": invalid rect");
    fa.value = jf["value"].get<std::string>();
    a.fields.emplace(name, std::move(fa));
  }
  return a;
}

std::string serialize_annotation(const Annotation& annotation) {
  json j = json::object();
  for (const auto& [name, fa] : annotation.fields) {
    j[name] = {{"position", rect_json(fa.box)}, {"value", fa.value}};
  }
  return j.dump(2) + "\n";
}

}  // namespace doccap
