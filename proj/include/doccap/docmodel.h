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

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "doccap/image.h"

namespace doccap {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Axis-aligned rectangle in integer pixels, origin top-left. The max edges
// are exclusive, so width() == x_max - x_min.
struct Rect {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min; }
  int height() const { return y_max - y_min; }
  long long area() const {
    return static_cast<long long>(width()) * static_cast<long long>(height());
  }
  Point center() const {
    return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0};
  }
  // Ordered, non-negative corners.
  bool valid() const {
    return x_min >= 0 && y_min >= 0 && x_min <= x_max && y_min <= y_max;
  }
  bool has_positive_area() const { return valid() && width() > 0 && height() > 0; }
  bool within(int w, int h) const { return valid() && x_max <= w && y_max <= h; }
  // Inclusive on all four edges.
  bool contains(Point p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

long long intersection_area(const Rect& a, const Rect& b);

struct OcrWord {
  std::string text;
  Rect box;

  friend bool operator==(const OcrWord&, const OcrWord&) = default;
};

struct OcrPage {
  int width = 0;
  int height = 0;
  std::vector<OcrWord> words;

  friend bool operator==(const OcrPage&, const OcrPage&) = default;
};

struct FieldAnnotation {
  std::string value;
  Rect box;

  friend bool operator==(const FieldAnnotation&, const FieldAnnotation&) = default;
};

// Field name -> annotated value. Names are case-sensitive keys.
struct Annotation {
  std::map<std::string, FieldAnnotation> fields;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// A single-page input: raster plus its OCR output.
struct Document {
  Image image;
  OcrPage ocr;
  std::string source;
};

// Throws ParseError (malformed syntax) or ValidationError (invariant
// violation); messages name the offending word index.
OcrPage parse_ocr(std::string_view bytes);
std::string serialize_ocr(const OcrPage& page);

// Throws ParseError / ValidationError naming the offending field.
Annotation parse_annotation(std::string_view bytes);
std::string serialize_annotation(const Annotation& annotation);

// Checks OcrPage invariants; throws ValidationError.
void validate(const OcrPage& page);

}  // namespace doccap
