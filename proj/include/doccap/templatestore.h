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

#include "doccap/docmodel.h"
#include "doccap/imaging.h"

namespace doccap {

struct TemplateRecord {
  std::string id;
  CanonicalImage canonical;
  SingularSpectrum spectrum;
  OcrPage ocr;
  Annotation annotation;
  int native_width = 0;
  int native_height = 0;

  friend bool operator==(const TemplateRecord&, const TemplateRecord&) = default;
};

// On-disk database of annotated exemplars. Each record lives in
// <root>/<id>/ with image.png, ocr.json, annotation.json, meta.json and
// spectrum.bin (u64 LE count followed by f64 LE values).
//
// Single writer: mutations need exclusive access to the handle; const
// methods may run concurrently.
class TemplateDb {
 public:
  // Loads every valid record under root. Invalid records are skipped and
  // reported through warnings(). Throws StoreError if root is unreadable.
  static TemplateDb load(const std::filesystem::path& root,
                         int canonical_width = kDefaultCanonicalWidth);

  // Creates root if missing, then loads.
  static TemplateDb open(const std::filesystem::path& root,
                         int canonical_width = kDefaultCanonicalWidth);

  // Validates, persists atomically, then inserts. Throws ValidationError for
  // a duplicate id or out-of-bounds annotation, StoreError on I/O failure.
  const TemplateRecord& add(const std::string& id, const Image& image, const OcrPage& ocr,
                            const Annotation& annotation);

  // Throws ValidationError for an unknown id.
  void remove(const std::string& id);

  const TemplateRecord* find(const std::string& id) const;
  const std::map<std::string, TemplateRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const std::filesystem::path& root() const { return root_; }
  int canonical_width() const { return canonical_width_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  TemplateDb(std::filesystem::path root, int canonical_width)
      : root_(std::move(root)), canonical_width_(canonical_width) {}

  std::filesystem::path root_;
  int canonical_width_;
  std::map<std::string, TemplateRecord> records_;
  std::vector<std::string> warnings_;
};

// Builds a record in memory (no persistence); shared by the store and tests.
TemplateRecord make_template_record(const std::string& id, const Image& image, const OcrPage& ocr,
                                    const Annotation& annotation, int canonical_width);

// Little-endian spectrum sidecar encoding.
std::vector<std::uint8_t> encode_spectrum(const SingularSpectrum& s);
SingularSpectrum decode_spectrum(std::span<const std::uint8_t> bytes);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

bool is_valid_template_id(const std::string& id);

}  // namespace doccap
