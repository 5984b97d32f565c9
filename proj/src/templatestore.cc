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

#include "doccap/templatestore.h"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

#include <unistd.h>

#include "json.hpp"

#include "doccap/error.h"
#include "doccap/fileio.h"

namespace doccap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kImageFile = "image.png";
constexpr const char* kOcrFile = "ocr.json";
constexpr const char* kAnnotationFile = "annotation.json";
constexpr const char* kMetaFile = "meta.json";
constexpr const char* kSpectrumFile = "spectrum.bin";

void check_annotation_bounds(const Annotation& annotation, int width, int height) {
  for (const auto& [name, field] : annotation.fields) {
    if (!field.box.has_positive_area()) {
      throw ValidationError("annotation field \"" + name + "\": invalid rect");
    }
    if (!field.box.within(width, height)) {
      throw ValidationError("annotation field \"" + name + "\": box outside image bounds");
    }
  }
}

std::string to_string(std::span<const std::uint8_t> bytes) {
  return std::string(bytes.begin(), bytes.end());
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Loads one record directory. Appends a warning when the spectrum sidecar
// is stale and had to be recomputed.
TemplateRecord load_record(const fs::path& dir, const std::string& id, int canonical_width,
                           std::vector<std::string>& warnings) {
  const json meta = json::parse(to_string(read_file(dir / kMetaFile)), nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) throw ParseError("meta.json is malformed");
  if (meta.value("id", std::string()) != id) throw ValidationError("meta.json id mismatch");

  const auto image_bytes = read_file(dir / kImageFile);
  const Image image = decode_image(image_bytes);
  if (meta.value("width", -1) != image.width() || meta.value("height", -1) != image.height()) {
    throw ValidationError("meta.json dimensions do not match image.png");
  }
  const OcrPage ocr = parse_ocr(to_string(read_file(dir / kOcrFile)));
  const Annotation annotation = parse_annotation(to_string(read_file(dir / kAnnotationFile)));

  TemplateRecord rec;
  rec.id = id;
  rec.native_width = image.width();
  rec.native_height = image.height();
  if (ocr.width != image.width() || ocr.height != image.height()) {
    throw ValidationError("ocr page dimensions do not match image");
  }
  check_annotation_bounds(annotation, image.width(), image.height());
  rec.ocr = ocr;
  rec.annotation = annotation;
  rec.canonical = preprocess(image, canonical_width);

  bool fresh = meta.value("image_sha256", std::string()) == sha256_hex(image_bytes) &&
               meta.value("canonical_width", -1) == canonical_width;
  if (fresh) {
    try {
      const auto bytes = read_file(dir / kSpectrumFile);
      fresh = meta.value("spectrum_sha256", std::string()) == sha256_hex(bytes);
      if (fresh) rec.spectrum = decode_spectrum(bytes);
      const auto expected = static_cast<std::size_t>(
          std::min(rec.canonical.width(), rec.canonical.height()));
      fresh = fresh && rec.spectrum.values.size() == expected;
    } catch (const Error&) {
      fresh = false;
    }
  }
  if (!fresh) {
    warnings.push_back("template \"" + id + "\": spectrum sidecar is stale, recomputed");
    rec.spectrum = singular_spectrum(rec.canonical);
  }
  return rec;
}

std::string unique_suffix() {
  static std::atomic<unsigned> counter{0};
  return std::to_string(::getpid()) + "-" + std::to_string(counter++);
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::vector<std::uint8_t> encode_spectrum(const SingularSpectrum& s) {
  std::vector<std::uint8_t> out;
  out.reserve(8 * (s.values.size() + 1));
  auto put = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put(s.values.size());
  for (double v : s.values) put(std::bit_cast<std::uint64_t>(v));
  return out;
}

SingularSpectrum decode_spectrum(std::span<const std::uint8_t> bytes) {
  auto get = [&](std::size_t offset) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
    return v;
  };
  if (bytes.size() < 8) throw ParseError("spectrum: truncated header");
  const std::uint64_t n = get(0);
  if (n > (bytes.size() - 8) / 8 || bytes.size() != 8 + 8 * n) {
    throw ParseError("spectrum: length prefix does not match payload");
  }
  SingularSpectrum s;
  s.values.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    s.values[i] = std::bit_cast<double>(get(8 + 8 * i));
    if (!(s.values[i] >= 0.0) || (i > 0 && s.values[i] > s.values[i - 1])) {
      throw ParseError("spectrum: values must be non-negative and non-increasing");
    }
  }
  return s;
}

bool is_valid_template_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '-';
  });
}

TemplateRecord make_template_record(const std::string& id, const Image& image, const OcrPage& ocr,
                                    const Annotation& annotation, int canonical_width) {
  if (!is_valid_template_id(id)) {
    throw ValidationError("invalid template id \"" + id + "\" (allowed: A-Z a-z 0-9 . _ -)");
  }
  if (image.empty()) throw ValidationError("template image is empty");
  validate(ocr);
  if (ocr.width != image.width() || ocr.height != image.height()) {
    throw ValidationError("ocr page dimensions do not match image");
  }
  check_annotation_bounds(annotation, image.width(), image.height());
  TemplateRecord rec;
  rec.id = id;
  rec.native_width = image.width();
  rec.native_height = image.height();
  rec.ocr = ocr;
  rec.annotation = annotation;
  rec.canonical = preprocess(image, canonical_width);
  rec.spectrum = singular_spectrum(rec.canonical);
  return rec;
}

TemplateDb TemplateDb::load(const fs::path& root, int canonical_width) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw StoreError("template store \"" + root.string() + "\" is not a readable directory");
  }
  TemplateDb db(root, canonical_width);
  std::vector<fs::path> dirs;
  for (fs::directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_directory()) dirs.push_back(it->path());
  }
  if (ec) throw StoreError("cannot list template store: " + ec.message());
  std::sort(dirs.begin(), dirs.end());

  for (const auto& dir : dirs) {
    const std::string id = dir.filename().string();
    if (!id.empty() && id.front() == '.') continue;  // temp or hidden
    if (!is_valid_template_id(id)) {
      db.warnings_.push_back("skipping \"" + id + "\": not a valid template id");
      continue;
    }
    try {
      db.records_.emplace(id, load_record(dir, id, canonical_width, db.warnings_));
    } catch (const std::exception& e) {
      db.warnings_.push_back("skipping template \"" + id + "\": " + e.what());
    }
  }
  return db;
}

TemplateDb TemplateDb::open(const fs::path& root, int canonical_width) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw StoreError("cannot create template store: " + ec.message());
  return load(root, canonical_width);
}

const TemplateRecord& TemplateDb::add(const std::string& id, const Image& image,
                                      const OcrPage& ocr, const Annotation& annotation) {
  if (records_.contains(id)) throw ValidationError("duplicate template id \"" + id + "\"");
  TemplateRecord rec = make_template_record(id, image, ocr, annotation, canonical_width_);

  const fs::path final_dir = root_ / id;
  std::error_code ec;
  if (fs::exists(final_dir, ec)) {
    throw ValidationError("duplicate template id \"" + id + "\" (directory exists on disk)");
  }
  const fs::path tmp = root_ / (".tmp-" + id + "-" + unique_suffix());
  try {
    fs::create_directories(tmp);
    const auto png = encode_png(image);
    const auto spectrum = encode_spectrum(rec.spectrum);
    write_file(tmp / kImageFile, png);
    write_file(tmp / kOcrFile, as_bytes(serialize_ocr(ocr)));
    write_file(tmp / kAnnotationFile, as_bytes(serialize_annotation(annotation)));
    write_file(tmp / kSpectrumFile, spectrum);
    const json meta = {{"id", id},
                       {"width", image.width()},
                       {"height", image.height()},
                       {"canonical_width", canonical_width_},
                       {"image_sha256", sha256_hex(png)},
                       {"spectrum_sha256", sha256_hex(spectrum)}};
    write_file(tmp / kMetaFile, as_bytes(meta.dump(2) + "\n"));
    fs::rename(tmp, final_dir);
  } catch (const std::exception& e) {
    fs::remove_all(tmp, ec);
    throw StoreError("cannot write template \"" + id + "\": " + e.what());
  }
  return records_.emplace(id, std::move(rec)).first->second;
}

void TemplateDb::remove(const std::string& id) {
  auto it = records_.find(id);
  if (it == records_.end()) throw ValidationError("unknown template id \"" + id + "\"");
  const fs::path dir = root_ / id;
  const fs::path trash = root_ / (".del-" + id + "-" + unique_suffix());
  std::error_code ec;
  fs::rename(dir, trash, ec);
  if (ec) throw StoreError("cannot remove template \"" + id + "\": " + ec.message());
  fs::remove_all(trash, ec);
  records_.erase(it);
}

const TemplateRecord* TemplateDb::find(const std::string& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

}  // namespace doccap
