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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace doccap {

// Row-major 8-bit grayscale raster.
class Image {
 public:
  Image() = default;
  Image(int width, int height, std::uint8_t fill = 0);
  Image(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  // Copy of the sub-rectangle [x0, x0 + w) x [y0, y0 + h). Must lie inside.
  Image crop(int x0, int y0, int w, int h) const;
  Image transposed() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Luma conversion applied to colour inputs: 0.299 R + 0.587 G + 0.114 B.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Decodes PNG (any colour type) or binary PGM (P5, maxval <= 255).
// Format is detected from the magic bytes, not the file extension.
Image decode_image(std::span<const std::uint8_t> bytes);
Image read_image(const std::filesystem::path& path);

// 8-bit grayscale PNG. Output is deterministic for identical pixels.
std::vector<std::uint8_t> encode_png(const Image& img);
std::vector<std::uint8_t> encode_pgm(const Image& img);

}  // namespace doccap
