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

#include <memory>
#include <span>
#include <vector>

#include "doccap/image.h"

namespace doccap {

inline constexpr int kDefaultCanonicalWidth = 512;
inline constexpr int kMinCanonicalWidth = 64;
inline constexpr double kAspectRatio = 1.414;

// Height of the canonical frame for a given width: round(1.414 * width).
int canonical_height(int canonical_width);

// Fixed-shape, intensity-normalized image. Only produced by preprocess().
class CanonicalImage {
 public:
  // Empty; width() and height() are 0.
  CanonicalImage() = default;

  const Image& image() const { return image_; }
  int width() const { return image_.width(); }
  int height() const { return image_.height(); }

  friend bool operator==(const CanonicalImage&, const CanonicalImage&) = default;

 private:
  friend CanonicalImage preprocess(const Image& img, int canonical_width);
  explicit CanonicalImage(Image img) : image_(std::move(img)) {}

  Image image_;
};

// Resamples to canonical_width x canonical_height(canonical_width) with
// bilinear interpolation, then stretches intensities so the 5th percentile
// lands on 16 and the 95th on 240. Constant images become uniform 128.
CanonicalImage preprocess(const Image& img, int canonical_width = kDefaultCanonicalWidth);

// Bilinear resampling with pixel-centre alignment; identity at equal size.
Image resample_bilinear(const Image& img, int width, int height);

// Singular values of the pixel matrix, non-increasing, all >= 0.
struct SingularSpectrum {
  std::vector<double> values;

  friend bool operator==(const SingularSpectrum&, const SingularSpectrum&) = default;
};

SingularSpectrum singular_spectrum(const CanonicalImage& img);
SingularSpectrum singular_spectrum(const Image& img);
// Row-major rows x cols real matrix. Throws ComputationError on SVD failure.
SingularSpectrum singular_spectrum(std::span<const double> row_major, int rows, int cols);

// Cosine of the angle between two spectra; 0 if either is all-zero.
// Throws ValidationError on length mismatch.
double visual_similarity(const SingularSpectrum& a, const SingularSpectrum& b);

struct MatchPeak {
  int x = 0;
  int y = 0;
  double score = 0.0;
  // Set when the patch has zero variance; (x, y) is then (0, 0).
  bool degenerate = false;
};

// Mean-centred cross-correlation of a patch over every placement in a
// scene, divided by the product of the centred norms. Holds the scene's
// spectrum and integral images so many patches can be matched cheaply.
class SceneCorrelator {
 public:
  explicit SceneCorrelator(const Image& scene);
  ~SceneCorrelator();
  SceneCorrelator(SceneCorrelator&&) noexcept;
  SceneCorrelator& operator=(SceneCorrelator&&) noexcept;

  // Best placement; ties go to the smallest (y, x). Throws ValidationError
  // if the patch is larger than the scene in either dimension.
  MatchPeak match(const Image& patch) const;

  // Full score map, (scene.h - patch.h + 1) rows of (scene.w - patch.w + 1).
  std::vector<double> score_map(const Image& patch) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

MatchPeak correlate(const Image& patch, const Image& scene);
MatchPeak correlate(const Image& patch, const CanonicalImage& scene);

}  // namespace doccap
