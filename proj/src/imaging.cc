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

#include "doccap/imaging.h"

#include <fftw3.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>

#include "doccap/error.h"

namespace doccap {

namespace {

constexpr int kLowTarget = 16;
constexpr int kHighTarget = 240;

int round_half_up_int(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::uint8_t clamp_u8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

// Nearest-rank percentile over a 256-bin histogram.
int percentile(const std::array<std::size_t, 256>& hist, std::size_t total, double q) {
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(total)));
  std::size_t cum = 0;
  for (int v = 0; v < 256; ++v) {
    cum += hist[v];
    if (cum >= std::max<std::size_t>(rank, 1)) return v;
  }
  return 255;
}

}  // namespace

int canonical_height(int canonical_width) {
  return round_half_up_int(kAspectRatio * canonical_width);
}

Image resample_bilinear(const Image& img, int width, int height) {
  if (img.empty()) throw ValidationError("cannot resample an empty image");
  if (width <= 0 || height <= 0) throw ValidationError("resample target must be positive");
  const int sw = img.width();
  const int sh = img.height();
  const double fx = static_cast<double>(sw) / width;
  const double fy = static_cast<double>(sh) / height;

  // Column taps are the same for every row.
  std::vector<int> x0s(width), x1s(width);
  std::vector<double> wx(width);
  for (int x = 0; x < width; ++x) {
    double sx = std::clamp((x + 0.5) * fx - 0.5, 0.0, static_cast<double>(sw - 1));
    x0s[x] = static_cast<int>(sx);
    x1s[x] = std::min(x0s[x] + 1, sw - 1);
    wx[x] = sx - x0s[x];
  }

  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    double sy = std::clamp((y + 0.5) * fy - 0.5, 0.0, static_cast<double>(sh - 1));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, sh - 1);
    const double wy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double top = img.at(x0s[x], y0) * (1.0 - wx[x]) + img.at(x1s[x], y0) * wx[x];
      const double bottom = img.at(x0s[x], y1) * (1.0 - wx[x]) + img.at(x1s[x], y1) * wx[x];
      out.at(x, y) = clamp_u8(round_half_up_int(top * (1.0 - wy) + bottom * wy));
    }
  }
  return out;
}

CanonicalImage preprocess(const Image& img, int canonical_width) {
  if (img.empty()) throw ValidationError("preprocess: degenerate input image");
  if (canonical_width < kMinCanonicalWidth) {
    throw ValidationError("preprocess: canonical width must be >= " +
                          std::to_string(kMinCanonicalWidth));
  }
  Image out = resample_bilinear(img, canonical_width, canonical_height(canonical_width));

  std::array<std::size_t, 256> hist{};
  for (auto p : out.pixels()) ++hist[p];
  const std::size_t total = out.pixels().size();
  int lo = percentile(hist, total, 0.05);
  int hi = percentile(hist, total, 0.95);
  if (hi == lo) {
    lo = percentile(hist, total, 0.0);
    hi = percentile(hist, total, 1.0);
  }
  if (hi == lo) {
    std::fill(out.pixels().begin(), out.pixels().end(), std::uint8_t{128});
    return CanonicalImage(std::move(out));
  }

  std::array<std::uint8_t, 256> lut{};
  const double gain = static_cast<double>(kHighTarget - kLowTarget) / (hi - lo);
  for (int v = 0; v < 256; ++v) {
    lut[v] = clamp_u8(round_half_up_int(kLowTarget + (v - lo) * gain));
  }
  for (auto& p : out.pixels()) p = lut[p];
  return CanonicalImage(std::move(out));
}

SingularSpectrum singular_spectrum(std::span<const double> row_major, int rows, int cols) {
  if (rows <= 0 || cols <= 0 || row_major.size() != static_cast<std::size_t>(rows) * cols) {
    throw ValidationError("singular_spectrum: matrix shape does not match data");
  }
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMatrix> m(row_major.data(), rows, cols);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  if (svd.info() != Eigen::Success) {
    throw ComputationError("singular_spectrum: SVD did not converge");
  }
  const auto& sv = svd.singularValues();
  SingularSpectrum out;
  out.values.resize(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (!std::isfinite(sv[i])) throw ComputationError("singular_spectrum: non-finite value");
    out.values[static_cast<std::size_t>(i)] = std::max(0.0, sv[i]);
  }
  // Eigen returns them sorted; keep the contract explicit.
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

SingularSpectrum singular_spectrum(const Image& img) {
  if (img.empty()) throw ValidationError("singular_spectrum: empty image");
  std::vector<double> m(img.pixels().begin(), img.pixels().end());
  return singular_spectrum(m, img.height(), img.width());
}

SingularSpectrum singular_spectrum(const CanonicalImage& img) {
  return singular_spectrum(img.image());
}

double visual_similarity(const SingularSpectrum& a, const SingularSpectrum& b) {
  if (a.values.size() != b.values.size()) {
    throw ValidationError("visual_similarity: spectrum length mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Correlation

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <typename T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

}  // namespace

struct SceneCorrelator::State {
  int width = 0;
  int height = 0;
  std::size_t spectrum_size = 0;
  // (height + 1) x (width + 1) prefix sums of pixels and squared pixels.
  std::vector<long long> sum;
  std::vector<long long> sum_sq;
  FftwBuffer<fftw_complex> scene_spectrum;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~State() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (inverse != nullptr) fftw_destroy_plan(inverse);
  }

  long long window(const std::vector<long long>& table, int x, int y, int w, int h) const {
    const auto stride = static_cast<std::size_t>(width) + 1;
    auto at = [&](int xx, int yy) { return table[static_cast<std::size_t>(yy) * stride + xx]; };
    return at(x + w, y + h) - at(x, y + h) - at(x + w, y) + at(x, y);
  }
};

SceneCorrelator::SceneCorrelator(const Image& scene) : state_(std::make_unique<State>()) {
  if (scene.empty()) throw ValidationError("correlate: empty scene");
  auto& s = *state_;
  s.width = scene.width();
  s.height = scene.height();
  const std::size_t w = s.width;
  const std::size_t h = s.height;
  s.spectrum_size = h * (w / 2 + 1);

  s.sum.assign((w + 1) * (h + 1), 0);
  s.sum_sq.assign((w + 1) * (h + 1), 0);
  for (std::size_t y = 0; y < h; ++y) {
    long long row = 0, row_sq = 0;
    for (std::size_t x = 0; x < w; ++x) {
      const long long v = scene.at(static_cast<int>(x), static_cast<int>(y));
      row += v;
      row_sq += v * v;
      s.sum[(y + 1) * (w + 1) + x + 1] = s.sum[y * (w + 1) + x + 1] + row;
      s.sum_sq[(y + 1) * (w + 1) + x + 1] = s.sum_sq[y * (w + 1) + x + 1] + row_sq;
    }
  }

  auto real = fftw_alloc<double>(w * h);
  s.scene_spectrum = fftw_alloc<fftw_complex>(s.spectrum_size);
  auto scratch = fftw_alloc<fftw_complex>(s.spectrum_size);
  {
    std::lock_guard lock(fftw_planner_mutex());
    s.forward = fftw_plan_dft_r2c_2d(s.height, s.width, real.get(), s.scene_spectrum.get(),
                                     FFTW_ESTIMATE);
    s.inverse = fftw_plan_dft_c2r_2d(s.height, s.width, scratch.get(), real.get(), FFTW_ESTIMATE);
  }
  if (s.forward == nullptr || s.inverse == nullptr) {
    throw ComputationError("correlate: FFT planning failed");
  }
  for (std::size_t i = 0; i < w * h; ++i) real[i] = scene.pixels()[i];
  fftw_execute_dft_r2c(s.forward, real.get(), s.scene_spectrum.get());
}

SceneCorrelator::~SceneCorrelator() = default;
SceneCorrelator::SceneCorrelator(SceneCorrelator&&) noexcept = default;
SceneCorrelator& SceneCorrelator::operator=(SceneCorrelator&&) noexcept = default;

std::vector<double> SceneCorrelator::score_map(const Image& patch) const {
  const auto& s = *state_;
  if (patch.empty()) throw ValidationError("correlate: empty patch");
  if (patch.width() > s.width || patch.height() > s.height) {
    throw ValidationError("correlate: patch larger than scene");
  }
  const int pw = patch.width();
  const int ph = patch.height();
  const std::size_t w = s.width;
  const std::size_t h = s.height;

  long long patch_sum = 0, patch_sq = 0;
  for (auto v : patch.pixels()) {
    patch_sum += v;
    patch_sq += static_cast<long long>(v) * v;
  }
  const long long area = static_cast<long long>(pw) * ph;
  const __int128 patch_var = static_cast<__int128>(area) * patch_sq -
                             static_cast<__int128>(patch_sum) * patch_sum;

  const int out_w = s.width - pw + 1;
  const int out_h = s.height - ph + 1;
  std::vector<double> scores(static_cast<std::size_t>(out_w) * out_h, 0.0);
  if (patch_var == 0) return scores;

  // Raw cross-correlation sum(T * I) at every offset via the FFT.
  auto real = fftw_alloc<double>(w * h);
  std::fill(real.get(), real.get() + w * h, 0.0);
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x) real[static_cast<std::size_t>(y) * w + x] = patch.at(x, y);
  auto spec = fftw_alloc<fftw_complex>(s.spectrum_size);
  fftw_execute_dft_r2c(s.forward, real.get(), spec.get());
  for (std::size_t i = 0; i < s.spectrum_size; ++i) {
    const std::complex<double> p(spec[i][0], spec[i][1]);
    const std::complex<double> q(s.scene_spectrum[i][0], s.scene_spectrum[i][1]);
    const auto r = std::conj(p) * q;
    spec[i][0] = r.real();
    spec[i][1] = r.imag();
  }
  fftw_execute_dft_c2r(s.inverse, spec.get(), real.get());
  const double norm = static_cast<double>(w * h);

  const long double patch_norm = std::sqrt(static_cast<long double>(patch_var));
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      const long long win_sum = s.window(s.sum, x, y, pw, ph);
      const long long win_sq = s.window(s.sum_sq, x, y, pw, ph);
      const __int128 win_var = static_cast<__int128>(area) * win_sq -
                               static_cast<__int128>(win_sum) * win_sum;
      if (win_var <= 0) continue;
      // Inputs are integers, so the exact correlation is the nearest integer.
      const auto cross = std::llround(real[static_cast<std::size_t>(y) * w + x] / norm);
      const __int128 num = static_cast<__int128>(area) * cross -
                           static_cast<__int128>(patch_sum) * win_sum;
      const long double denom = patch_norm * std::sqrt(static_cast<long double>(win_var));
      const double score = static_cast<double>(static_cast<long double>(num) / denom);
      scores[static_cast<std::size_t>(y) * out_w + x] = std::clamp(score, -1.0, 1.0);
    }
  }
  return scores;
}

MatchPeak SceneCorrelator::match(const Image& patch) const {
  const auto& s = *state_;
  if (patch.empty()) throw ValidationError("correlate: empty patch");
  if (patch.width() > s.width || patch.height() > s.height) {
    throw ValidationError("correlate: patch larger than scene");
  }
  const auto [lo, hi] = std::minmax_element(patch.pixels().begin(), patch.pixels().end());
  if (*lo == *hi) return MatchPeak{0, 0, 0.0, true};

  const auto scores = score_map(patch);
  const int out_w = s.width - patch.width() + 1;
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return MatchPeak{static_cast<int>(best % out_w), static_cast<int>(best / out_w), scores[best],
                   false};
}

MatchPeak correlate(const Image& patch, const Image& scene) {
  if (patch.width() > scene.width() || patch.height() > scene.height()) {
    throw ValidationError("correlate: patch larger than scene");
  }
  return SceneCorrelator(scene).match(patch);
}

MatchPeak correlate(const Image& patch, const CanonicalImage& scene) {
  return correlate(patch, scene.image());
}

}  // namespace doccap
