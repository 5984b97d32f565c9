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

#include <gtest/gtest.h>
#include <png.h>

#include <cmath>
#include <numeric>
#include <random>

#include "doccap/error.h"
#include "doccap/image.h"
#include "oracles.h"

namespace doccap {
namespace {

Image noise(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> px(0, 255);
  Image img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(px(rng));
  return img;
}

std::vector<double> as_doubles(const Image& img) {
  return {img.pixels().begin(), img.pixels().end()};
}

// --- image I/O --------------------------------------------------------------

TEST(ImageIo, PngRoundTrip) {
  const Image img = noise(37, 23, 1);
  EXPECT_EQ(decode_image(encode_png(img)), img);
  EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST(ImageIo, PgmRoundTrip) {
  const Image img = noise(19, 41, 2);
  EXPECT_EQ(decode_image(encode_pgm(img)), img);
}

TEST(ImageIo, PgmWithCommentAndSmallMaxval) {
  const std::string header = "P5\n# scanner output\n2 1\n15\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.push_back(0);
  bytes.push_back(15);
  const Image img = decode_image(bytes);
  ASSERT_EQ(img.width(), 2);
  EXPECT_EQ(img.at(0, 0), 0);
  EXPECT_EQ(img.at(1, 0), 255);
}

TEST(ImageIo, ColourPngConvertedByLuma) {
  png_image info{};
  info.version = PNG_IMAGE_VERSION;
  info.width = 2;
  info.height = 1;
  info.format = PNG_FORMAT_RGB;
  const std::uint8_t rgb[] = {255, 0, 0, 10, 200, 30};
  png_alloc_size_t size = 0;
  ASSERT_TRUE(png_image_write_to_memory(&info, nullptr, &size, 0, rgb, 0, nullptr));
  std::vector<std::uint8_t> buf(size);
  ASSERT_TRUE(png_image_write_to_memory(&info, buf.data(), &size, 0, rgb, 0, nullptr));
  buf.resize(size);
  const Image img = decode_image(buf);
  EXPECT_EQ(img.at(0, 0), luma(255, 0, 0));
  EXPECT_EQ(img.at(1, 0), luma(10, 200, 30));
  EXPECT_EQ(luma(255, 0, 0), 76);
  EXPECT_EQ(luma(255, 255, 255), 255);
}

TEST(ImageIo, RejectsGarbage) {
  const std::vector<std::uint8_t> junk = {'G', 'I', 'F', '8', '9', 'a'};
  EXPECT_THROW(decode_image(junk), ParseError);
  const std::string truncated = "P5 4 4 255\n\x01\x02";
  EXPECT_THROW(decode_image(std::vector<std::uint8_t>(truncated.begin(), truncated.end())),
               ParseError);
  std::vector<std::uint8_t> png = encode_png(noise(8, 8, 3));
  png.resize(png.size() / 2);
  EXPECT_THROW(decode_image(png), ParseError);
}

TEST(ImageIo, CropAndTranspose) {
  const Image img = noise(10, 7, 4);
  const Image c = img.crop(2, 3, 4, 2);
  EXPECT_EQ(c.width(), 4);
  EXPECT_EQ(c.at(1, 1), img.at(3, 4));
  EXPECT_THROW(img.crop(8, 0, 4, 1), ValidationError);
  const Image t = img.transposed();
  EXPECT_EQ(t.width(), 7);
  EXPECT_EQ(t.at(5, 9), img.at(9, 5));
  EXPECT_EQ(t.transposed(), img);
}

// --- preprocess -------------------------------------------------------------

TEST(Preprocess, CanonicalShape) {
  EXPECT_EQ(canonical_height(512), 724);
  const CanonicalImage c = preprocess(noise(1240, 1754, 5), 512);
  EXPECT_EQ(c.width(), 512);
  EXPECT_EQ(c.height(), 724);
  EXPECT_EQ(preprocess(noise(50, 30, 6), 64).height(), 90);
}

TEST(Preprocess, ConstantImageBecomes128) {
  const CanonicalImage c = preprocess(Image(300, 200, 37), 64);
  for (auto p : c.image().pixels()) ASSERT_EQ(p, 128);
}

TEST(Preprocess, GradientPercentilesStretched) {
  Image g(256, 400);
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) g.at(x, y) = static_cast<std::uint8_t>(40 + x * 150 / 255);
  const CanonicalImage c = preprocess(g, 256);
  const std::vector<std::uint8_t> px(c.image().pixels().begin(), c.image().pixels().end());
  EXPECT_NEAR(oracle::percentile(px, 5), 16, 1);
  EXPECT_NEAR(oracle::percentile(px, 95), 240, 1);
}

TEST(Preprocess, IntensityShiftInvariant) {
  Image a = noise(200, 280, 7);
  for (auto& p : a.pixels()) p = static_cast<std::uint8_t>(40 + p / 2);
  Image b = a;
  for (auto& p : b.pixels()) p = static_cast<std::uint8_t>(p + 20);
  const auto ca = preprocess(a, 128), cb = preprocess(b, 128);
  for (std::size_t i = 0; i < ca.image().pixels().size(); ++i) {
    ASSERT_NEAR(ca.image().pixels()[i], cb.image().pixels()[i], 1);
  }
}

TEST(Preprocess, IdempotentWithinTwoLevels) {
  Image src(400, 566, 255);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 60; ++k) {
    const int x0 = static_cast<int>(rng() % 360), y0 = static_cast<int>(rng() % 540);
    const auto v = static_cast<std::uint8_t>(rng() % 120);
    for (int y = y0; y < y0 + 20; ++y)
      for (int x = x0; x < x0 + 35; ++x) src.at(x, y) = v;
  }
  const CanonicalImage once = preprocess(src, 256);
  const CanonicalImage twice = preprocess(once.image(), 256);
  for (std::size_t i = 0; i < once.image().pixels().size(); ++i) {
    ASSERT_NEAR(once.image().pixels()[i], twice.image().pixels()[i], 2) << i;
  }
}

TEST(Preprocess, Errors) {
  EXPECT_THROW(preprocess(Image(), 512), ValidationError);
  EXPECT_THROW(preprocess(Image(0, 10), 512), ValidationError);
  EXPECT_THROW(preprocess(Image(10, 10, 3), 63), ValidationError);
}

TEST(Resample, IdentityAtEqualSize) {
  const Image img = noise(31, 17, 9);
  EXPECT_EQ(resample_bilinear(img, 31, 17), img);
}

TEST(Resample, UpsampleInterpolates) {
  const Image img(2, 1, std::vector<std::uint8_t>{0, 200});
  const Image up = resample_bilinear(img, 4, 1);
  // Source coordinates -0.25, 0.25, 0.75, 1.25 clamp to [0, 1].
  EXPECT_EQ(up.at(0, 0), 0);
  EXPECT_EQ(up.at(1, 0), 50);
  EXPECT_EQ(up.at(2, 0), 150);
  EXPECT_EQ(up.at(3, 0), 200);
}

// --- singular spectrum ------------------------------------------------------

TEST(Spectrum, ZeroMatrix) {
  const std::vector<double> z(12, 0.0);
  const auto s = singular_spectrum(z, 3, 4);
  ASSERT_EQ(s.values.size(), 3u);
  for (double v : s.values) EXPECT_EQ(v, 0.0);
}

TEST(Spectrum, DiagonalMatrix) {
  const std::vector<double> m = {1, 0, 0, 0, 3, 0, 0, 0, 2};
  const auto s = singular_spectrum(m, 3, 3);
  ASSERT_EQ(s.values.size(), 3u);
  EXPECT_NEAR(s.values[0], 3.0, 1e-12);
  EXPECT_NEAR(s.values[1], 2.0, 1e-12);
  EXPECT_NEAR(s.values[2], 1.0, 1e-12);
}

TEST(Spectrum, MatchesJacobiOracle) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> m(16 * 16);
    for (auto& v : m) v = u(rng);
    const auto got = singular_spectrum(m, 16, 16).values;
    const auto want = oracle::jacobi_singular_values(m, 16, 16);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i], want[i], 1e-6 * std::max(1.0, want[0])) << trial << ":" << i;
    }
  }
}

TEST(Spectrum, FrozenOracleValues) {
  // Reference values frozen from the Jacobi oracle for this matrix.
  const std::vector<double> m = {4, 0, 1, 2, 3, 5, 1, 1, 0};
  const auto want = oracle::jacobi_singular_values(m, 3, 3);
  const auto got = singular_spectrum(m, 3, 3).values;
  ASSERT_EQ(got.size(), 3u);
  EXPECT_NEAR(want[0], 6.716696, 1e-6);
  EXPECT_NEAR(want[1], 3.316188, 1e-6);
  EXPECT_NEAR(want[2], 0.942811, 1e-6);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
}

TEST(Spectrum, TransposeInvariant) {
  const Image img = noise(40, 25, 11);
  const auto a = singular_spectrum(img).values;
  const auto b = singular_spectrum(img.transposed()).values;
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8 * a[0]);
}

TEST(Spectrum, CanonicalLengthAndOrder) {
  const auto s = singular_spectrum(preprocess(noise(300, 420, 12), 64));
  ASSERT_EQ(s.values.size(), 64u);
  for (std::size_t i = 1; i < s.values.size(); ++i) {
    EXPECT_GE(s.values[i], 0.0);
    EXPECT_LE(s.values[i], s.values[i - 1]);
  }
}

TEST(Spectrum, ShapeMismatch) {
  const std::vector<double> m(5, 1.0);
  EXPECT_THROW(singular_spectrum(m, 2, 3), ValidationError);
}

// --- visual similarity ------------------------------------------------------

TEST(VisualSimilarity, Examples) {
  EXPECT_NEAR(visual_similarity({{3, 4}}, {{3, 4}}), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(visual_similarity({{1, 0}}, {{0, 1}}), 0.0);
  EXPECT_NEAR(visual_similarity({{3, 4}}, {{4, 3}}), 0.96, 1e-15);
  EXPECT_DOUBLE_EQ(visual_similarity({{0, 0}}, {{4, 3}}), 0.0);
  EXPECT_THROW(visual_similarity({{1, 2}}, {{1, 2, 3}}), ValidationError);
}

TEST(VisualSimilarity, SymmetricAndScaleInvariant) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    SingularSpectrum a, b;
    for (int i = 0; i < 8; ++i) {
      a.values.push_back(u(rng));
      b.values.push_back(u(rng));
    }
    const double s = visual_similarity(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0 + 1e-12);
    EXPECT_NEAR(s, visual_similarity(b, a), 1e-12);
    SingularSpectrum scaled = a;
    for (auto& v : scaled.values) v *= 3.7;
    EXPECT_NEAR(s, visual_similarity(scaled, b), 1e-12);
    EXPECT_NEAR(visual_similarity(a, a), 1.0, 1e-12);
  }
}

// --- correlation ------------------------------------------------------------

TEST(Correlate, SelfMatchOnNoise) {
  const Image scene = noise(96, 80, 14);
  const Image patch = scene.crop(41, 27, 12, 9);
  const MatchPeak p = correlate(patch, scene);
  EXPECT_EQ(p.x, 41);
  EXPECT_EQ(p.y, 27);
  EXPECT_NEAR(p.score, 1.0, 1e-6);
  EXPECT_FALSE(p.degenerate);
}

TEST(Correlate, UniformPatchIsDegenerate) {
  const MatchPeak p = correlate(Image(5, 5, 90), noise(20, 20, 15));
  EXPECT_TRUE(p.degenerate);
  EXPECT_EQ(p.x, 0);
  EXPECT_EQ(p.y, 0);
  EXPECT_EQ(p.score, 0.0);
}

TEST(Correlate, MatchesBruteForceOracle) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    const Image scene = noise(32, 32, rng());
    const Image patch = noise(8, 8, rng());
    const MatchPeak p = correlate(patch, scene);
    const auto want = oracle::correlation_argmax(as_doubles(patch), 8, 8, as_doubles(scene), 32, 32);
    EXPECT_EQ(p.x, want.x);
    EXPECT_EQ(p.y, want.y);
    EXPECT_NEAR(p.score, want.score, 1e-6);
  }
}

TEST(Correlate, ScoreMapMatchesOracleEverywhere) {
  const Image scene = noise(24, 20, 17);
  const Image patch = noise(6, 5, 18);
  const SceneCorrelator corr(scene);
  const auto got = corr.score_map(patch);
  const auto want = oracle::correlation_map(as_doubles(patch), 6, 5, as_doubles(scene), 24, 20);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_NEAR(got[i], want[i], 1e-9);
    EXPECT_GE(got[i], -1.0);
    EXPECT_LE(got[i], 1.0);
  }
}

TEST(Correlate, FlatSceneWindowsScoreZero) {
  Image scene(20, 20, 200);
  for (int y = 12; y < 20; ++y)
    for (int x = 12; x < 20; ++x) scene.at(x, y) = static_cast<std::uint8_t>((x * 7 + y * 13) % 251);
  const SceneCorrelator corr(scene);
  const auto map = corr.score_map(noise(4, 4, 19));
  EXPECT_EQ(map[0], 0.0);
}

TEST(Correlate, TiesGoToSmallestYThenX) {
  // Periodic scene: the patch appears at every multiple of the period.
  Image scene(24, 24);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) scene.at(x, y) = static_cast<std::uint8_t>(((x % 6) * 37 + (y % 6) * 11) % 256);
  const Image patch = scene.crop(12, 18, 6, 6);
  const MatchPeak p = correlate(patch, scene);
  EXPECT_EQ(p.x, 0);
  EXPECT_EQ(p.y, 0);
  EXPECT_NEAR(p.score, 1.0, 1e-9);
}

TEST(Correlate, PeakInvariantToSceneOffset) {
  const Image scene = noise(64, 48, 20);
  Image brighter = scene;
  for (auto& p : brighter.pixels()) p = static_cast<std::uint8_t>(p / 2 + 60);
  Image darker = scene;
  for (auto& p : darker.pixels()) p = static_cast<std::uint8_t>(p / 2);
  const Image patch = noise(10, 10, 21);
  const MatchPeak a = correlate(patch, brighter), b = correlate(patch, darker);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NEAR(a.score, b.score, 1e-9);
}

TEST(Correlate, PatchLargerThanSceneThrows) {
  EXPECT_THROW(correlate(noise(10, 4, 1), noise(8, 8, 2)), ValidationError);
  EXPECT_THROW(correlate(noise(4, 10, 1), noise(8, 8, 2)), ValidationError);
  EXPECT_THROW(correlate(Image(), noise(8, 8, 2)), ValidationError);
}

TEST(Correlate, CanonicalSceneOverload) {
  const CanonicalImage scene = preprocess(noise(128, 181, 22), 64);
  const Image patch = scene.image().crop(10, 30, 16, 12);
  const MatchPeak p = correlate(patch, scene);
  EXPECT_EQ(p.x, 10);
  EXPECT_EQ(p.y, 30);
}

}  // namespace
}  // namespace doccap
