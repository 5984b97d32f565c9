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

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "doccap/docmodel.h"
#include "doccap/synth.h"

namespace doccap::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("doccap-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline constexpr const char* kListingAnnotation = R"({"invoice_no":
    {"position": [53, 671, 452, 702],
     "value": "INV1234"},
 "date":
    {"position": [50, 635, 312, 666],
     "value": "2019-08-24"},
 "seller":
    {"position": [259, 27, 464, 58],
     "value": "ABC Pvt. Ltd."},
 "buyer":
    {"position": [821, 445, 1153, 468],
     "value": "Zinc Enterprises"},
 "total":
    {"position": [48, 553, 419, 577],
     "value": "1,234.56"}})";

// A 1240x1754 invoice whose value words sit exactly on the boxes above,
// with labels, a letterhead and a footer around them.
inline PageLayout listing_layout() {
  PageLayout l;
  auto add = [&](const std::string& text, Rect box, const std::string& field = "") {
    l.words.push_back({text, box, field});
  };
  add("ABC", {259, 27, 319, 58}, "seller");
  add("Pvt.", {334, 27, 399, 58}, "seller");
  add("Ltd.", {414, 27, 464, 58}, "seller");
  add("Tax", {700, 27, 760, 58});
  add("Invoice", {775, 27, 900, 58});
  add("Plot", {259, 80, 330, 111});
  add("7,", {345, 80, 380, 111});
  add("Ring", {395, 80, 470, 111});
  add("Road", {485, 80, 560, 111});
  add("Bill", {821, 410, 881, 440});
  add("To:", {896, 410, 946, 440});
  add("Zinc", {821, 445, 901, 468}, "buyer");
  add("Enterprises", {916, 445, 1153, 468}, "buyer");
  add("1,234.56", {48, 553, 419, 577}, "total");
  add("Total", {440, 553, 520, 577});
  add("due", {535, 553, 585, 577});
  add("2019-08-24", {50, 635, 312, 666}, "date");
  add("Date", {330, 635, 400, 666});
  add("INV1234", {53, 671, 452, 702}, "invoice_no");
  add("Invoice", {470, 671, 590, 702});
  add("No.", {605, 671, 655, 702});
  add("Widget", {50, 900, 150, 931});
  add("assembly", {165, 900, 300, 931});
  add("12", {900, 900, 940, 931});
  add("Bank:", {50, 1450, 130, 1481});
  add("Acme", {145, 1450, 215, 1481});
  add("Savings", {230, 1450, 345, 1481});
  add("Thank", {50, 1500, 140, 1531});
  add("you", {155, 1500, 205, 1531});
  add("for", {220, 1500, 265, 1531});
  add("your", {280, 1500, 345, 1531});
  add("business", {360, 1500, 490, 1531});
  add("Page", {1050, 1500, 1120, 1531});
  add("1", {1135, 1500, 1150, 1531});
  return l;
}

inline Document listing_document() {
  const PageLayout l = listing_layout();
  return {render_layout(l), layout_ocr(l), "listing"};
}

}  // namespace doccap::testing
