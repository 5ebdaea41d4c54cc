// Copyright 2026 The sgkl Authors
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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sgkl/model.hpp"

namespace sgkl::idx {

// Big-endian IDX containers as used by the MNIST distribution.
struct ImageSet {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major
};

inline constexpr std::uint32_t kImageMagic = 0x00000803;
inline constexpr std::uint32_t kLabelMagic = 0x00000801;

ImageSet read_images(const std::filesystem::path& path);
std::vector<std::uint8_t> read_labels(const std::filesystem::path& path);

// Binary logistic regression on two digit classes. Conventions: pixels are
// scaled to [0, 1], no bias column is appended, label 1 marks
// `positive_digit` and label 0 marks `negative_digit`; other digits are
// dropped.
LogisticRegressionPotential load_digit_pair(
    const std::filesystem::path& images, const std::filesystem::path& labels,
    double prior_variance, std::uint8_t positive_digit = 3,
    std::uint8_t negative_digit = 5);

}  // namespace sgkl::idx
