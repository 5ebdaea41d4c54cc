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

#include "sgkl/idx_reader.hpp"

#include <array>
#include <fstream>

#include <fmt/format.h>

#include "sgkl/error.hpp"

namespace sgkl::idx {
namespace {

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw ParameterError(
        fmt::format("idx: truncated header in {}", path.string()));
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParameterError(fmt::format("idx: cannot open {}", path.string()));
  }
  return in;
}

void read_payload(std::istream& in, std::vector<std::uint8_t>& out,
                  const std::filesystem::path& path) {
  if (!in.read(reinterpret_cast<char*>(out.data()),
               static_cast<std::streamsize>(out.size()))) {
    throw ParameterError(fmt::format("idx: truncated payload in {}",
                                     path.string()));
  }
}

}  // namespace

ImageSet read_images(const std::filesystem::path& path) {
  auto in = open(path);
  const auto magic = read_be32(in, path);
  if (magic != kImageMagic) {
    throw ParameterError(fmt::format("idx: {} has magic {:#010x}, expected "
                                     "{:#010x}",
                                     path.string(), magic, kImageMagic));
  }
  ImageSet set;
  set.count = read_be32(in, path);
  set.rows = read_be32(in, path);
  set.cols = read_be32(in, path);
  set.pixels.resize(set.count * set.rows * set.cols);
  read_payload(in, set.pixels, path);
  return set;
}

std::vector<std::uint8_t> read_labels(const std::filesystem::path& path) {
  auto in = open(path);
  const auto magic = read_be32(in, path);
  if (magic != kLabelMagic) {
    throw ParameterError(fmt::format("idx: {} has magic {:#010x}, expected "
                                     "{:#010x}",
                                     path.string(), magic, kLabelMagic));
  }
  std::vector<std::uint8_t> labels(read_be32(in, path));
  read_payload(in, labels, path);
  return labels;
}

LogisticRegressionPotential load_digit_pair(
    const std::filesystem::path& images, const std::filesystem::path& labels,
    double prior_variance, std::uint8_t positive_digit,
    std::uint8_t negative_digit) {
  const ImageSet set = read_images(images);
  const auto digits = read_labels(labels);
  if (digits.size() != set.count) {
    throw ParameterError("idx: image and label counts differ");
  }
  const std::size_t dim = set.rows * set.cols;
  Vec features;
  std::vector<std::uint8_t> y;
  for (std::size_t i = 0; i < set.count; ++i) {
    if (digits[i] != positive_digit && digits[i] != negative_digit) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      features.push_back(set.pixels[i * dim + j] / 255.0);
    }
    y.push_back(digits[i] == positive_digit ? 1 : 0);
  }
  if (y.empty()) throw ParameterError("idx: no images of the requested digits");
  return LogisticRegressionPotential(dim, std::move(features), std::move(y),
                                     prior_variance);
}

}  // namespace sgkl::idx
