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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace sgkl::rng {

// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11). A
// (key, counter) pair maps to 128 random bits, so independent streams are
// obtained by choosing distinct keys and never require shared state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter counter, Key key);
};

// 64-bit finaliser used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

// Hashes a textual cell key (e.g. "sweep/SG-UBU/h=0.25/rep=3") together
// with a master seed. Derivation depends only on the inputs, never on
// scheduling order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view key);

// A single random stream: fixed Philox key, incrementing 64-bit counter.
// Cheap to copy; a copy replays exactly the same draws, which is how
// "the same omega" is reproduced for Jacobian probes and synchronous
// couplings.
class Stream {
 public:
  explicit Stream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  void fill_normal(std::span<double> out);
  // Uniform integer in [0, n), n >= 1. Lemire's unbiased multiply-shift.
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (next_u64() >> 63) != 0; }

  // Deterministic child stream; distinct tags give independent streams.
  Stream substream(std::uint64_t tag) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> block_{};
  int block_used_ = 2;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Substream tags used by chains.
enum class Channel : std::uint64_t {
  kBatch = 1,
  kNoise1 = 2,
  kNoise2 = 3,
  kInit = 4,
  kInjected = 5,
  kReference = 6,
};

inline Stream channel(const Stream& parent, Channel c) {
  return parent.substream(static_cast<std::uint64_t>(c));
}

}  // namespace sgkl::rng
