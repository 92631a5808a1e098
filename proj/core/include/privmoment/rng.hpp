// Copyright 2026 The privmoment Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVMOMENT_RNG_HPP_
#define PRIVMOMENT_RNG_HPP_

#include <cstdint>
#include <span>
#include <string_view>

namespace privmoment {

/// Counter-based 64-bit generator. Output k of a stream is
/// splitmix64_finalize(key + k * golden_gamma), so the whole state is the
/// pair (key, counter) and identical pairs yield identical sequences on every
/// platform. Independent streams are derived with split().
///
/// Not a cryptographic generator; DP noise drawn from it is not hardened
/// against floating-point or RNG-prediction attacks.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ kSeedSalt)) {}

  /// Resumes a stream from an explicit (key, counter) pair.
  static Rng from_state(std::uint64_t key, std::uint64_t counter) {
    Rng r(0);
    r.key_ = key;
    r.counter_ = counter;
    return r;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() { return mix(key_ + (counter_++) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  /// Child stream keyed by (this key, id); does not advance this stream.
  Rng split(std::uint64_t id) const { return from_state(mix(key_ ^ mix(id + kSplitSalt)), 0); }
  /// Child stream keyed by a purpose label, e.g. "level/3/gue".
  Rng split(std::string_view label) const;

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x243f6a8885a308d3ULL;
  static constexpr std::uint64_t kSplitSalt = 0x13198a2e03707344ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline Rng Rng::split(std::string_view label) const {
  // FNV-1a over the label bytes.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return split(h);
}

}  // namespace privmoment

#endif  // PRIVMOMENT_RNG_HPP_
