/*
 * Copyright 2026 exlab contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace exlab {

// Philox4x32-10 block function.
using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

inline Philox4x32Counter philox4x32(Philox4x32Counter c, Philox4x32Key k) {
  constexpr std::uint64_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = M0 * c[0];
    const std::uint64_t p1 = M1 * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    k[0] += W0;
    k[1] += W1;
  }
  return c;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed of replicate `index` under `master`; the map is a bijection for fixed master.
inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

enum class StreamTag : std::uint32_t { Coefficients = 1, Waves = 2, Auxiliary = 3 };

// 52-bit uniform strictly inside (0,1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

// Counter-based stream: block b of stream (seed, tag) is philox(counter = (b, b>>32, tag, 0), key = seed).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, StreamTag tag)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        tag_(static_cast<std::uint32_t>(tag)) {}

  Philox4x32Counter block(std::uint64_t b) const {
    return philox4x32({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), tag_, 0u}, key_);
  }

  // The two standard normals generated by block b (Box-Muller on its two uniforms).
  std::array<double, 2> normal_pair(std::uint64_t b) const {
    const auto w = block(b);
    const double u1 = to_open_unit(w[0], w[1]);
    const double u2 = to_open_unit(w[2], w[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
  }

  // Normal number k of the stream; random access.
  double normal_at(std::uint64_t k) const { return normal_pair(k >> 1)[k & 1]; }

  // Normals k in [first, first+count).
  std::vector<double> normals(std::uint64_t first, std::size_t count) const {
    std::vector<double> out(count);
    std::uint64_t cached = ~0ull;
    std::array<double, 2> pair{};
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t k = first + i;
      if ((k >> 1) != cached) {
        cached = k >> 1;
        pair = normal_pair(cached);
      }
      out[i] = pair[k & 1];
    }
    return out;
  }

  double next_uniform() {
    if (pos_ == 2) refill();
    const double u = to_open_unit(buf_[2 * pos_], buf_[2 * pos_ + 1]);
    ++pos_;
    return u;
  }

  double next_normal() {
    if (spare_valid_) {
      spare_valid_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    spare_valid_ = true;
    return rad * std::cos(ang);
  }

 private:
  void refill() {
    buf_ = block(next_block_++);
    pos_ = 0;
  }

  Philox4x32Key key_;
  std::uint32_t tag_;
  std::uint64_t next_block_ = 0;
  Philox4x32Counter buf_{};
  int pos_ = 2;
  double spare_ = 0.0;
  bool spare_valid_ = false;
};

}  // namespace exlab
