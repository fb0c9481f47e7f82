// Copyright 2026 The mcmlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mcmlab {

/// Philox4x32-10 counter-based generator.
///
/// A stream is addressed by (seed, stream, position); draws within a stream
/// walk a 32-bit block counter. Shot streams use position = shot index, so
/// results are independent of execution order and thread count.
class Philox {
  public:
    Philox(uint64_t seed, uint64_t stream, uint32_t position)
        : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
          base_{0, position, static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)} {}

    uint32_t next_u32() {
        if (have_ == 0) refill();
        return out_[--have_];
    }

    uint64_t next_u64() {
        uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, bound). bound = 0 is invalid.
    uint64_t below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

  private:
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    void refill() {
        std::array<uint32_t, 4> c = base_;
        c[0] = block_++;
        uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; round++) {
            uint64_t p0 = static_cast<uint64_t>(kMul0) * c[0];
            uint64_t p1 = static_cast<uint64_t>(kMul1) * c[2];
            uint32_t lo0 = static_cast<uint32_t>(p0), hi0 = static_cast<uint32_t>(p0 >> 32);
            uint32_t lo1 = static_cast<uint32_t>(p1), hi1 = static_cast<uint32_t>(p1 >> 32);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        out_ = c;
        have_ = 4;
    }

    std::array<uint32_t, 2> key_;
    std::array<uint32_t, 4> base_;
    uint32_t block_ = 0;
    std::array<uint32_t, 4> out_{};
    int have_ = 0;
};

/// Stream position reserved for circuit construction randomness (RC draws,
/// preps), distinct from any shot index.
constexpr uint32_t kBuildPosition = 0xFFFFFFFFu;
/// Stream position for the noiseless reference run of a circuit.
constexpr uint32_t kIdealPosition = 0xFFFFFFFEu;

}  // namespace mcmlab
