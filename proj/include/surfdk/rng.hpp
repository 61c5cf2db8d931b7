#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "surfdk/geometry.hpp"

namespace surfdk {

/// Philox-4x32-10 block function: four 32-bit outputs per (counter, key).
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key);

/// Counter-addressable Gaussian/uniform source. A stream is identified by a
/// global seed plus a substream name; every draw is addressed by a pair of
/// 64-bit counters, so the value of any draw is independent of evaluation
/// order and worker scheduling.
class NoiseStream {
public:
    NoiseStream() : key_{0, 0} {}
    NoiseStream(uint64_t seed, std::string_view substream);

    /// Two independent N(0,1) variates for counter (hi, lo).
    Vec2 normal_pair(uint64_t hi, uint64_t lo) const;

    /// Two independent uniforms in [0,1) for counter (hi, lo).
    Vec2 uniform_pair(uint64_t hi, uint64_t lo) const;

    uint64_t key() const { return (uint64_t(key_[1]) << 32) | key_[0]; }

private:
    std::array<uint32_t, 2> key_;
};

}  // namespace surfdk
