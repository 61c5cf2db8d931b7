#include "surfdk/rng.hpp"

#include <cmath>

namespace surfdk {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
    uint64_t p0 = uint64_t(kPhiloxM0) * c[0];
    uint64_t p1 = uint64_t(kPhiloxM1) * c[2];
    uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
    uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline double to_unit_open(uint32_t hi, uint32_t lo) {
    // (0,1]; safe under log()
    uint64_t bits = (uint64_t(hi) << 32) | lo;
    return double((bits >> 11) + 1) * 0x1.0p-53;
}

inline double to_unit_halfopen(uint32_t hi, uint32_t lo) {
    // [0,1)
    uint64_t bits = (uint64_t(hi) << 32) | lo;
    return double(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        philox_round(counter, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return counter;
}

NoiseStream::NoiseStream(uint64_t seed, std::string_view substream) {
    uint64_t k = splitmix64(seed ^ fnv1a64(substream));
    key_ = {uint32_t(k), uint32_t(k >> 32)};
}

Vec2 NoiseStream::normal_pair(uint64_t hi, uint64_t lo) const {
    auto out = philox4x32({uint32_t(lo), uint32_t(lo >> 32), uint32_t(hi), uint32_t(hi >> 32)}, key_);
    double u1 = to_unit_open(out[0], out[1]);
    double u2 = to_unit_halfopen(out[2], out[3]);
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

Vec2 NoiseStream::uniform_pair(uint64_t hi, uint64_t lo) const {
    auto out = philox4x32({uint32_t(lo), uint32_t(lo >> 32), uint32_t(hi), uint32_t(hi >> 32)}, key_);
    return {to_unit_halfopen(out[0], out[1]), to_unit_halfopen(out[2], out[3])};
}

}  // namespace surfdk
