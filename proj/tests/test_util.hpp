#pragma once

// Shared test oracles. These deliberately re-derive quantities through
// independent routes (finite differences, quadrature, two-pass statistics)
// rather than calling the production code paths they are used to check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "surfdk/geometry.hpp"

namespace testutil {

// xorshift64* — small deterministic generator, unrelated to the library RNG
struct Xorshift {
    uint64_t state;
    explicit Xorshift(uint64_t seed) : state(seed ? seed : 0x9E3779B97F4A7C15ull) {}
    uint64_t next() {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545F4914F6CDD1Dull;
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

// second-order central differences of the flux columns sqrt|G| G^{-1} e_k,
// computed from the surface gradient alone
inline surfdk::Vec2 drift_fd_oracle(const surfdk::HeightSurface& surface, surfdk::Vec2 pt,
                                    double h = 1e-6) {
    auto flux = [&surface](surfdk::Vec2 at) {
        surfdk::Vec2 g = surface.gradient(at);
        const double p = g.x, q = g.y;
        const double s = 1.0 + p * p + q * q;
        const double rs = std::sqrt(s);
        return surfdk::Sym2{rs * (1.0 + q * q) / s, rs * (-p * q) / s, rs * (1.0 + p * p) / s};
    };
    const surfdk::Sym2 xp = flux({pt.x + h, pt.y}), xm = flux({pt.x - h, pt.y});
    const surfdk::Sym2 yp = flux({pt.x, pt.y + h}), ym = flux({pt.x, pt.y - h});
    surfdk::Vec2 g = surface.gradient(pt);
    const double rs = std::sqrt(1.0 + g.x * g.x + g.y * g.y);
    return {((xp.xx - xm.xx) + (yp.xy - ym.xy)) / (2.0 * h * rs),
            ((xp.xy - xm.xy) + (yp.yy - ym.yy)) / (2.0 * h * rs)};
}

// midpoint quadrature of the surface area on a fine grid
inline double surface_area_quadrature(const surfdk::HeightSurface& surface, int n = 1024) {
    const double dx = surface.Lx() / n, dy = surface.Ly() / n;
    double area = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            surfdk::Vec2 g = surface.gradient({(i + 0.5) * dx, (j + 0.5) * dy});
            area += std::sqrt(1.0 + g.x * g.x + g.y * g.y);
        }
    }
    return area * dx * dy;
}

// two-pass mean and sample variance
struct TwoPass {
    double mean = 0.0;
    double var = 0.0;
};

inline TwoPass two_pass_moments(const std::vector<double>& xs) {
    TwoPass r;
    for (double x : xs) r.mean += x;
    r.mean /= double(xs.size());
    for (double x : xs) r.var += (x - r.mean) * (x - r.mean);
    r.var /= double(xs.size() - 1);
    return r;
}

}  // namespace testutil
