#pragma once

#include <cmath>
#include <functional>

#include "surfdk/geometry.hpp"

namespace surfdk {

/// External potential V with analytic gradient, plus an optional symmetric
/// pairwise kernel U with analytic gradient in its first argument.
struct PotentialSpec {
    std::function<double(Vec2)> V;
    std::function<Vec2(Vec2)> grad_V;
    std::function<double(Vec2, Vec2)> U;
    std::function<Vec2(Vec2, Vec2)> grad_U_x;

    bool has_external() const { return static_cast<bool>(grad_V); }
    bool has_pairwise() const { return static_cast<bool>(grad_U_x); }

    static PotentialSpec none() { return {}; }

    /// V(x,y) = v0 sin^2(x) sin^2(y). v0 == 0 yields the empty spec so that a
    /// zero-strength potential takes exactly the no-potential code path.
    static PotentialSpec sine_squared(double v0) {
        if (v0 == 0.0) return none();
        PotentialSpec p;
        p.V = [v0](Vec2 r) {
            double sx = std::sin(r.x), sy = std::sin(r.y);
            return v0 * sx * sx * sy * sy;
        };
        p.grad_V = [v0](Vec2 r) {
            double sx = std::sin(r.x), cx = std::cos(r.x);
            double sy = std::sin(r.y), cy = std::cos(r.y);
            return Vec2{2.0 * v0 * sx * cx * sy * sy, 2.0 * v0 * sx * sx * sy * cy};
        };
        return p;
    }
};

}  // namespace surfdk
