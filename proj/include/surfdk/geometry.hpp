#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "surfdk/errors.hpp"

namespace surfdk {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Symmetric 2x2 matrix stored as upper triangle.
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    double det() const { return xx * yy - xy * xy; }
};

/// All pointwise geometric quantities of the Monge patch at one coordinate:
/// slopes p = dH/dx, q = dH/dy, determinant s = 1 + p^2 + q^2 of the induced
/// metric G = I + grad H (x) grad H, its inverse, the symmetric inverse square
/// root, and the drift b = (1/sqrt|G|) div(sqrt|G| G^{-1}) that makes the
/// Langevin SDE generate surface Brownian motion.
struct MetricSample {
    double p = 0.0;
    double q = 0.0;
    double s = 1.0;
    double sqrt_det = 1.0;
    Sym2 g_inv{1.0, 0.0, 1.0};
    Sym2 g_inv_sqrt{1.0, 0.0, 1.0};
    Vec2 drift{0.0, 0.0};
};

enum class SurfaceKind {
    sinusoidal_a,  // H = a sin(x) sin(y)
    four_peak_b,   // H = a sin^2(x) sin^2(y)
    custom,
};

/// Analytic height function over the periodic rectangle [0,Lx) x [0,Ly).
///
/// Built-in kinds carry closed forms for every metric quantity including the
/// drift. Custom surfaces need at least a gradient; the drift then falls back
/// to the closed form when a Hessian is supplied and to central finite
/// differences of the flux columns otherwise.
class HeightSurface {
public:
    using HeightFn = std::function<double(Vec2)>;
    using GradientFn = std::function<Vec2(Vec2)>;
    /// Hessian as (H_xx, H_xy, H_yy).
    using HessianFn = std::function<Sym2(Vec2)>;

    static HeightSurface sinusoidal(double amplitude);
    static HeightSurface four_peak(double amplitude);
    static HeightSurface flat() { return sinusoidal(0.0); }
    static HeightSurface custom(HeightFn height, GradientFn gradient,
                                HessianFn hessian = nullptr,
                                double Lx = two_pi(), double Ly = two_pi());

    static double two_pi();

    SurfaceKind kind() const { return kind_; }
    double amplitude() const { return amplitude_; }
    double Lx() const { return Lx_; }
    double Ly() const { return Ly_; }

    /// Wraps a coordinate into [0,Lx) x [0,Ly).
    Vec2 wrap(Vec2 pt) const;

    double height(Vec2 pt) const;
    Vec2 gradient(Vec2 pt) const;

    /// Full metric sample (drift included) at an arbitrary point.
    MetricSample metric_at(Vec2 pt) const;

    /// Drift vector alone.
    Vec2 drift_at(Vec2 pt) const;

private:
    HeightSurface() = default;

    Vec2 drift_finite_difference(Vec2 pt) const;

    SurfaceKind kind_ = SurfaceKind::sinusoidal_a;
    double amplitude_ = 0.0;
    double Lx_ = 0.0;
    double Ly_ = 0.0;
    HeightFn height_;
    GradientFn gradient_;
    HessianFn hessian_;
};

/// Cell-centered precomputation of the metric on a uniform I x J mesh.
/// Immutable after construction; concurrent reads are safe.
class MetricGrid {
public:
    /// Throws DimensionError unless I, J >= 2.
    MetricGrid(const HeightSurface& surface, int I, int J);

    int I() const { return I_; }
    int J() const { return J_; }
    int cells() const { return I_ * J_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    double cell_area() const { return dx_ * dy_; }

    /// Midpoint-rule surface area: sum of sqrt|G| dx dy over all cells.
    double surface_area() const { return surface_area_; }

    const HeightSurface& surface() const { return surface_; }

    Vec2 center(int i, int j) const { return {(i + 0.5) * dx_, (j + 0.5) * dy_}; }

    int index(int i, int j) const { return i + I_ * j; }
    int wrap_i(int i) const { return (i % I_ + I_) % I_; }
    int wrap_j(int j) const { return (j % J_ + J_) % J_; }

    const MetricSample& cell(int i, int j) const { return samples_[index(i, j)]; }
    const MetricSample& cell(int idx) const { return samples_[idx]; }
    const std::vector<MetricSample>& samples() const { return samples_; }

    /// Cell that contains a wrapped coordinate.
    int locate(Vec2 pt) const;

private:
    HeightSurface surface_;
    int I_ = 0, J_ = 0;
    double dx_ = 0.0, dy_ = 0.0;
    double surface_area_ = 0.0;
    std::vector<MetricSample> samples_;
};

}  // namespace surfdk
