#include "surfdk/geometry.hpp"

#include <cmath>

namespace surfdk {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_scalar(double v, double L) {
    double r = v - L * std::floor(v / L);
    if (r >= L) r -= L;
    if (r < 0.0) r += L;
    return r;
}

/// Metric quantities from the slopes alone. The symmetric inverse square root
/// uses c = 1/(s + sqrt(s)), which satisfies R R^T = G^{-1} identically.
MetricSample sample_from_slopes(double p, double q) {
    MetricSample m;
    m.p = p;
    m.q = q;
    m.s = 1.0 + p * p + q * q;
    m.sqrt_det = std::sqrt(m.s);
    m.g_inv = {(1.0 + q * q) / m.s, -p * q / m.s, (1.0 + p * p) / m.s};
    double c = 1.0 / (m.s + m.sqrt_det);
    m.g_inv_sqrt = {1.0 - c * p * p, -c * p * q, 1.0 - c * q * q};
    return m;
}

/// Drift b = (1/sqrt(s)) div(sqrt(s) G^{-1}) expressed through the slopes and
/// the height Hessian (px = H_xx, py = qx = H_xy, qy = H_yy).
Vec2 drift_from_hessian(double p, double q, const Sym2& hess) {
    double px = hess.xx, py = hess.xy, qx = hess.xy, qy = hess.yy;
    double s = 1.0 + p * p + q * q;
    double sx = 2.0 * (p * px + q * qx);
    double sy = 2.0 * (p * py + q * qy);
    double s2 = 2.0 * s * s;
    Vec2 b;
    b.x = (2.0 * q * qx - py * q - p * qy) / s - ((1.0 + q * q) * sx - p * q * sy) / s2;
    b.y = (2.0 * p * py - px * q - p * qx) / s - ((1.0 + p * p) * sy - p * q * sx) / s2;
    return b;
}

}  // namespace

double HeightSurface::two_pi() { return kTwoPi; }

HeightSurface HeightSurface::sinusoidal(double amplitude) {
    HeightSurface s;
    s.kind_ = SurfaceKind::sinusoidal_a;
    s.amplitude_ = amplitude;
    s.Lx_ = s.Ly_ = kTwoPi;
    return s;
}

HeightSurface HeightSurface::four_peak(double amplitude) {
    HeightSurface s;
    s.kind_ = SurfaceKind::four_peak_b;
    s.amplitude_ = amplitude;
    s.Lx_ = s.Ly_ = kTwoPi;
    return s;
}

HeightSurface HeightSurface::custom(HeightFn height, GradientFn gradient, HessianFn hessian,
                                    double Lx, double Ly) {
    if (!(Lx > 0.0) || !(Ly > 0.0)) {
        throw ConfigError("custom surface: domain lengths must be positive");
    }
    HeightSurface s;
    s.kind_ = SurfaceKind::custom;
    s.Lx_ = Lx;
    s.Ly_ = Ly;
    s.height_ = std::move(height);
    s.gradient_ = std::move(gradient);
    s.hessian_ = std::move(hessian);
    return s;
}

Vec2 HeightSurface::wrap(Vec2 pt) const {
    return {wrap_scalar(pt.x, Lx_), wrap_scalar(pt.y, Ly_)};
}

double HeightSurface::height(Vec2 pt) const {
    pt = wrap(pt);
    switch (kind_) {
        case SurfaceKind::sinusoidal_a:
            return amplitude_ * std::sin(pt.x) * std::sin(pt.y);
        case SurfaceKind::four_peak_b: {
            double sx = std::sin(pt.x), sy = std::sin(pt.y);
            return amplitude_ * sx * sx * sy * sy;
        }
        case SurfaceKind::custom:
            if (!height_) throw ConfigError("custom surface: height function missing");
            return height_(pt);
    }
    return 0.0;
}

Vec2 HeightSurface::gradient(Vec2 pt) const {
    pt = wrap(pt);
    switch (kind_) {
        case SurfaceKind::sinusoidal_a:
            return {amplitude_ * std::cos(pt.x) * std::sin(pt.y),
                    amplitude_ * std::sin(pt.x) * std::cos(pt.y)};
        case SurfaceKind::four_peak_b: {
            double sx = std::sin(pt.x), cx = std::cos(pt.x);
            double sy = std::sin(pt.y), cy = std::cos(pt.y);
            return {2.0 * amplitude_ * cx * sx * sy * sy, 2.0 * amplitude_ * sx * sx * cy * sy};
        }
        case SurfaceKind::custom:
            if (!gradient_) throw ConfigError("custom surface: gradient function missing");
            return gradient_(pt);
    }
    return {};
}

MetricSample HeightSurface::metric_at(Vec2 pt) const {
    pt = wrap(pt);
    Vec2 g = gradient(pt);
    MetricSample m = sample_from_slopes(g.x, g.y);
    m.drift = drift_at(pt);
    return m;
}

Vec2 HeightSurface::drift_at(Vec2 pt) const {
    pt = wrap(pt);
    switch (kind_) {
        case SurfaceKind::sinusoidal_a: {
            double a = amplitude_;
            double sx = std::sin(pt.x), cx = std::cos(pt.x);
            double sy = std::sin(pt.y), cy = std::cos(pt.y);
            double p = a * cx * sy, q = a * sx * cy;
            double s = 1.0 + p * p + q * q;
            double f = a * a * (2.0 + a * a * (cx * cx + cy * cy)) / (s * s);
            return {f * sx * cx * sy * sy, f * sy * cy * sx * sx};
        }
        case SurfaceKind::four_peak_b: {
            double a = amplitude_;
            double sx = std::sin(pt.x), cx = std::cos(pt.x);
            double sy = std::sin(pt.y), cy = std::cos(pt.y);
            double p = 2.0 * a * cx * sx * sy * sy;
            double q = 2.0 * a * sx * sx * cy * sy;
            Sym2 hess{2.0 * a * (cx * cx - sx * sx) * sy * sy,
                      4.0 * a * cx * sx * cy * sy,
                      2.0 * a * sx * sx * (cy * cy - sy * sy)};
            return drift_from_hessian(p, q, hess);
        }
        case SurfaceKind::custom: {
            if (!gradient_) throw ConfigError("custom surface: gradient function missing");
            if (hessian_) {
                Vec2 g = gradient_(pt);
                return drift_from_hessian(g.x, g.y, hessian_(pt));
            }
            return drift_finite_difference(pt);
        }
    }
    return {};
}

/// Fourth-order central differences of the flux columns sqrt(s) G^{-1} e_k.
Vec2 HeightSurface::drift_finite_difference(Vec2 pt) const {
    const double h = 1e-5 * std::min(Lx_, Ly_);
    auto flux = [this](Vec2 at) {
        Vec2 g = gradient(wrap(at));
        MetricSample m = sample_from_slopes(g.x, g.y);
        Sym2 f = m.g_inv;
        f.xx *= m.sqrt_det;
        f.xy *= m.sqrt_det;
        f.yy *= m.sqrt_det;
        return f;
    };
    auto d4 = [h](double m2, double m1, double p1, double p2) {
        return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    };
    Sym2 fx_m2 = flux({pt.x - 2 * h, pt.y}), fx_m1 = flux({pt.x - h, pt.y});
    Sym2 fx_p1 = flux({pt.x + h, pt.y}), fx_p2 = flux({pt.x + 2 * h, pt.y});
    Sym2 fy_m2 = flux({pt.x, pt.y - 2 * h}), fy_m1 = flux({pt.x, pt.y - h});
    Sym2 fy_p1 = flux({pt.x, pt.y + h}), fy_p2 = flux({pt.x, pt.y + 2 * h});

    Vec2 g = gradient(pt);
    double rs = std::sqrt(1.0 + g.x * g.x + g.y * g.y);
    Vec2 b;
    b.x = (d4(fx_m2.xx, fx_m1.xx, fx_p1.xx, fx_p2.xx) +
           d4(fy_m2.xy, fy_m1.xy, fy_p1.xy, fy_p2.xy)) / rs;
    b.y = (d4(fx_m2.xy, fx_m1.xy, fx_p1.xy, fx_p2.xy) +
           d4(fy_m2.yy, fy_m1.yy, fy_p1.yy, fy_p2.yy)) / rs;
    return b;
}

MetricGrid::MetricGrid(const HeightSurface& surface, int I, int J)
    : surface_(surface), I_(I), J_(J) {
    if (I < 2 || J < 2) {
        throw DimensionError("MetricGrid: need I, J >= 2, got " + std::to_string(I) + "x" +
                             std::to_string(J));
    }
    dx_ = surface.Lx() / I;
    dy_ = surface.Ly() / J;
    samples_.resize(static_cast<size_t>(I) * J);
    double area = 0.0;
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i < I; ++i) {
            MetricSample m = surface_.metric_at(center(i, j));
            area += m.sqrt_det;
            samples_[index(i, j)] = m;
        }
    }
    surface_area_ = area * dx_ * dy_;
}

int MetricGrid::locate(Vec2 pt) const {
    pt = surface_.wrap(pt);
    int i = static_cast<int>(pt.x / dx_);
    int j = static_cast<int>(pt.y / dy_);
    if (i >= I_) i = I_ - 1;
    if (j >= J_) j = J_ - 1;
    return index(i, j);
}

}  // namespace surfdk
