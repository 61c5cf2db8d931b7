#include "surfdk/fvm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "surfdk/errors.hpp"

namespace surfdk::fvm {

namespace {

/// Flux of the diffusion term: (u,v)_ij = sqrt|G|_ij G^{-1}_ij (grad_minus rho)_ij.
void diffusion_flux(const DensityField& rho, std::vector<double>& u, std::vector<double>& v) {
    const MetricGrid& g = rho.grid();
    const int I = g.I(), J = g.J();
    const double inv_dx = 1.0 / g.dx(), inv_dy = 1.0 / g.dy();
    for (int j = 0; j < J; ++j) {
        const int jm = (j == 0) ? J - 1 : j - 1;
        for (int i = 0; i < I; ++i) {
            const int im = (i == 0) ? I - 1 : i - 1;
            const int c = g.index(i, j);
            const double gx = (rho[c] - rho[g.index(im, j)]) * inv_dx;
            const double gy = (rho[c] - rho[g.index(i, jm)]) * inv_dy;
            const MetricSample& m = g.cell(c);
            u[c] = m.sqrt_det * (m.g_inv.xx * gx + m.g_inv.xy * gy);
            v[c] = m.sqrt_det * (m.g_inv.xy * gx + m.g_inv.yy * gy);
        }
    }
}

/// out += scale * (1/sqrt|G|) div_plus(u, v)
void add_scaled_div(const MetricGrid& g, const std::vector<double>& u,
                    const std::vector<double>& v, double scale, std::vector<double>& out) {
    const int I = g.I(), J = g.J();
    const double inv_dx = 1.0 / g.dx(), inv_dy = 1.0 / g.dy();
    for (int j = 0; j < J; ++j) {
        const int jp = (j == J - 1) ? 0 : j + 1;
        for (int i = 0; i < I; ++i) {
            const int ip = (i == I - 1) ? 0 : i + 1;
            const int c = g.index(i, j);
            const double d = (u[g.index(ip, j)] - u[c]) * inv_dx +
                             (v[g.index(i, jp)] - v[c]) * inv_dy;
            out[c] += scale * d / g.cell(c).sqrt_det;
        }
    }
}

/// Static potential flux coefficient sqrt|G| G^{-1} grad_minus V per cell.
void potential_flux_coefficients(const MetricGrid& g, const PotentialSpec& p,
                                 std::vector<double>& wx, std::vector<double>& wy) {
    const int I = g.I(), J = g.J();
    std::vector<double> V(static_cast<size_t>(g.cells()));
    for (int j = 0; j < J; ++j)
        for (int i = 0; i < I; ++i) V[g.index(i, j)] = p.V ? p.V(g.center(i, j)) : 0.0;
    const double inv_dx = 1.0 / g.dx(), inv_dy = 1.0 / g.dy();
    for (int j = 0; j < J; ++j) {
        const int jm = (j == 0) ? J - 1 : j - 1;
        for (int i = 0; i < I; ++i) {
            const int im = (i == 0) ? I - 1 : i - 1;
            const int c = g.index(i, j);
            const double gx = (V[c] - V[g.index(im, j)]) * inv_dx;
            const double gy = (V[c] - V[g.index(i, jm)]) * inv_dy;
            const MetricSample& m = g.cell(c);
            wx[c] = m.sqrt_det * (m.g_inv.xx * gx + m.g_inv.xy * gy);
            wy[c] = m.sqrt_det * (m.g_inv.xy * gx + m.g_inv.yy * gy);
        }
    }
}

}  // namespace

CellVectorField grad_minus(const DensityField& rho) {
    const MetricGrid& g = rho.grid();
    CellVectorField out(g);
    const int I = g.I(), J = g.J();
    const double inv_dx = 1.0 / g.dx(), inv_dy = 1.0 / g.dy();
    for (int j = 0; j < J; ++j) {
        const int jm = (j == 0) ? J - 1 : j - 1;
        for (int i = 0; i < I; ++i) {
            const int im = (i == 0) ? I - 1 : i - 1;
            const int c = g.index(i, j);
            out.u[c] = (rho[c] - rho[g.index(im, j)]) * inv_dx;
            out.v[c] = (rho[c] - rho[g.index(i, jm)]) * inv_dy;
        }
    }
    return out;
}

DensityField div_plus(const CellVectorField& vf) {
    const MetricGrid& g = *vf.grid;
    DensityField out(g);
    const int I = g.I(), J = g.J();
    const double inv_dx = 1.0 / g.dx(), inv_dy = 1.0 / g.dy();
    for (int j = 0; j < J; ++j) {
        const int jp = (j == J - 1) ? 0 : j + 1;
        for (int i = 0; i < I; ++i) {
            const int ip = (i == I - 1) ? 0 : i + 1;
            const int c = g.index(i, j);
            out[c] = (vf.u[g.index(ip, j)] - vf.u[c]) * inv_dx +
                     (vf.v[g.index(i, jp)] - vf.v[c]) * inv_dy;
        }
    }
    return out;
}

CellVectorField interaction_field(const DensityField& rho, const PotentialSpec& potentials) {
    const MetricGrid& g = rho.grid();
    CellVectorField out(g);
    if (!potentials.has_pairwise()) return out;
    const double da = g.cell_area();
    for (int c = 0; c < g.cells(); ++c) {
        const Vec2 xc = g.center(c % g.I(), c / g.I());
        Vec2 acc{0.0, 0.0};
        for (int k = 0; k < g.cells(); ++k) {
            const double w = rho[k] * g.cell(k).sqrt_det;
            if (w == 0.0) continue;
            const Vec2 xk = g.center(k % g.I(), k / g.I());
            const Vec2 gu = potentials.grad_U_x(xc, xk);
            acc.x += gu.x * w;
            acc.y += gu.y * w;
        }
        const Sym2& gi = g.cell(c).g_inv;
        out.u[c] = (gi.xx * acc.x + gi.xy * acc.y) * da;
        out.v[c] = (gi.xy * acc.x + gi.yy * acc.y) * da;
    }
    return out;
}

DensityField deterministic_rhs(const DensityField& rho, const PotentialSpec& potentials) {
    const MetricGrid& g = rho.grid();
    std::vector<double> u(static_cast<size_t>(g.cells())), v(static_cast<size_t>(g.cells()));
    diffusion_flux(rho, u, v);
    if (potentials.has_external()) {
        std::vector<double> wx(u.size()), wy(u.size());
        potential_flux_coefficients(g, potentials, wx, wy);
        for (int c = 0; c < g.cells(); ++c) {
            u[c] += rho[c] * wx[c];
            v[c] += rho[c] * wy[c];
        }
    }
    if (potentials.has_pairwise()) {
        CellVectorField F = interaction_field(rho, potentials);
        for (int c = 0; c < g.cells(); ++c) {
            const double sd = g.cell(c).sqrt_det;
            u[c] += rho[c] * sd * F.u[c];
            v[c] += rho[c] * sd * F.v[c];
        }
    }
    DensityField out(g);
    add_scaled_div(g, u, v, 1.0, out.values());
    return out;
}

DensityField noise_increment(const DensityField& rho, long long N, double dt,
                             const NoiseDraw& draw) {
    const MetricGrid& g = rho.grid();
    if (N < 1) throw Error(ErrorCode::invalid_argument, "noise_increment: N must be >= 1");
    if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "noise_increment: dt must be > 0");
    std::vector<double> u(static_cast<size_t>(g.cells())), v(static_cast<size_t>(g.cells()));
    for (int c = 0; c < g.cells(); ++c) {
        const MetricSample& m = g.cell(c);
        const double srho = std::sqrt(std::max(rho[c], 0.0));
        const double amp = srho * std::sqrt(m.sqrt_det);  // sqrt(rho^+) |G|^{1/4}
        u[c] = amp * (m.g_inv_sqrt.xx * draw.zx[c] + m.g_inv_sqrt.xy * draw.zy[c]);
        v[c] = amp * (m.g_inv_sqrt.xy * draw.zx[c] + m.g_inv_sqrt.yy * draw.zy[c]);
    }
    DensityField out(g);
    const double scale = std::sqrt(2.0 * dt / (double(N) * g.cell_area()));
    add_scaled_div(g, u, v, scale, out.values());
    return out;
}

Stepper::Stepper(const MetricGrid& grid, PotentialSpec potentials, long long N,
                 NoiseStream noise, bool noise_enabled)
    : grid_(&grid),
      potentials_(std::move(potentials)),
      N_(N),
      noise_(noise),
      noise_enabled_(noise_enabled),
      fu_(static_cast<size_t>(grid.cells())),
      fv_(static_cast<size_t>(grid.cells())),
      incr_(static_cast<size_t>(grid.cells())) {
    if (N_ < 1) throw Error(ErrorCode::invalid_argument, "fvm::Stepper: N must be >= 1");
    if (potentials_.has_external()) {
        wx_.resize(fu_.size());
        wy_.resize(fu_.size());
        potential_flux_coefficients(grid, potentials_, wx_, wy_);
    }
}

void Stepper::step(DensityField& rho, uint64_t step_index, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "fvm::Stepper: dt must be > 0");
    const MetricGrid& g = *grid_;
    const int cells = g.cells();

    diffusion_flux(rho, fu_, fv_);
    if (!wx_.empty()) {
        for (int c = 0; c < cells; ++c) {
            fu_[c] += rho[c] * wx_[c];
            fv_[c] += rho[c] * wy_[c];
        }
    }
    if (potentials_.has_pairwise()) {
        CellVectorField F = interaction_field(rho, potentials_);
        for (int c = 0; c < cells; ++c) {
            const double sd = g.cell(c).sqrt_det;
            fu_[c] += rho[c] * sd * F.u[c];
            fv_[c] += rho[c] * sd * F.v[c];
        }
    }
    std::vector<double>& out = rho.values();
    std::fill(incr_.begin(), incr_.end(), 0.0);
    add_scaled_div(g, fu_, fv_, dt, incr_);

    if (noise_enabled_) {
        for (int c = 0; c < cells; ++c) {
            const MetricSample& m = g.cell(c);
            if (out[c] < 0.0) ++stats_.negativity_cells;
            const double srho = std::sqrt(std::max(out[c], 0.0));
            const double amp = srho * std::sqrt(m.sqrt_det);
            const Vec2 z = noise_.normal_pair(step_index, uint64_t(c));
            fu_[c] = amp * (m.g_inv_sqrt.xx * z.x + m.g_inv_sqrt.xy * z.y);
            fv_[c] = amp * (m.g_inv_sqrt.xy * z.x + m.g_inv_sqrt.yy * z.y);
        }
        const double scale = std::sqrt(2.0 * dt / (double(N_) * g.cell_area()));
        add_scaled_div(g, fu_, fv_, scale, incr_);
    }

    for (int c = 0; c < cells; ++c) {
        out[c] += incr_[c];
        if (!std::isfinite(out[c])) {
            throw BlowupError("fvm step produced a non-finite density at step " +
                                  std::to_string(step_index) + ", cell " + std::to_string(c),
                              static_cast<long long>(step_index), double(step_index) * dt);
        }
    }
    ++stats_.steps;
}

OuStepper::OuStepper(const MetricGrid& grid, long long N, double rho_bar, NoiseStream noise)
    : grid_(&grid),
      N_(N),
      rho_bar_(rho_bar),
      noise_(noise),
      fu_(static_cast<size_t>(grid.cells())),
      fv_(static_cast<size_t>(grid.cells())),
      incr_(static_cast<size_t>(grid.cells())) {
    if (N_ < 1) throw Error(ErrorCode::invalid_argument, "OuStepper: N must be >= 1");
}

void OuStepper::step(DensityField& z, uint64_t step_index, double dt) {
    const MetricGrid& g = *grid_;
    const int cells = g.cells();
    std::fill(incr_.begin(), incr_.end(), 0.0);
    diffusion_flux(z, fu_, fv_);
    add_scaled_div(g, fu_, fv_, dt, incr_);
    const double scale = std::sqrt(2.0 * rho_bar_ * dt / (double(N_) * g.cell_area()));
    for (int c = 0; c < cells; ++c) {
        const MetricSample& m = g.cell(c);
        const double amp = std::sqrt(m.sqrt_det);
        const Vec2 w = noise_.normal_pair(step_index, uint64_t(c));
        fu_[c] = amp * (m.g_inv_sqrt.xx * w.x + m.g_inv_sqrt.xy * w.y);
        fv_[c] = amp * (m.g_inv_sqrt.xy * w.x + m.g_inv_sqrt.yy * w.y);
    }
    add_scaled_div(g, fu_, fv_, scale, incr_);
    for (int c = 0; c < cells; ++c) {
        z[c] += incr_[c];
        if (!std::isfinite(z[c])) {
            throw BlowupError("OU step produced a non-finite value at step " +
                                  std::to_string(step_index),
                              static_cast<long long>(step_index), double(step_index) * dt);
        }
    }
}

void linearized_ou_step(DensityField& z, long long N, double rho_bar, double dt,
                        const NoiseStream& noise, uint64_t step_index) {
    OuStepper stepper(z.grid(), N, rho_bar, noise);
    stepper.step(z, step_index, dt);
}

double spectral_radius(const MetricGrid& grid) {
    const int cells = grid.cells();
    // Power iteration on the symmetrized operator J^{-1/2} (-L_h) J^{-1/2},
    // which shares the spectrum of -J^{-1} L_h.
    std::vector<double> x(static_cast<size_t>(cells)), t(x.size());
    std::vector<double> u(x.size()), v(x.size());
    NoiseStream init(0x5eedu, "power-iteration");
    for (int c = 0; c < cells; ++c) x[c] = init.uniform_pair(0, uint64_t(c)).x - 0.5;

    DensityField work(grid);
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int c = 0; c < cells; ++c) work[c] = in[c] / std::sqrt(grid.cell(c).sqrt_det);
        diffusion_flux(work, u, v);
        std::fill(out.begin(), out.end(), 0.0);
        // out = -(1/sqrt(J)) div(J G^{-1} grad (x/sqrt(J)))
        const int I = grid.I(), J = grid.J();
        const double inv_dx = 1.0 / grid.dx(), inv_dy = 1.0 / grid.dy();
        for (int j = 0; j < J; ++j) {
            const int jp = (j == J - 1) ? 0 : j + 1;
            for (int i = 0; i < I; ++i) {
                const int ip = (i == I - 1) ? 0 : i + 1;
                const int c = grid.index(i, j);
                const double d = (u[grid.index(ip, j)] - u[c]) * inv_dx +
                                 (v[grid.index(i, jp)] - v[c]) * inv_dy;
                out[c] = -d / std::sqrt(grid.cell(c).sqrt_det);
            }
        }
    };

    double lambda = 0.0;
    int consecutive = 0;
    for (int it = 0; it < 10000; ++it) {
        apply(x, t);
        double num = 0.0, den = 0.0, norm = 0.0;
        for (int c = 0; c < cells; ++c) {
            num += x[c] * t[c];
            den += x[c] * x[c];
            norm += t[c] * t[c];
        }
        const double rayleigh = num / den;
        norm = std::sqrt(norm);
        for (int c = 0; c < cells; ++c) x[c] = t[c] / norm;
        if (lambda > 0.0 && std::abs(rayleigh - lambda) <= 1e-6 * rayleigh) {
            if (++consecutive >= 2) return rayleigh;
        } else {
            consecutive = 0;
        }
        lambda = rayleigh;
    }
    throw NoConvergenceError("spectral_radius: power iteration did not converge in 1e4 steps");
}

double estimate_max_dt(const MetricGrid& grid) { return 2.0 / spectral_radius(grid); }

}  // namespace surfdk::fvm
