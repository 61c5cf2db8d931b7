#include "surfdk/particles.hpp"

#include <cmath>
#include <string>

#include "surfdk/errors.hpp"

namespace surfdk::particles {

ParticleEnsemble sample_initial(const MetricGrid& grid, int per_cell, const NoiseStream& init) {
    if (per_cell < 0) {
        throw Error(ErrorCode::invalid_argument, "sample_initial: per_cell must be >= 0");
    }
    ParticleEnsemble e;
    e.positions.reserve(static_cast<size_t>(grid.cells()) * per_cell);
    for (int j = 0; j < grid.J(); ++j) {
        for (int i = 0; i < grid.I(); ++i) {
            const uint64_t cell = uint64_t(grid.index(i, j));
            for (int k = 0; k < per_cell; ++k) {
                Vec2 u = init.uniform_pair(cell, uint64_t(k));
                Vec2 pos{(i + u.x) * grid.dx(), (j + u.y) * grid.dy()};
                e.positions.push_back(grid.surface().wrap(pos));
            }
        }
    }
    return e;
}

void em_step(ParticleEnsemble& ensemble, const HeightSurface& surface,
             const PotentialSpec& potentials, double dt, const NoiseStream& noise,
             uint64_t step_index) {
    if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "particles::em_step: dt must be > 0");
    const double sqrt_2dt = std::sqrt(2.0 * dt);
    const long long n = ensemble.size();
    const bool pairwise = potentials.has_pairwise();
    // snapshot for the simultaneous pair sum
    const std::vector<Vec2> snapshot = pairwise ? ensemble.positions : std::vector<Vec2>{};

    for (long long p = 0; p < n; ++p) {
        const Vec2 x = ensemble.positions[p];
        const MetricSample m = surface.metric_at(x);
        Vec2 drift = m.drift;
        if (potentials.has_external()) {
            const Vec2 gv = m.g_inv.apply(potentials.grad_V(x));
            drift.x -= gv.x;
            drift.y -= gv.y;
        }
        if (pairwise) {
            Vec2 acc{0.0, 0.0};
            for (const Vec2& xj : snapshot) {
                const Vec2 gu = potentials.grad_U_x(x, xj);
                acc.x += gu.x;
                acc.y += gu.y;
            }
            const Vec2 gacc = m.g_inv.apply({acc.x / double(n), acc.y / double(n)});
            drift.x -= gacc.x;
            drift.y -= gacc.y;
        }
        const Vec2 xi = noise.normal_pair(step_index, uint64_t(p));
        const Vec2 kick = m.g_inv_sqrt.apply(xi);
        Vec2 next{x.x + drift.x * dt + sqrt_2dt * kick.x,
                  x.y + drift.y * dt + sqrt_2dt * kick.y};
        if (!std::isfinite(next.x) || !std::isfinite(next.y)) {
            throw BlowupError("particle " + std::to_string(p) +
                                  " became non-finite at t = " + std::to_string(ensemble.time),
                              p, ensemble.time);
        }
        ensemble.positions[p] = surface.wrap(next);
    }
    ensemble.time += dt;
}

std::vector<long long> bin_to_grid(const ParticleEnsemble& ensemble, const MetricGrid& grid) {
    std::vector<long long> counts(static_cast<size_t>(grid.cells()), 0);
    for (const Vec2& x : ensemble.positions) ++counts[grid.locate(x)];
    return counts;
}

}  // namespace surfdk::particles
