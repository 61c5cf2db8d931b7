#pragma once

#include <cstdint>
#include <vector>

#include "surfdk/geometry.hpp"
#include "surfdk/potentials.hpp"
#include "surfdk/rng.hpp"

namespace surfdk::particles {

/// N particle positions in the periodic coordinate domain. Positions are kept
/// wrapped into [0,Lx) x [0,Ly) after every step; N is constant over a run.
struct ParticleEnsemble {
    std::vector<Vec2> positions;
    double time = 0.0;

    long long size() const { return static_cast<long long>(positions.size()); }
};

/// per_cell particles per grid cell, each placed uniformly at random within
/// its cell. Draws are addressed by (cell, slot) on the given stream.
ParticleEnsemble sample_initial(const MetricGrid& grid, int per_cell, const NoiseStream& init);

/// One Euler-Maruyama step of the overdamped Langevin dynamics
///   X += (b - G^{-1} grad V - (1/N) sum_j G^{-1} grad_x U(., X_j)) dt
///        + sqrt(2 dt) G^{-1/2} xi.
/// The pair sum is evaluated against a read-only snapshot of positions, so
/// the update is simultaneous. Throws BlowupError (with particle index and
/// time) on non-finite positions.
void em_step(ParticleEnsemble& ensemble, const HeightSurface& surface,
             const PotentialSpec& potentials, double dt, const NoiseStream& noise,
             uint64_t step_index);

/// Per-cell occupancy counts; sums to the particle count exactly.
std::vector<long long> bin_to_grid(const ParticleEnsemble& ensemble, const MetricGrid& grid);

}  // namespace surfdk::particles
