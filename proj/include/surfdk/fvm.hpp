#pragma once

#include <cstdint>

#include "surfdk/field.hpp"
#include "surfdk/potentials.hpp"
#include "surfdk/rng.hpp"

namespace surfdk::fvm {

/// One-sided backward difference gradient with periodic wrap:
/// ((rho_ij - rho_{i-1,j})/dx, (rho_ij - rho_{i,j-1})/dy).
CellVectorField grad_minus(const DensityField& rho);

/// Discrete adjoint divergence (forward differences with periodic wrap):
/// (u_{i+1,j} - u_ij)/dx + (v_{i,j+1} - v_ij)/dy.
DensityField div_plus(const CellVectorField& vf);

/// Midpoint quadrature of the pairwise interaction gradient,
/// F_ij = sum_kl grad_G U(x_ij, x_kl) rho_kl sqrt|G|_kl dx dy.
CellVectorField interaction_field(const DensityField& rho, const PotentialSpec& potentials);

/// Deterministic right-hand side:
///   (1/sqrt|G|) div_plus( sqrt|G| G^{-1} grad_minus rho )
/// + (1/sqrt|G|) div_plus( sqrt|G| rho (G^{-1} grad_minus V + F) ),
/// with all metric factors at cell centers and F the interaction field when a
/// pairwise kernel is configured.
DensityField deterministic_rhs(const DensityField& rho, const PotentialSpec& potentials);

/// Full noise increment (dt included):
/// sqrt(2 dt/(N dx dy)) (1/sqrt|G|) div_plus( sqrt(max(rho,0)) |G|^{1/4} G^{-1/2} Z ).
DensityField noise_increment(const DensityField& rho, long long N, double dt,
                             const NoiseDraw& draw);

/// Per-run integrator diagnostics.
struct StepStats {
    long long negativity_cells = 0;  // cells clipped by sqrt(max(rho,0))
    long long steps = 0;
};

/// Euler-Maruyama stepper for the cell-averaged density. Holds scratch
/// buffers and the static potential flux so repeated stepping does no
/// allocation. Noise draws are addressed by (step_index, cell), giving
/// schedule-independent reproducibility.
class Stepper {
public:
    Stepper(const MetricGrid& grid, PotentialSpec potentials, long long N,
            NoiseStream noise, bool noise_enabled);

    /// Advances rho in place. Throws BlowupError on non-finite values.
    void step(DensityField& rho, uint64_t step_index, double dt);

    const StepStats& stats() const { return stats_; }
    bool noise_enabled() const { return noise_enabled_; }

private:
    const MetricGrid* grid_;
    PotentialSpec potentials_;
    long long N_;
    NoiseStream noise_;
    bool noise_enabled_;
    StepStats stats_;
    // static per-cell flux coefficient sqrt|G| G^{-1} grad_minus V
    std::vector<double> wx_, wy_;
    std::vector<double> fu_, fv_, incr_;  // scratch
};

/// Stepper for the constant-coefficient linearization around rho_bar:
/// Z += dt J^{-1} L_h Z + sqrt(2 rho_bar dt/(N dx dy)) J^{-1} K_h W.
class OuStepper {
public:
    OuStepper(const MetricGrid& grid, long long N, double rho_bar, NoiseStream noise);
    void step(DensityField& z, uint64_t step_index, double dt);

private:
    const MetricGrid* grid_;
    long long N_;
    double rho_bar_;
    NoiseStream noise_;
    std::vector<double> fu_, fv_, incr_;
};

/// Single-step convenience wrapper around OuStepper.
void linearized_ou_step(DensityField& z, long long N, double rho_bar, double dt,
                        const NoiseStream& noise, uint64_t step_index);

/// Explicit-Euler stability bound 2/lambda_max for the deterministic part,
/// with lambda_max the spectral radius of -J^{-1} L_h from power iteration
/// (relative tolerance 1e-6). Throws NoConvergenceError after 1e4 iterations.
double estimate_max_dt(const MetricGrid& grid);

/// Spectral radius of -J^{-1} L_h (the quantity behind estimate_max_dt).
double spectral_radius(const MetricGrid& grid);

}  // namespace surfdk::fvm
