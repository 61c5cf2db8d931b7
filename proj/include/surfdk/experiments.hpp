#pragma once

#include <optional>
#include <vector>

#include "surfdk/config.hpp"
#include "surfdk/field.hpp"
#include "surfdk/stats.hpp"

namespace surfdk {

/// Builds the configured initial density and checks that it integrates to one
/// under the declared measure.
DensityField build_initial_condition(const ExperimentConfig& cfg, const MetricGrid& grid);

struct EquilibriumResult {
    stats::CompareReport fvm;
    std::optional<stats::CompareReport> particles;
    long long samples = 0;
    double dt = 0.0;
    long long negativity_events = 0;
    bool passed = false;
};

struct TransientResult {
    std::vector<double> times;
    std::vector<double> peak_rho;
    std::vector<double> peak_count;
    double running_max_rho = 0.0;
    double running_max_count = 0.0;
    double mass_initial = 0.0;
    double mass_final = 0.0;
    double dt = 0.0;
    long long negativity_events = 0;
};

struct FdrCheckResult {
    bool assembled = false;
    double asymmetry = 0.0;
    double factorization = 0.0;
    double lyapunov = 0.0;
    double max_var_rel_err = 0.0;
    double median_var_rel_err = 0.0;
    double max_cov_z = 0.0;
    int cov_pairs = 0;
    int cov_pairs_over_3 = 0;
    long long samples = 0;
    double dt = 0.0;
    bool algebra_passed = false;
    bool variance_passed = false;
    bool covariance_passed = false;
    bool passed = false;
};

struct ParticlesResult {
    stats::CompareReport report;
    long long samples = 0;
    double dt = 0.0;
    bool passed = false;
};

struct DtEstimate {
    double lambda_max = 0.0;
    double dt_max = 0.0;
    double suggested_dt = 0.0;
};

EquilibriumResult run_equilibrium(const ExperimentConfig& cfg);
TransientResult run_transient(const ExperimentConfig& cfg);
TransientResult run_potential(const ExperimentConfig& cfg);
FdrCheckResult run_fdr_check(const ExperimentConfig& cfg);
ParticlesResult run_particles(const ExperimentConfig& cfg);
DtEstimate run_estimate_dt(const ExperimentConfig& cfg);

}  // namespace surfdk
