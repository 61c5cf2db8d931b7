#pragma once

#include <span>
#include <vector>

#include "surfdk/field.hpp"

namespace surfdk::stats {

/// Streaming per-cell mean/variance accumulator (Welford) for paired density
/// and occupancy-count snapshots.
class RunningMoments {
public:
    explicit RunningMoments(int cells);

    /// Single-pass update with one snapshot pair. Throws on shape mismatch.
    void update(std::span<const double> rho, std::span<const double> counts);

    /// Merges another accumulator as if its stream had been concatenated.
    void merge(const RunningMoments& other);

    long long n() const { return n_; }
    int cells() const { return static_cast<int>(mean_rho_.size()); }

    double mean_rho(int c) const { return mean_rho_[c]; }
    double mean_count(int c) const { return mean_cnt_[c]; }
    /// Sample variance M2/(n-1); requires n >= 2.
    double var_rho(int c) const;
    double var_count(int c) const;

private:
    long long n_ = 0;
    std::vector<double> mean_rho_, m2_rho_;
    std::vector<double> mean_cnt_, m2_cnt_;
};

/// Closed-form equilibrium reference fields:
///   mean rho            = 1/A_S
///   Var(rho)_ij         = 1/(N A_S sqrt|G|_ij dx dy)
///   mean N_ij = Var N_ij = N sqrt|G|_ij dx dy / A_S.
struct TheoryReference {
    double mean_rho = 0.0;
    std::vector<double> var_rho;
    std::vector<double> mean_count;
    std::vector<double> var_count;

    static TheoryReference compute(const MetricGrid& grid, long long N);
};

/// Expected per-cell occupancy counts N_ij = N rho_ij sqrt|G|_ij dx dy.
std::vector<double> rho_to_counts(const DensityField& rho, long long N);

/// Inverse map, rho_ij = counts_ij / (N sqrt|G|_ij dx dy).
std::vector<double> counts_to_rho(std::span<const long long> counts, const MetricGrid& grid,
                                  long long N);

struct CompareTolerances {
    double mean_rho = 0.02;
    double var_rho = 0.10;
    double poisson = 0.10;
};

/// Per-cell relative errors of the accumulated moments against the theory
/// reference, with max/median summaries and a pass verdict against the given
/// tolerances (gated on the median; the max is reported alongside, since at
/// finite sample sizes the cell-max is dominated by Monte-Carlo noise).
struct CompareReport {
    std::vector<double> rel_err_mean_rho;
    std::vector<double> rel_err_var_rho;
    std::vector<double> rel_err_mean_count;
    std::vector<double> rel_err_var_count;
    std::vector<double> poisson_ratio;  // Var(N)/mean(N)

    double max_mean_rho = 0.0, median_mean_rho = 0.0;
    double max_var_rho = 0.0, median_var_rho = 0.0;
    double max_poisson = 0.0, median_poisson = 0.0;  // |ratio - 1|
    bool passed = false;
};

CompareReport compare(const RunningMoments& acc, const TheoryReference& ref,
                      const CompareTolerances& tol = {});

double median(std::vector<double> values);

}  // namespace surfdk::stats
