#include "surfdk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "surfdk/errors.hpp"

namespace surfdk::stats {

RunningMoments::RunningMoments(int cells)
    : mean_rho_(cells, 0.0), m2_rho_(cells, 0.0), mean_cnt_(cells, 0.0), m2_cnt_(cells, 0.0) {
    if (cells <= 0) throw Error(ErrorCode::invalid_argument, "RunningMoments: cells must be > 0");
}

void RunningMoments::update(std::span<const double> rho, std::span<const double> counts) {
    const size_t m = mean_rho_.size();
    if (rho.size() != m || counts.size() != m) {
        throw DimensionError("RunningMoments::update: snapshot shape mismatch (" +
                             std::to_string(rho.size()) + "," + std::to_string(counts.size()) +
                             " vs " + std::to_string(m) + " cells)");
    }
    ++n_;
    const double inv_n = 1.0 / double(n_);
    for (size_t c = 0; c < m; ++c) {
        double d = rho[c] - mean_rho_[c];
        mean_rho_[c] += d * inv_n;
        m2_rho_[c] += d * (rho[c] - mean_rho_[c]);

        d = counts[c] - mean_cnt_[c];
        mean_cnt_[c] += d * inv_n;
        m2_cnt_[c] += d * (counts[c] - mean_cnt_[c]);
    }
}

void RunningMoments::merge(const RunningMoments& other) {
    if (other.cells() != cells()) {
        throw DimensionError("RunningMoments::merge: cell count mismatch");
    }
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = double(n_), nb = double(other.n_);
    const double nt = na + nb;
    for (int c = 0; c < cells(); ++c) {
        double d = other.mean_rho_[c] - mean_rho_[c];
        m2_rho_[c] += other.m2_rho_[c] + d * d * na * nb / nt;
        mean_rho_[c] += d * nb / nt;

        d = other.mean_cnt_[c] - mean_cnt_[c];
        m2_cnt_[c] += other.m2_cnt_[c] + d * d * na * nb / nt;
        mean_cnt_[c] += d * nb / nt;
    }
    n_ += other.n_;
}

double RunningMoments::var_rho(int c) const {
    if (n_ < 2) throw Error(ErrorCode::invalid_argument, "variance undefined for n < 2");
    return m2_rho_[c] / double(n_ - 1);
}

double RunningMoments::var_count(int c) const {
    if (n_ < 2) throw Error(ErrorCode::invalid_argument, "variance undefined for n < 2");
    return m2_cnt_[c] / double(n_ - 1);
}

TheoryReference TheoryReference::compute(const MetricGrid& grid, long long N) {
    if (N < 1) throw Error(ErrorCode::invalid_argument, "TheoryReference: N must be >= 1");
    TheoryReference ref;
    const double A = grid.surface_area();
    const double da = grid.cell_area();
    ref.mean_rho = 1.0 / A;
    ref.var_rho.resize(grid.cells());
    ref.mean_count.resize(grid.cells());
    ref.var_count.resize(grid.cells());
    for (int c = 0; c < grid.cells(); ++c) {
        const double sd = grid.cell(c).sqrt_det;
        ref.var_rho[c] = 1.0 / (double(N) * A * sd * da);
        ref.mean_count[c] = double(N) * sd * da / A;
        ref.var_count[c] = ref.mean_count[c];  // Poisson
    }
    return ref;
}

std::vector<double> rho_to_counts(const DensityField& rho, long long N) {
    const MetricGrid& g = rho.grid();
    std::vector<double> counts(static_cast<size_t>(g.cells()));
    for (int c = 0; c < g.cells(); ++c) {
        counts[c] = double(N) * rho[c] * g.cell(c).sqrt_det * g.cell_area();
    }
    return counts;
}

std::vector<double> counts_to_rho(std::span<const long long> counts, const MetricGrid& grid,
                                  long long N) {
    if (counts.size() != static_cast<size_t>(grid.cells())) {
        throw DimensionError("counts_to_rho: shape mismatch");
    }
    std::vector<double> rho(counts.size());
    for (int c = 0; c < grid.cells(); ++c) {
        rho[c] = double(counts[c]) / (double(N) * grid.cell(c).sqrt_det * grid.cell_area());
    }
    return rho;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    std::nth_element(values.begin(), values.begin() + mid - 1, values.begin() + mid);
    return 0.5 * (values[mid - 1] + hi);
}

CompareReport compare(const RunningMoments& acc, const TheoryReference& ref,
                      const CompareTolerances& tol) {
    if (acc.n() < 2) throw Error(ErrorCode::invalid_argument, "compare: need n >= 2 samples");
    const int m = acc.cells();
    CompareReport r;
    r.rel_err_mean_rho.resize(m);
    r.rel_err_var_rho.resize(m);
    r.rel_err_mean_count.resize(m);
    r.rel_err_var_count.resize(m);
    r.poisson_ratio.resize(m);
    for (int c = 0; c < m; ++c) {
        r.rel_err_mean_rho[c] = std::abs(acc.mean_rho(c) - ref.mean_rho) / ref.mean_rho;
        r.rel_err_var_rho[c] = std::abs(acc.var_rho(c) - ref.var_rho[c]) / ref.var_rho[c];
        r.rel_err_mean_count[c] =
            std::abs(acc.mean_count(c) - ref.mean_count[c]) / ref.mean_count[c];
        r.rel_err_var_count[c] = std::abs(acc.var_count(c) - ref.var_count[c]) / ref.var_count[c];
        r.poisson_ratio[c] = acc.var_count(c) / acc.mean_count(c);
    }
    auto absdev1 = [](const std::vector<double>& v) {
        std::vector<double> d(v.size());
        for (size_t i = 0; i < v.size(); ++i) d[i] = std::abs(v[i] - 1.0);
        return d;
    };
    r.max_mean_rho = *std::max_element(r.rel_err_mean_rho.begin(), r.rel_err_mean_rho.end());
    r.median_mean_rho = median(r.rel_err_mean_rho);
    r.max_var_rho = *std::max_element(r.rel_err_var_rho.begin(), r.rel_err_var_rho.end());
    r.median_var_rho = median(r.rel_err_var_rho);
    std::vector<double> pdev = absdev1(r.poisson_ratio);
    r.max_poisson = *std::max_element(pdev.begin(), pdev.end());
    r.median_poisson = median(pdev);
    r.passed = r.median_mean_rho <= tol.mean_rho && r.median_var_rho <= tol.var_rho &&
               r.median_poisson <= tol.poisson;
    return r;
}

}  // namespace surfdk::stats
