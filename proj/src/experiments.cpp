#include "surfdk/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "surfdk/errors.hpp"
#include "surfdk/fvm.hpp"
#include "surfdk/operators.hpp"
#include "surfdk/particles.hpp"
#include "surfdk/rng.hpp"
#include "surfdk/snapshot.hpp"

namespace surfdk {

namespace {

constexpr const char* kFvmNoise = "fvm-noise";
constexpr const char* kParticleNoise = "particle-noise";
constexpr const char* kInit = "init";

double periodic_distance(Vec2 a, Vec2 b, double Lx, double Ly) {
    double dx = std::abs(a.x - b.x);
    double dy = std::abs(a.y - b.y);
    if (dx > 0.5 * Lx) dx = Lx - dx;
    if (dy > 0.5 * Ly) dy = Ly - dy;
    return std::hypot(dx, dy);
}

std::string snapshot_name(long long step) {
    char buf[48];
    snprintf(buf, sizeof(buf), "snapshot_%08lld.csv", step);
    return buf;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

}  // namespace

DensityField build_initial_condition(const ExperimentConfig& cfg, const MetricGrid& grid) {
    DensityField rho(grid);
    switch (cfg.ic_kind) {
        case IcKind::uniform_nu: {
            const double v = 1.0 / grid.surface_area();
            std::fill(rho.values().begin(), rho.values().end(), v);
            return rho;
        }
        case IcKind::disk: {
            const double Lx = grid.surface().Lx(), Ly = grid.surface().Ly();
            double weight = 0.0;  // integral of the indicator under the declared measure
            std::vector<int> inside;
            for (int j = 0; j < grid.J(); ++j) {
                for (int i = 0; i < grid.I(); ++i) {
                    if (periodic_distance(grid.center(i, j), cfg.ic_center, Lx, Ly) <
                        cfg.ic_radius) {
                        const int c = grid.index(i, j);
                        inside.push_back(c);
                        weight += (cfg.ic_normalization == IcNormalization::nu)
                                      ? grid.cell(c).sqrt_det
                                      : 1.0;
                    }
                }
            }
            if (inside.empty()) {
                throw ConfigError("ic.radius: disk contains no cell centers");
            }
            weight *= grid.cell_area();
            const double value = cfg.ic_value ? *cfg.ic_value : 1.0 / weight;
            for (int c : inside) rho[c] = value;
            const double integral = value * weight;
            // explicit values are typically rounded constants; allow 1e-3
            const double tol = cfg.ic_value ? 1e-3 : 1e-8;
            if (std::abs(integral - 1.0) > tol) {
                throw ConfigError("ic.value: initial condition integrates to " +
                                  std::to_string(integral) + " under the declared measure");
            }
            return rho;
        }
        case IcKind::file: {
            rho = read_snapshot_csv(cfg.ic_path, grid);
            if (std::abs(rho.mass() - 1.0) > 1e-8) {
                throw ConfigError("ic.path: field integrates to " + std::to_string(rho.mass()) +
                                  " under the surface measure, expected 1");
            }
            return rho;
        }
    }
    throw ConfigError("ic.kind: unsupported initial condition");
}

EquilibriumResult run_equilibrium(const ExperimentConfig& cfg) {
    Timer timer;
    const HeightSurface surface = cfg.make_surface();
    const MetricGrid grid(surface, cfg.I, cfg.J);
    const double dt = cfg.resolve_dt(grid);

    ensure_run_dir(cfg.output_dir);
    cfg.write_manifest(cfg.output_dir + "/manifest.cfg");

    const PotentialSpec potentials = PotentialSpec::sine_squared(cfg.v0);
    EquilibriumResult result;
    result.dt = dt;

    // finite-volume chain
    DensityField rho = build_initial_condition(cfg, grid);
    fvm::Stepper stepper(grid, potentials, cfg.N, NoiseStream(cfg.seed, kFvmNoise),
                         cfg.noise_enabled);
    stats::RunningMoments fvm_acc(grid.cells());
    uint64_t step_index = 0;
    for (long long k = 0; k < cfg.equilibration_steps; ++k) stepper.step(rho, step_index++, dt);
    for (long long k = 1; k <= cfg.steps; ++k) {
        stepper.step(rho, step_index++, dt);
        if (k % cfg.sample_every == 0) {
            fvm_acc.update(rho.values(), stats::rho_to_counts(rho, cfg.N));
        }
    }
    result.samples = fvm_acc.n();
    result.negativity_events = stepper.stats().negativity_cells;

    const stats::TheoryReference theory = stats::TheoryReference::compute(grid, cfg.N);
    const stats::CompareTolerances tol{cfg.mean_rho_tol, cfg.var_rho_tol, cfg.poisson_tol};
    result.fvm = stats::compare(fvm_acc, theory, tol);
    write_report_csv(cfg.output_dir + "/report_fvm.csv", grid, fvm_acc, theory, result.fvm);
    write_snapshot_csv(cfg.output_dir + "/final_fvm.csv", rho, stats::rho_to_counts(rho, cfg.N));

    // optional particle chain with the same protocol
    if (cfg.particle_chain) {
        if (cfg.N % grid.cells() != 0) {
            throw ConfigError("particles.N: particle chain needs N divisible by I*J");
        }
        const int per_cell = static_cast<int>(cfg.N / grid.cells());
        particles::ParticleEnsemble ens =
            particles::sample_initial(grid, per_cell, NoiseStream(cfg.seed, kInit));
        const NoiseStream pnoise(cfg.seed, kParticleNoise);
        stats::RunningMoments part_acc(grid.cells());
        uint64_t pstep = 0;
        for (long long k = 0; k < cfg.equilibration_steps; ++k) {
            particles::em_step(ens, surface, potentials, dt, pnoise, pstep++);
        }
        std::vector<double> cnt_d(static_cast<size_t>(grid.cells()));
        for (long long k = 1; k <= cfg.steps; ++k) {
            particles::em_step(ens, surface, potentials, dt, pnoise, pstep++);
            if (k % cfg.sample_every == 0) {
                const std::vector<long long> counts = particles::bin_to_grid(ens, grid);
                for (size_t c = 0; c < cnt_d.size(); ++c) cnt_d[c] = double(counts[c]);
                part_acc.update(stats::counts_to_rho(counts, grid, cfg.N), cnt_d);
            }
        }
        result.particles = stats::compare(part_acc, theory, tol);
        write_report_csv(cfg.output_dir + "/report_particles.csv", grid, part_acc, theory,
                         *result.particles);
        const std::vector<long long> counts = particles::bin_to_grid(ens, grid);
        DensityField prho(grid);
        const std::vector<double> pr = stats::counts_to_rho(counts, grid, cfg.N);
        std::copy(pr.begin(), pr.end(), prho.values().begin());
        for (size_t c = 0; c < cnt_d.size(); ++c) cnt_d[c] = double(counts[c]);
        write_snapshot_csv(cfg.output_dir + "/final_particles.csv", prho, cnt_d);
    }

    result.passed = result.fvm.passed && (!result.particles || result.particles->passed);
    cfg.write_manifest(cfg.output_dir + "/manifest.cfg", timer.seconds());
    return result;
}

TransientResult run_transient(const ExperimentConfig& cfg) {
    Timer timer;
    const HeightSurface surface = cfg.make_surface();
    const MetricGrid grid(surface, cfg.I, cfg.J);
    const double dt = cfg.resolve_dt(grid);

    ensure_run_dir(cfg.output_dir);
    cfg.write_manifest(cfg.output_dir + "/manifest.cfg");

    TransientResult result;
    result.dt = dt;

    // snapshots land on the requested times: step = round(t/dt)
    std::set<long long> snap_steps;
    for (double t : cfg.snapshot_times) {
        const long long s = std::llround(t / dt);
        if (s >= 1 && s <= cfg.steps) snap_steps.insert(s);
    }

    DensityField rho = build_initial_condition(cfg, grid);
    result.mass_initial = rho.mass();
    write_snapshot_csv(cfg.output_dir + "/" + snapshot_name(0), rho,
                       stats::rho_to_counts(rho, cfg.N));

    const PotentialSpec potentials = PotentialSpec::sine_squared(cfg.v0);
    fvm::Stepper stepper(grid, potentials, cfg.N, NoiseStream(cfg.seed, kFvmNoise),
                         cfg.noise_enabled);

    auto field_peaks = [&](const DensityField& f, double& peak_rho, double& peak_count) {
        peak_rho = 0.0;
        peak_count = 0.0;
        for (int c = 0; c < grid.cells(); ++c) {
            peak_rho = std::max(peak_rho, f[c]);
            peak_count = std::max(peak_count,
                                  double(cfg.N) * f[c] * grid.cell(c).sqrt_det * grid.cell_area());
        }
    };

    for (long long k = 1; k <= cfg.steps; ++k) {
        stepper.step(rho, uint64_t(k - 1), dt);
        double pr, pc;
        field_peaks(rho, pr, pc);
        result.running_max_rho = std::max(result.running_max_rho, pr);
        result.running_max_count = std::max(result.running_max_count, pc);
        const bool timed = snap_steps.count(k) > 0;
        const bool periodic = cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0;
        if (timed) {
            result.times.push_back(double(k) * dt);
            result.peak_rho.push_back(pr);
            result.peak_count.push_back(pc);
        }
        if (timed || periodic || k == cfg.steps) {
            write_snapshot_csv(cfg.output_dir + "/" + snapshot_name(k), rho,
                               stats::rho_to_counts(rho, cfg.N));
        }
    }
    result.mass_final = rho.mass();
    result.negativity_events = stepper.stats().negativity_cells;

    std::ofstream peaks(cfg.output_dir + "/peaks.csv");
    peaks << "t,peak_rho,peak_count\n";
    for (size_t k = 0; k < result.times.size(); ++k) {
        peaks << result.times[k] << ',' << result.peak_rho[k] << ',' << result.peak_count[k]
              << '\n';
    }

    cfg.write_manifest(cfg.output_dir + "/manifest.cfg", timer.seconds());
    return result;
}

TransientResult run_potential(const ExperimentConfig& cfg) {
    // identical protocol; the potential enters only through cfg.v0
    return run_transient(cfg);
}

FdrCheckResult run_fdr_check(const ExperimentConfig& cfg) {
    Timer timer;
    const HeightSurface surface = cfg.make_surface();
    const MetricGrid grid(surface, cfg.I, cfg.J);
    const double dt = cfg.resolve_dt(grid);

    ensure_run_dir(cfg.output_dir);
    cfg.write_manifest(cfg.output_dir + "/manifest.cfg");

    FdrCheckResult result;
    result.dt = dt;

    if (grid.cells() <= 64 * 64) {
        const fvm::AssembledOperators ops = fvm::assemble_operators(grid);
        const fvm::FdrAlgebraResiduals res = fvm::fdr_algebra_residuals(ops, grid, cfg.N);
        result.assembled = true;
        result.asymmetry = res.asymmetry;
        result.factorization = res.factorization;
        result.lyapunov = res.lyapunov;
        result.algebra_passed = res.asymmetry <= cfg.fdr_algebra_tol &&
                                res.factorization <= cfg.fdr_algebra_tol &&
                                res.lyapunov <= cfg.fdr_algebra_tol;
    }

    // stationary statistics of the linearized chain
    const double rho_bar = 1.0 / grid.surface_area();
    DensityField z(grid);
    fvm::OuStepper stepper(grid, cfg.N, rho_bar, NoiseStream(cfg.seed, kFvmNoise));
    uint64_t step_index = 0;
    for (long long k = 0; k < cfg.equilibration_steps; ++k) stepper.step(z, step_index++, dt);

    const int cells = grid.cells();
    std::vector<double> mean(cells, 0.0), m2(cells, 0.0);

    // deterministically chosen distinct cell pairs for the zero-covariance check
    const NoiseStream pair_stream(cfg.seed, "fdr-pairs");
    std::vector<std::pair<int, int>> pairs;
    for (uint64_t k = 0; pairs.size() < static_cast<size_t>(cfg.fdr_pairs) && k < 10000; ++k) {
        Vec2 u = pair_stream.uniform_pair(k, 0);
        int a = std::min(int(u.x * cells), cells - 1);
        int b = std::min(int(u.y * cells), cells - 1);
        if (a != b) pairs.emplace_back(a, b);
    }
    std::vector<double> cmean_a(pairs.size(), 0.0), cmean_b(pairs.size(), 0.0),
        cm2_a(pairs.size(), 0.0), cm2_b(pairs.size(), 0.0), comoment(pairs.size(), 0.0);

    long long n = 0;
    for (long long k = 1; k <= cfg.steps; ++k) {
        stepper.step(z, step_index++, dt);
        if (k % cfg.sample_every != 0) continue;
        ++n;
        const double inv_n = 1.0 / double(n);
        for (int c = 0; c < cells; ++c) {
            const double d = z[c] - mean[c];
            mean[c] += d * inv_n;
            m2[c] += d * (z[c] - mean[c]);
        }
        for (size_t p = 0; p < pairs.size(); ++p) {
            const double a = z[pairs[p].first], b = z[pairs[p].second];
            const double da = a - cmean_a[p];
            cmean_a[p] += da * inv_n;
            cm2_a[p] += da * (a - cmean_a[p]);
            const double db = b - cmean_b[p];
            cmean_b[p] += db * inv_n;
            comoment[p] += da * (b - cmean_b[p]);
            cm2_b[p] += db * (b - cmean_b[p]);
        }
    }
    result.samples = n;
    if (n < 2) throw ConfigError("run.steps: too few samples for the statistical check");

    std::vector<double> var_rel(cells);
    const double base = rho_bar / (double(cfg.N) * grid.cell_area());
    for (int c = 0; c < cells; ++c) {
        const double theory = base / grid.cell(c).sqrt_det;
        var_rel[c] = std::abs(m2[c] / double(n - 1) - theory) / theory;
    }
    result.max_var_rel_err = *std::max_element(var_rel.begin(), var_rel.end());
    result.median_var_rel_err = stats::median(var_rel);
    result.variance_passed = result.max_var_rel_err <= cfg.fdr_var_tol;

    result.cov_pairs = static_cast<int>(pairs.size());
    for (size_t p = 0; p < pairs.size(); ++p) {
        const double cov = comoment[p] / double(n - 1);
        const double va = cm2_a[p] / double(n - 1), vb = cm2_b[p] / double(n - 1);
        const double se = std::sqrt((va * vb + cov * cov) / double(n - 1));
        const double zscore = std::abs(cov) / se;
        result.max_cov_z = std::max(result.max_cov_z, zscore);
        if (zscore > 3.0) ++result.cov_pairs_over_3;
    }
    // a few 3-sigma excursions among many pairs are expected; gate on gross ones
    const int allowed = std::max(1, (result.cov_pairs + 19) / 20);
    result.covariance_passed = result.cov_pairs_over_3 <= allowed && result.max_cov_z <= 4.5;

    result.passed = (!result.assembled || result.algebra_passed) && result.variance_passed &&
                    result.covariance_passed;

    std::ofstream rep(cfg.output_dir + "/fdr_report.txt");
    rep << "assembled = " << (result.assembled ? "true" : "false") << "\n";
    if (result.assembled) {
        rep << "max |L - L^T|    = " << result.asymmetry << "\n";
        rep << "max |L + K K^T|  = " << result.factorization << "\n";
        rep << "lyapunov residual = " << result.lyapunov << "\n";
    }
    rep << "samples = " << n << "\n";
    rep << "var rel err: max = " << result.max_var_rel_err
        << ", median = " << result.median_var_rel_err << "\n";
    rep << "cov pairs = " << result.cov_pairs << ", over 3 s.e. = " << result.cov_pairs_over_3
        << ", max |z| = " << result.max_cov_z << "\n";
    rep << "passed = " << (result.passed ? "true" : "false") << "\n";

    cfg.write_manifest(cfg.output_dir + "/manifest.cfg", timer.seconds());
    return result;
}

ParticlesResult run_particles(const ExperimentConfig& cfg) {
    Timer timer;
    const HeightSurface surface = cfg.make_surface();
    const MetricGrid grid(surface, cfg.I, cfg.J);
    const double dt = cfg.resolve_dt(grid);

    ensure_run_dir(cfg.output_dir);
    cfg.write_manifest(cfg.output_dir + "/manifest.cfg");

    if (cfg.N < 1) throw ConfigError("particles.N: need at least one particle");
    if (cfg.N % grid.cells() != 0) {
        throw ConfigError("particles.N: must be divisible by I*J (uniform per-cell placement)");
    }
    const int per_cell = static_cast<int>(cfg.N / grid.cells());

    const PotentialSpec potentials = PotentialSpec::sine_squared(cfg.v0);
    particles::ParticleEnsemble ens =
        particles::sample_initial(grid, per_cell, NoiseStream(cfg.seed, kInit));
    const NoiseStream noise(cfg.seed, kParticleNoise);

    stats::RunningMoments acc(grid.cells());
    std::vector<double> cnt_d(static_cast<size_t>(grid.cells()));
    uint64_t step_index = 0;
    for (long long k = 0; k < cfg.equilibration_steps; ++k) {
        particles::em_step(ens, surface, potentials, dt, noise, step_index++);
    }
    for (long long k = 1; k <= cfg.steps; ++k) {
        particles::em_step(ens, surface, potentials, dt, noise, step_index++);
        const bool sampled = k % cfg.sample_every == 0;
        if (sampled) {
            const std::vector<long long> counts = particles::bin_to_grid(ens, grid);
            for (size_t c = 0; c < cnt_d.size(); ++c) cnt_d[c] = double(counts[c]);
            acc.update(stats::counts_to_rho(counts, grid, cfg.N), cnt_d);
        }
        if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) {
            const std::vector<long long> counts = particles::bin_to_grid(ens, grid);
            DensityField prho(grid);
            const std::vector<double> pr = stats::counts_to_rho(counts, grid, cfg.N);
            std::copy(pr.begin(), pr.end(), prho.values().begin());
            for (size_t c = 0; c < cnt_d.size(); ++c) cnt_d[c] = double(counts[c]);
            write_snapshot_csv(cfg.output_dir + "/" + snapshot_name(k), prho, cnt_d);
        }
    }

    ParticlesResult result;
    result.dt = dt;
    result.samples = acc.n();
    const stats::TheoryReference theory = stats::TheoryReference::compute(grid, cfg.N);
    const stats::CompareTolerances tol{cfg.mean_rho_tol, cfg.var_rho_tol, cfg.poisson_tol};
    result.report = stats::compare(acc, theory, tol);
    result.passed = result.report.passed;
    write_report_csv(cfg.output_dir + "/report_particles.csv", grid, acc, theory, result.report);

    const std::vector<long long> counts = particles::bin_to_grid(ens, grid);
    DensityField prho(grid);
    const std::vector<double> pr = stats::counts_to_rho(counts, grid, cfg.N);
    std::copy(pr.begin(), pr.end(), prho.values().begin());
    for (size_t c = 0; c < cnt_d.size(); ++c) cnt_d[c] = double(counts[c]);
    write_snapshot_csv(cfg.output_dir + "/final_particles.csv", prho, cnt_d);

    cfg.write_manifest(cfg.output_dir + "/manifest.cfg", timer.seconds());
    return result;
}

DtEstimate run_estimate_dt(const ExperimentConfig& cfg) {
    const HeightSurface surface = cfg.make_surface();
    const MetricGrid grid(surface, cfg.I, cfg.J);
    DtEstimate est;
    est.lambda_max = fvm::spectral_radius(grid);
    est.dt_max = 2.0 / est.lambda_max;
    est.suggested_dt = cfg.dt ? *cfg.dt : *cfg.dt_fraction * est.dt_max;
    return est;
}

}  // namespace surfdk
