#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "surfdk/geometry.hpp"

namespace surfdk {

enum class Experiment {
    equilibrium,
    transient,
    potential,
    fdr_check,
    particles,
    estimate_dt,
};

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

enum class IcKind { uniform_nu, disk, file };
enum class IcNormalization { nu, lebesgue };

/// Fully resolved run configuration. Parsing goes through a flat
/// `key = value` text format; unknown keys, missing required keys and range
/// violations are reported with the offending key path.
struct ExperimentConfig {
    Experiment experiment = Experiment::equilibrium;

    SurfaceKind surface_kind = SurfaceKind::sinusoidal_a;
    double amplitude = 0.0;
    int I = 0, J = 0;

    long long N = 0;                  // resolved particle count
    std::optional<int> per_cell;      // set when the count was given per cell
    uint64_t seed = 1;

    double v0 = 0.0;

    std::optional<double> dt;          // explicit time step
    std::optional<double> dt_fraction; // fraction of estimate_max_dt
    long long steps = 0;
    long long equilibration_steps = 0;
    bool noise_enabled = true;
    bool particle_chain = false;

    long long sample_every = 10;
    long long snapshot_every = 0;  // 0: no periodic snapshots
    std::vector<double> snapshot_times;
    std::string output_dir;

    IcKind ic_kind = IcKind::uniform_nu;
    Vec2 ic_center{0.0, 0.0};
    double ic_radius = 0.0;
    std::optional<double> ic_value;  // absent: chosen to normalize
    IcNormalization ic_normalization = IcNormalization::nu;
    std::string ic_path;

    double fdr_algebra_tol = 1e-12;
    double fdr_var_tol = 0.05;
    int fdr_pairs = 64;

    double mean_rho_tol = 0.02;
    double var_rho_tol = 0.10;
    double poisson_tol = 0.10;

    bool operator==(const ExperimentConfig&) const = default;

    /// Parses a config file, applies `key=value` overrides, fills defaults
    /// for the experiment and validates. Either path or overrides may be
    /// empty. `expected` pins the experiment (CLI subcommand); a conflicting
    /// `experiment` key in the file is an error.
    static ExperimentConfig load(const std::string& path,
                                 const std::vector<std::string>& overrides = {},
                                 std::optional<Experiment> expected = std::nullopt);

    /// Same as load() but from in-memory text.
    static ExperimentConfig parse(const std::string& text,
                                  const std::vector<std::string>& overrides = {},
                                  std::optional<Experiment> expected = std::nullopt);

    /// Serializes the resolved config; parse(serialize()) == *this.
    std::string serialize() const;

    /// Writes serialize() plus comment metadata (version, seed, wall clock).
    void write_manifest(const std::string& path, double wall_clock_seconds = 0.0) const;

    HeightSurface make_surface() const;

    /// Explicit dt if set, otherwise dt_fraction * estimate_max_dt(grid).
    double resolve_dt(const MetricGrid& grid) const;
};

}  // namespace surfdk
