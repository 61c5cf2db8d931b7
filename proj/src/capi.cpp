#include "surfdk.h"

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "surfdk/config.hpp"
#include "surfdk/errors.hpp"
#include "surfdk/experiments.hpp"
#include "surfdk/fvm.hpp"
#include "surfdk/particles.hpp"
#include "surfdk/version.hpp"

namespace {

thread_local std::string g_last_error;

surfdk_status to_status(surfdk::ErrorCode code) {
    using surfdk::ErrorCode;
    switch (code) {
        case ErrorCode::invalid_argument: return SURFDK_ERR_INVALID_ARGUMENT;
        case ErrorCode::config: return SURFDK_ERR_CONFIG;
        case ErrorCode::dimension: return SURFDK_ERR_DIMENSION;
        case ErrorCode::size_guard: return SURFDK_ERR_SIZE_GUARD;
        case ErrorCode::blowup: return SURFDK_ERR_BLOWUP;
        case ErrorCode::no_convergence: return SURFDK_ERR_NO_CONVERGENCE;
        case ErrorCode::io: return SURFDK_ERR_IO;
        case ErrorCode::internal: return SURFDK_ERR_INTERNAL;
    }
    return SURFDK_ERR_INTERNAL;
}

template <typename Fn>
surfdk_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return SURFDK_OK;
    } catch (const surfdk::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SURFDK_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SURFDK_ERR_INTERNAL;
    }
}

surfdk_status invalid(const char* msg) {
    g_last_error = msg;
    return SURFDK_ERR_INVALID_ARGUMENT;
}

void fill_metric(const surfdk::MetricSample& m, surfdk_metric_sample* out) {
    out->p = m.p;
    out->q = m.q;
    out->s = m.s;
    out->sqrt_det = m.sqrt_det;
    out->g_inv[0] = m.g_inv.xx;
    out->g_inv[1] = m.g_inv.xy;
    out->g_inv[2] = m.g_inv.yy;
    out->g_inv_sqrt[0] = m.g_inv_sqrt.xx;
    out->g_inv_sqrt[1] = m.g_inv_sqrt.xy;
    out->g_inv_sqrt[2] = m.g_inv_sqrt.yy;
    out->drift[0] = m.drift.x;
    out->drift[1] = m.drift.y;
}

}  // namespace

struct surfdk_surface {
    surfdk::HeightSurface surface;
};

struct surfdk_grid {
    surfdk::MetricGrid grid;
};

struct surfdk_fvm_chain {
    surfdk_fvm_chain(const surfdk::MetricGrid& grid, long long n, uint64_t seed,
                     bool noise_enabled, double v0)
        : rho(grid),
          stepper(grid, surfdk::PotentialSpec::sine_squared(v0), n,
                  surfdk::NoiseStream(seed, "fvm-noise"), noise_enabled) {}

    surfdk::DensityField rho;
    surfdk::fvm::Stepper stepper;
    uint64_t step_index = 0;
};

struct surfdk_ensemble {
    surfdk::MetricGrid grid;
    surfdk::PotentialSpec potentials;
    surfdk::particles::ParticleEnsemble ensemble;
    surfdk::NoiseStream noise;
    uint64_t step_index = 0;
};

struct surfdk_config {
    std::string experiment;
    std::string path;
    std::vector<std::string> overrides;

    surfdk::ExperimentConfig resolve() const {
        return surfdk::ExperimentConfig::load(path, overrides,
                                              surfdk::experiment_from_name(experiment));
    }
};

extern "C" {

const char* surfdk_version(void) { return SURFDK_VERSION_STRING; }

const char* surfdk_status_name(surfdk_status status) {
    switch (status) {
        case SURFDK_OK: return "ok";
        case SURFDK_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SURFDK_ERR_CONFIG: return "config error";
        case SURFDK_ERR_DIMENSION: return "dimension error";
        case SURFDK_ERR_SIZE_GUARD: return "size guard exceeded";
        case SURFDK_ERR_BLOWUP: return "integrator blowup";
        case SURFDK_ERR_NO_CONVERGENCE: return "no convergence";
        case SURFDK_ERR_IO: return "io error";
        case SURFDK_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* surfdk_last_error(void) { return g_last_error.c_str(); }

surfdk_status surfdk_surface_create(const char* kind, double amplitude, surfdk_surface** out) {
    if (!kind || !out) return invalid("surfdk_surface_create: null argument");
    return guarded([&] {
        surfdk::HeightSurface s = [&] {
            if (std::strcmp(kind, "sinusoidal_a") == 0)
                return surfdk::HeightSurface::sinusoidal(amplitude);
            if (std::strcmp(kind, "four_peak_b") == 0)
                return surfdk::HeightSurface::four_peak(amplitude);
            throw surfdk::ConfigError(std::string("unknown surface kind '") + kind + "'");
        }();
        *out = new surfdk_surface{std::move(s)};
    });
}

void surfdk_surface_destroy(surfdk_surface* surface) { delete surface; }

surfdk_status surfdk_surface_metric_at(const surfdk_surface* surface, double x, double y,
                                       surfdk_metric_sample* out) {
    if (!surface || !out) return invalid("surfdk_surface_metric_at: null argument");
    return guarded([&] { fill_metric(surface->surface.metric_at({x, y}), out); });
}

surfdk_status surfdk_grid_create(const surfdk_surface* surface, int cells_x, int cells_y,
                                 surfdk_grid** out) {
    if (!surface || !out) return invalid("surfdk_grid_create: null argument");
    return guarded([&] {
        *out = new surfdk_grid{surfdk::MetricGrid(surface->surface, cells_x, cells_y)};
    });
}

void surfdk_grid_destroy(surfdk_grid* grid) { delete grid; }

surfdk_status surfdk_grid_surface_area(const surfdk_grid* grid, double* out) {
    if (!grid || !out) return invalid("surfdk_grid_surface_area: null argument");
    *out = grid->grid.surface_area();
    return SURFDK_OK;
}

surfdk_status surfdk_grid_cell_metric(const surfdk_grid* grid, int i, int j,
                                      surfdk_metric_sample* out) {
    if (!grid || !out) return invalid("surfdk_grid_cell_metric: null argument");
    if (i < 0 || i >= grid->grid.I() || j < 0 || j >= grid->grid.J()) {
        return invalid("surfdk_grid_cell_metric: cell index out of range");
    }
    fill_metric(grid->grid.cell(i, j), out);
    return SURFDK_OK;
}

surfdk_status surfdk_grid_max_dt(const surfdk_grid* grid, double* out) {
    if (!grid || !out) return invalid("surfdk_grid_max_dt: null argument");
    return guarded([&] { *out = surfdk::fvm::estimate_max_dt(grid->grid); });
}

surfdk_status surfdk_fvm_create(const surfdk_grid* grid, long long n_particles, uint64_t seed,
                                int noise_enabled, double v0, surfdk_fvm_chain** out) {
    if (!grid || !out) return invalid("surfdk_fvm_create: null argument");
    return guarded([&] {
        auto* chain =
            new surfdk_fvm_chain(grid->grid, n_particles, seed, noise_enabled != 0, v0);
        // start from the uniform steady state
        const double v = 1.0 / grid->grid.surface_area();
        std::fill(chain->rho.values().begin(), chain->rho.values().end(), v);
        *out = chain;
    });
}

void surfdk_fvm_destroy(surfdk_fvm_chain* chain) { delete chain; }

surfdk_status surfdk_fvm_set_density(surfdk_fvm_chain* chain, const double* rho, size_t len) {
    if (!chain || !rho) return invalid("surfdk_fvm_set_density: null argument");
    if (len != chain->rho.values().size()) {
        return invalid("surfdk_fvm_set_density: length does not match the grid");
    }
    std::copy(rho, rho + len, chain->rho.values().begin());
    return SURFDK_OK;
}

surfdk_status surfdk_fvm_get_density(const surfdk_fvm_chain* chain, double* rho, size_t len) {
    if (!chain || !rho) return invalid("surfdk_fvm_get_density: null argument");
    if (len != chain->rho.values().size()) {
        return invalid("surfdk_fvm_get_density: length does not match the grid");
    }
    std::copy(chain->rho.values().begin(), chain->rho.values().end(), rho);
    return SURFDK_OK;
}

surfdk_status surfdk_fvm_step(surfdk_fvm_chain* chain, double dt, long long steps) {
    if (!chain) return invalid("surfdk_fvm_step: null argument");
    return guarded([&] {
        for (long long k = 0; k < steps; ++k) chain->stepper.step(chain->rho, chain->step_index++, dt);
    });
}

surfdk_status surfdk_fvm_mass(const surfdk_fvm_chain* chain, double* out) {
    if (!chain || !out) return invalid("surfdk_fvm_mass: null argument");
    *out = chain->rho.mass();
    return SURFDK_OK;
}

surfdk_status surfdk_fvm_negativity_events(const surfdk_fvm_chain* chain, long long* out) {
    if (!chain || !out) return invalid("surfdk_fvm_negativity_events: null argument");
    *out = chain->stepper.stats().negativity_cells;
    return SURFDK_OK;
}

surfdk_status surfdk_ensemble_create(const surfdk_grid* grid, int per_cell, uint64_t seed,
                                     double v0, surfdk_ensemble** out) {
    if (!grid || !out) return invalid("surfdk_ensemble_create: null argument");
    return guarded([&] {
        auto* e = new surfdk_ensemble{
            grid->grid,
            surfdk::PotentialSpec::sine_squared(v0),
            surfdk::particles::sample_initial(grid->grid, per_cell,
                                              surfdk::NoiseStream(seed, "init")),
            surfdk::NoiseStream(seed, "particle-noise")};
        *out = e;
    });
}

void surfdk_ensemble_destroy(surfdk_ensemble* ensemble) { delete ensemble; }

surfdk_status surfdk_ensemble_size(const surfdk_ensemble* ensemble, long long* out) {
    if (!ensemble || !out) return invalid("surfdk_ensemble_size: null argument");
    *out = ensemble->ensemble.size();
    return SURFDK_OK;
}

surfdk_status surfdk_ensemble_step(surfdk_ensemble* ensemble, double dt, long long steps) {
    if (!ensemble) return invalid("surfdk_ensemble_step: null argument");
    return guarded([&] {
        for (long long k = 0; k < steps; ++k) {
            surfdk::particles::em_step(ensemble->ensemble, ensemble->grid.surface(),
                                       ensemble->potentials, dt, ensemble->noise,
                                       ensemble->step_index++);
        }
    });
}

surfdk_status surfdk_ensemble_positions(const surfdk_ensemble* ensemble, double* xy, size_t len) {
    if (!ensemble || !xy) return invalid("surfdk_ensemble_positions: null argument");
    const auto& pos = ensemble->ensemble.positions;
    if (len != 2 * pos.size()) return invalid("surfdk_ensemble_positions: length mismatch");
    for (size_t p = 0; p < pos.size(); ++p) {
        xy[2 * p] = pos[p].x;
        xy[2 * p + 1] = pos[p].y;
    }
    return SURFDK_OK;
}

surfdk_status surfdk_ensemble_bin(const surfdk_ensemble* ensemble, long long* counts,
                                  size_t len) {
    if (!ensemble || !counts) return invalid("surfdk_ensemble_bin: null argument");
    if (len != static_cast<size_t>(ensemble->grid.cells())) {
        return invalid("surfdk_ensemble_bin: length does not match the grid");
    }
    return guarded([&] {
        const std::vector<long long> c =
            surfdk::particles::bin_to_grid(ensemble->ensemble, ensemble->grid);
        std::copy(c.begin(), c.end(), counts);
    });
}

surfdk_status surfdk_config_create(const char* experiment, surfdk_config** out) {
    if (!experiment || !out) return invalid("surfdk_config_create: null argument");
    return guarded([&] {
        surfdk::experiment_from_name(experiment);  // validates the name
        auto* cfg = new surfdk_config{experiment, "", {}};
        cfg->resolve();
        *out = cfg;
    });
}

surfdk_status surfdk_config_load(const char* experiment, const char* path, surfdk_config** out) {
    if (!experiment || !path || !out) return invalid("surfdk_config_load: null argument");
    return guarded([&] {
        auto* cfg = new surfdk_config{experiment, path, {}};
        try {
            cfg->resolve();
        } catch (...) {
            delete cfg;
            throw;
        }
        *out = cfg;
    });
}

surfdk_status surfdk_config_set(surfdk_config* config, const char* key, const char* value) {
    if (!config || !key || !value) return invalid("surfdk_config_set: null argument");
    return guarded([&] {
        config->overrides.push_back(std::string(key) + " = " + value);
        try {
            config->resolve();
        } catch (...) {
            config->overrides.pop_back();
            throw;
        }
    });
}

void surfdk_config_destroy(surfdk_config* config) { delete config; }

surfdk_status surfdk_run_equilibrium(const surfdk_config* config,
                                     surfdk_equilibrium_result* out) {
    if (!config || !out) return invalid("surfdk_run_equilibrium: null argument");
    return guarded([&] {
        const surfdk::EquilibriumResult r = surfdk::run_equilibrium(config->resolve());
        *out = {};
        out->samples = r.samples;
        out->dt = r.dt;
        out->negativity_events = r.negativity_events;
        out->fvm_median_mean_rho_err = r.fvm.median_mean_rho;
        out->fvm_max_mean_rho_err = r.fvm.max_mean_rho;
        out->fvm_median_var_rho_err = r.fvm.median_var_rho;
        out->fvm_max_var_rho_err = r.fvm.max_var_rho;
        out->fvm_median_poisson_dev = r.fvm.median_poisson;
        out->fvm_max_poisson_dev = r.fvm.max_poisson;
        out->has_particle_chain = r.particles ? 1 : 0;
        if (r.particles) {
            out->part_median_mean_rho_err = r.particles->median_mean_rho;
            out->part_max_mean_rho_err = r.particles->max_mean_rho;
            out->part_median_var_rho_err = r.particles->median_var_rho;
            out->part_max_var_rho_err = r.particles->max_var_rho;
            out->part_median_poisson_dev = r.particles->median_poisson;
            out->part_max_poisson_dev = r.particles->max_poisson;
        }
        out->passed = r.passed ? 1 : 0;
    });
}

namespace {

void fill_transient(const surfdk::TransientResult& r, surfdk_transient_result* out) {
    *out = {};
    out->n_snapshots = static_cast<int>(std::min<size_t>(r.times.size(), 16));
    for (int k = 0; k < out->n_snapshots; ++k) {
        out->times[k] = r.times[k];
        out->peak_rho[k] = r.peak_rho[k];
        out->peak_count[k] = r.peak_count[k];
    }
    out->running_max_rho = r.running_max_rho;
    out->running_max_count = r.running_max_count;
    out->mass_initial = r.mass_initial;
    out->mass_final = r.mass_final;
    out->dt = r.dt;
    out->negativity_events = r.negativity_events;
}

}  // namespace

surfdk_status surfdk_run_transient(const surfdk_config* config, surfdk_transient_result* out) {
    if (!config || !out) return invalid("surfdk_run_transient: null argument");
    return guarded([&] { fill_transient(surfdk::run_transient(config->resolve()), out); });
}

surfdk_status surfdk_run_potential(const surfdk_config* config, surfdk_transient_result* out) {
    if (!config || !out) return invalid("surfdk_run_potential: null argument");
    return guarded([&] { fill_transient(surfdk::run_potential(config->resolve()), out); });
}

surfdk_status surfdk_run_fdr_check(const surfdk_config* config, surfdk_fdr_result* out) {
    if (!config || !out) return invalid("surfdk_run_fdr_check: null argument");
    return guarded([&] {
        const surfdk::FdrCheckResult r = surfdk::run_fdr_check(config->resolve());
        *out = {};
        out->assembled = r.assembled ? 1 : 0;
        out->asymmetry = r.asymmetry;
        out->factorization = r.factorization;
        out->lyapunov = r.lyapunov;
        out->max_var_rel_err = r.max_var_rel_err;
        out->median_var_rel_err = r.median_var_rel_err;
        out->max_cov_z = r.max_cov_z;
        out->cov_pairs = r.cov_pairs;
        out->cov_pairs_over_3 = r.cov_pairs_over_3;
        out->samples = r.samples;
        out->dt = r.dt;
        out->passed = r.passed ? 1 : 0;
    });
}

surfdk_status surfdk_run_particles(const surfdk_config* config, surfdk_particles_result* out) {
    if (!config || !out) return invalid("surfdk_run_particles: null argument");
    return guarded([&] {
        const surfdk::ParticlesResult r = surfdk::run_particles(config->resolve());
        *out = {};
        out->samples = r.samples;
        out->dt = r.dt;
        out->median_mean_rho_err = r.report.median_mean_rho;
        out->max_mean_rho_err = r.report.max_mean_rho;
        out->median_var_rho_err = r.report.median_var_rho;
        out->max_var_rho_err = r.report.max_var_rho;
        out->median_poisson_dev = r.report.median_poisson;
        out->max_poisson_dev = r.report.max_poisson;
        out->passed = r.passed ? 1 : 0;
    });
}

surfdk_status surfdk_run_estimate_dt(const surfdk_config* config, surfdk_dt_estimate* out) {
    if (!config || !out) return invalid("surfdk_run_estimate_dt: null argument");
    return guarded([&] {
        const surfdk::DtEstimate r = surfdk::run_estimate_dt(config->resolve());
        out->lambda_max = r.lambda_max;
        out->dt_max = r.dt_max;
        out->suggested_dt = r.suggested_dt;
    });
}

}  // extern "C"
