// Command-line front end for the surfdk shared library. Talks to the solver
// exclusively through the C API in surfdk.h.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "surfdk.h"

namespace {

// config keys exposed as --key value flags on every subcommand
const std::vector<std::string> kKeys = {
    "surface.kind",       "surface.amplitude",
    "grid.I",             "grid.J",
    "particles.N",        "particles.per_cell",
    "seed",               "potential.v0",
    "run.dt",             "run.dt_fraction",
    "run.steps",          "run.equilibration_steps",
    "run.particle_chain", "noise.enabled",
    "output.sample_every", "output.snapshot_every",
    "output.snapshot_times", "output.dir",
    "ic.kind",            "ic.center_x",
    "ic.center_y",        "ic.radius",
    "ic.value",           "ic.normalization",
    "ic.path",            "fdr.algebra_tol",
    "fdr.var_tol",        "fdr.pairs",
    "compare.mean_rho_tol", "compare.var_rho_tol",
    "compare.poisson_tol",
};

struct SubcommandState {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> values;  // in flag order
    std::vector<std::string> sets;
};

void add_common_options(CLI::App* cmd, SubcommandState& state) {
    cmd->add_option("-c,--config", state.config_path, "Config file (flat key = value format)");
    cmd->add_option_function<std::vector<std::string>>(
           "--set",
           [&state](const std::vector<std::string>& kvs) {
               for (const auto& kv : kvs) state.sets.push_back(kv);
           },
           "Override a config key (key=value); repeatable")
        ->take_all();
    for (const std::string& key : kKeys) {
        cmd->add_option_function<std::string>(
            "--" + key,
            [&state, key](const std::string& v) { state.values.emplace_back(key, v); },
            "Config key " + key);
    }
}

int fail(const char* what, surfdk_status status) {
    std::fprintf(stderr, "error: %s: %s (%s)\n", what, surfdk_last_error(),
                 surfdk_status_name(status));
    return status == SURFDK_ERR_CONFIG || status == SURFDK_ERR_INVALID_ARGUMENT ? 2 : 3;
}

surfdk_status build_config(const char* experiment, const SubcommandState& state,
                           surfdk_config** out) {
    surfdk_status st = state.config_path.empty()
                           ? surfdk_config_create(experiment, out)
                           : surfdk_config_load(experiment, state.config_path.c_str(), out);
    if (st != SURFDK_OK) return st;
    for (const auto& [key, value] : state.values) {
        st = surfdk_config_set(*out, key.c_str(), value.c_str());
        if (st != SURFDK_OK) return st;
    }
    for (const std::string& kv : state.sets) {
        const size_t eq = kv.find('=');
        const std::string key = eq == std::string::npos ? kv : kv.substr(0, eq);
        const std::string value = eq == std::string::npos ? "" : kv.substr(eq + 1);
        st = surfdk_config_set(*out, key.c_str(), value.c_str());
        if (st != SURFDK_OK) return st;
    }
    return SURFDK_OK;
}

void print_stats_block(const char* label, double med_mean, double max_mean, double med_var,
                       double max_var, double med_poisson, double max_poisson) {
    std::printf("%s\n", label);
    std::printf("  rel err mean rho : median %.4f  max %.4f\n", med_mean, max_mean);
    std::printf("  rel err var rho  : median %.4f  max %.4f\n", med_var, max_var);
    std::printf("  |Var/mean N - 1| : median %.4f  max %.4f\n", med_poisson, max_poisson);
}

void print_transient(const surfdk_transient_result& r) {
    std::printf("dt = %.6g, mass %.9g -> %.9g, negativity events = %lld\n", r.dt, r.mass_initial,
                r.mass_final, r.negativity_events);
    std::printf("%-10s %-12s %-12s\n", "t", "peak rho", "peak N_ij");
    for (int k = 0; k < r.n_snapshots; ++k) {
        std::printf("%-10.4g %-12.5g %-12.5g\n", r.times[k], r.peak_rho[k], r.peak_count[k]);
    }
    std::printf("running max: rho %.5g, N_ij %.5g\n", r.running_max_rho, r.running_max_count);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surfdk: particle and fluctuating-hydrodynamics simulation on curved surfaces"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(surfdk_version()));

    SubcommandState st_equilibrium, st_transient, st_potential, st_fdr, st_particles, st_dt;

    CLI::App* c_eq = app.add_subcommand("equilibrium", "Equilibrium statistics of the solver");
    add_common_options(c_eq, st_equilibrium);
    CLI::App* c_tr = app.add_subcommand("transient", "Transient spreading from a disk");
    add_common_options(c_tr, st_transient);
    CLI::App* c_po = app.add_subcommand("potential", "Transient run with external potential");
    add_common_options(c_po, st_potential);
    CLI::App* c_fd = app.add_subcommand("fdr-check", "Fluctuation-dissipation verification");
    add_common_options(c_fd, st_fdr);
    CLI::App* c_pa = app.add_subcommand("particles", "Pure particle run with statistics");
    add_common_options(c_pa, st_particles);
    CLI::App* c_es = app.add_subcommand("estimate-dt", "Explicit-Euler stability bound");
    add_common_options(c_es, st_dt);

    CLI11_PARSE(app, argc, argv);

    surfdk_config* cfg = nullptr;
    surfdk_status st = SURFDK_OK;
    int rc = 0;

    if (c_eq->parsed()) {
        st = build_config("equilibrium", st_equilibrium, &cfg);
        if (st != SURFDK_OK) return fail("equilibrium", st);
        surfdk_equilibrium_result r;
        st = surfdk_run_equilibrium(cfg, &r);
        if (st != SURFDK_OK) rc = fail("equilibrium", st);
        else {
            std::printf("samples = %lld, dt = %.6g, negativity events = %lld\n", r.samples, r.dt,
                        r.negativity_events);
            print_stats_block("finite-volume chain:", r.fvm_median_mean_rho_err,
                              r.fvm_max_mean_rho_err, r.fvm_median_var_rho_err,
                              r.fvm_max_var_rho_err, r.fvm_median_poisson_dev,
                              r.fvm_max_poisson_dev);
            if (r.has_particle_chain) {
                print_stats_block("particle chain:", r.part_median_mean_rho_err,
                                  r.part_max_mean_rho_err, r.part_median_var_rho_err,
                                  r.part_max_var_rho_err, r.part_median_poisson_dev,
                                  r.part_max_poisson_dev);
            }
            std::printf("%s\n", r.passed ? "PASS" : "FAIL");
            rc = r.passed ? 0 : 1;
        }
    } else if (c_tr->parsed() || c_po->parsed()) {
        const bool pot = c_po->parsed();
        st = build_config(pot ? "potential" : "transient", pot ? st_potential : st_transient,
                          &cfg);
        if (st != SURFDK_OK) return fail("transient", st);
        surfdk_transient_result r;
        st = pot ? surfdk_run_potential(cfg, &r) : surfdk_run_transient(cfg, &r);
        if (st != SURFDK_OK) rc = fail("transient", st);
        else print_transient(r);
    } else if (c_fd->parsed()) {
        st = build_config("fdr-check", st_fdr, &cfg);
        if (st != SURFDK_OK) return fail("fdr-check", st);
        surfdk_fdr_result r;
        st = surfdk_run_fdr_check(cfg, &r);
        if (st != SURFDK_OK) rc = fail("fdr-check", st);
        else {
            if (r.assembled) {
                std::printf("algebra: |L-L^T| = %.3g, |L+KK^T| = %.3g, lyapunov = %.3g\n",
                            r.asymmetry, r.factorization, r.lyapunov);
            }
            std::printf("variance: max rel err %.4f (median %.4f) over %lld samples\n",
                        r.max_var_rel_err, r.median_var_rel_err, r.samples);
            std::printf("covariance: %d pairs, %d over 3 s.e., max |z| = %.2f\n", r.cov_pairs,
                        r.cov_pairs_over_3, r.max_cov_z);
            std::printf("%s\n", r.passed ? "PASS" : "FAIL");
            rc = r.passed ? 0 : 1;
        }
    } else if (c_pa->parsed()) {
        st = build_config("particles", st_particles, &cfg);
        if (st != SURFDK_OK) return fail("particles", st);
        surfdk_particles_result r;
        st = surfdk_run_particles(cfg, &r);
        if (st != SURFDK_OK) rc = fail("particles", st);
        else {
            std::printf("samples = %lld, dt = %.6g\n", r.samples, r.dt);
            print_stats_block("particle chain:", r.median_mean_rho_err, r.max_mean_rho_err,
                              r.median_var_rho_err, r.max_var_rho_err, r.median_poisson_dev,
                              r.max_poisson_dev);
            std::printf("%s\n", r.passed ? "PASS" : "FAIL");
            rc = r.passed ? 0 : 1;
        }
    } else if (c_es->parsed()) {
        st = build_config("estimate-dt", st_dt, &cfg);
        if (st != SURFDK_OK) return fail("estimate-dt", st);
        surfdk_dt_estimate r;
        st = surfdk_run_estimate_dt(cfg, &r);
        if (st != SURFDK_OK) rc = fail("estimate-dt", st);
        else {
            std::printf("lambda_max = %.8g\n", r.lambda_max);
            std::printf("dt_max = %.8g\n", r.dt_max);
            std::printf("suggested dt = %.8g\n", r.suggested_dt);
        }
    }

    surfdk_config_destroy(cfg);
    return rc;
}
