#include "surfdk/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "surfdk/errors.hpp"
#include "surfdk/fvm.hpp"
#include "surfdk/version.hpp"

namespace surfdk {

namespace {

const std::vector<std::pair<Experiment, const char*>> kExperimentNames = {
    {Experiment::equilibrium, "equilibrium"}, {Experiment::transient, "transient"},
    {Experiment::potential, "potential"},     {Experiment::fdr_check, "fdr-check"},
    {Experiment::particles, "particles"},     {Experiment::estimate_dt, "estimate-dt"},
};

// Every key the flat config format accepts.
const std::vector<std::string> kKnownKeys = {
    "experiment",
    "surface.kind",
    "surface.amplitude",
    "grid.I",
    "grid.J",
    "particles.N",
    "particles.per_cell",
    "particles.seed",
    "seed",
    "potential.v0",
    "run.dt",
    "run.dt_fraction",
    "run.steps",
    "run.equilibration_steps",
    "run.particle_chain",
    "noise.enabled",
    "output.sample_every",
    "output.snapshot_every",
    "output.snapshot_times",
    "output.dir",
    "ic.kind",
    "ic.center_x",
    "ic.center_y",
    "ic.radius",
    "ic.value",
    "ic.normalization",
    "ic.path",
    "fdr.algebra_tol",
    "fdr.var_tol",
    "fdr.pairs",
    "compare.mean_rho_tol",
    "compare.var_rho_tol",
    "compare.poisson_tol",
};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

using KeyValues = std::map<std::string, std::string>;

void insert_pair(KeyValues& kv, const std::string& raw, const std::string& where) {
    size_t eq = raw.find('=');
    if (eq == std::string::npos) {
        throw ConfigError(where + ": expected key = value, got '" + raw + "'");
    }
    std::string key = trim(raw.substr(0, eq));
    std::string value = trim(raw.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key in '" + raw + "'");
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
        throw ConfigError(where + ": unknown key '" + key + "'");
    }
    kv[key] = value;  // later assignments win
}

KeyValues parse_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        insert_pair(kv, line, "line " + std::to_string(lineno));
    }
    return kv;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value);

template <>
double parse_number<double>(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

template <>
long long parse_number<long long>(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct Raw {
    KeyValues kv;

    bool has(const std::string& k) const { return kv.count(k) > 0; }
    std::string str(const std::string& k) const { return kv.at(k); }

    void take_double(const std::string& k, double& out) const {
        if (has(k)) out = parse_number<double>(k, kv.at(k));
    }
    void take_ll(const std::string& k, long long& out) const {
        if (has(k)) out = parse_number<long long>(k, kv.at(k));
    }
    void take_int(const std::string& k, int& out) const {
        if (has(k)) out = static_cast<int>(parse_number<long long>(k, kv.at(k)));
    }
    void take_bool(const std::string& k, bool& out) const {
        if (has(k)) out = parse_bool(k, kv.at(k));
    }
};

}  // namespace

const char* experiment_name(Experiment e) {
    for (const auto& [ex, name] : kExperimentNames)
        if (ex == e) return name;
    return "?";
}

Experiment experiment_from_name(const std::string& name) {
    for (const auto& [ex, n] : kExperimentNames)
        if (name == n) return ex;
    throw ConfigError("experiment: unknown value '" + name + "'");
}

ExperimentConfig ExperimentConfig::load(const std::string& path,
                                        const std::vector<std::string>& overrides,
                                        std::optional<Experiment> expected) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    return parse(text, overrides, expected);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text,
                                         const std::vector<std::string>& overrides,
                                         std::optional<Experiment> expected) {
    Raw raw{parse_text(text)};
    for (const std::string& o : overrides) insert_pair(raw.kv, o, "override");

    ExperimentConfig cfg;

    if (raw.has("experiment")) {
        cfg.experiment = experiment_from_name(raw.str("experiment"));
        if (expected && cfg.experiment != *expected) {
            throw ConfigError("experiment: config says '" + raw.str("experiment") +
                              "' but the subcommand is '" + experiment_name(*expected) + "'");
        }
    } else if (expected) {
        cfg.experiment = *expected;
    } else {
        throw ConfigError("experiment: missing required key");
    }

    // experiment defaults; explicit keys override below
    switch (cfg.experiment) {
        case Experiment::equilibrium:
        case Experiment::estimate_dt:
            cfg.surface_kind = SurfaceKind::sinusoidal_a;
            cfg.amplitude = 3.0;
            cfg.I = cfg.J = 32;
            cfg.N = 10240;
            cfg.dt_fraction = 1.5625e-2;
            cfg.steps = 1000000;
            cfg.equilibration_steps = 100000;
            cfg.sample_every = 10;
            cfg.ic_kind = IcKind::uniform_nu;
            cfg.output_dir = "runs/equilibrium";
            break;
        case Experiment::transient:
        case Experiment::potential:
            cfg.surface_kind = SurfaceKind::four_peak_b;
            cfg.amplitude = 4.0;
            cfg.I = cfg.J = 64;
            cfg.N = 100000;
            // 1.5625e-2 of the flat-grid explicit-Euler bound h^2/4; 50000
            // steps then end at t = 1.88.
            cfg.dt = 3.7649552921636028e-05;
            cfg.steps = 50000;
            cfg.equilibration_steps = 0;
            cfg.sample_every = 10;
            cfg.ic_kind = IcKind::disk;
            cfg.ic_center = {3.14159265358979312, 3.14159265358979312};
            cfg.ic_radius = 0.62831853071795862;  // 0.2 pi
            cfg.snapshot_times = {0.47, 0.94, 1.41, 1.88};
            cfg.v0 = (cfg.experiment == Experiment::potential) ? 5.0 : 0.0;
            cfg.output_dir = (cfg.experiment == Experiment::potential) ? "runs/potential"
                                                                       : "runs/transient";
            break;
        case Experiment::fdr_check:
            cfg.surface_kind = SurfaceKind::sinusoidal_a;
            cfg.amplitude = 0.0;  // flat
            cfg.I = cfg.J = 16;
            cfg.N = 2560;
            cfg.dt_fraction = 1.5625e-2;
            cfg.steps = 3000000;
            cfg.equilibration_steps = 20000;
            cfg.sample_every = 100;
            cfg.output_dir = "runs/fdr-check";
            break;
        case Experiment::particles:
            cfg.surface_kind = SurfaceKind::sinusoidal_a;
            cfg.amplitude = 3.0;
            cfg.I = cfg.J = 16;
            cfg.per_cell = 10;
            cfg.N = 0;  // resolved from per_cell below
            cfg.dt_fraction = 1.5625e-2;
            cfg.steps = 200000;
            cfg.equilibration_steps = 50000;
            cfg.sample_every = 10;
            cfg.output_dir = "runs/particles";
            break;
    }

    if (raw.has("surface.kind")) {
        const std::string k = raw.str("surface.kind");
        if (k == "sinusoidal_a") cfg.surface_kind = SurfaceKind::sinusoidal_a;
        else if (k == "four_peak_b") cfg.surface_kind = SurfaceKind::four_peak_b;
        else throw ConfigError("surface.kind: expected sinusoidal_a or four_peak_b, got '" + k + "'");
    }
    raw.take_double("surface.amplitude", cfg.amplitude);
    raw.take_int("grid.I", cfg.I);
    raw.take_int("grid.J", cfg.J);

    if (raw.has("particles.N") && raw.has("particles.per_cell")) {
        throw ConfigError("particles.N and particles.per_cell are mutually exclusive");
    }
    if (raw.has("particles.per_cell")) {
        int pc = 0;
        raw.take_int("particles.per_cell", pc);
        if (pc < 0) throw ConfigError("particles.per_cell: must be >= 0");
        cfg.per_cell = pc;
        cfg.N = 0;
    } else if (raw.has("particles.N")) {
        raw.take_ll("particles.N", cfg.N);
        cfg.per_cell.reset();
    }

    if (raw.has("seed") && raw.has("particles.seed")) {
        throw ConfigError("seed and particles.seed are aliases; set only one");
    }
    if (raw.has("seed")) cfg.seed = uint64_t(parse_number<long long>("seed", raw.str("seed")));
    if (raw.has("particles.seed")) {
        cfg.seed = uint64_t(parse_number<long long>("particles.seed", raw.str("particles.seed")));
    }

    raw.take_double("potential.v0", cfg.v0);

    if (raw.has("run.dt") && raw.has("run.dt_fraction")) {
        throw ConfigError("run.dt and run.dt_fraction are mutually exclusive");
    }
    if (raw.has("run.dt")) {
        cfg.dt = parse_number<double>("run.dt", raw.str("run.dt"));
        cfg.dt_fraction.reset();
    } else if (raw.has("run.dt_fraction")) {
        cfg.dt_fraction = parse_number<double>("run.dt_fraction", raw.str("run.dt_fraction"));
        cfg.dt.reset();
    }

    raw.take_ll("run.steps", cfg.steps);
    raw.take_ll("run.equilibration_steps", cfg.equilibration_steps);
    raw.take_bool("run.particle_chain", cfg.particle_chain);
    raw.take_bool("noise.enabled", cfg.noise_enabled);
    raw.take_ll("output.sample_every", cfg.sample_every);
    raw.take_ll("output.snapshot_every", cfg.snapshot_every);
    if (raw.has("output.dir")) cfg.output_dir = raw.str("output.dir");
    if (raw.has("output.snapshot_times")) {
        cfg.snapshot_times.clear();
        std::istringstream ts(raw.str("output.snapshot_times"));
        std::string tok;
        while (std::getline(ts, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty())
                cfg.snapshot_times.push_back(parse_number<double>("output.snapshot_times", tok));
        }
    }

    if (raw.has("ic.kind")) {
        const std::string k = raw.str("ic.kind");
        if (k == "uniform_nu") cfg.ic_kind = IcKind::uniform_nu;
        else if (k == "disk") cfg.ic_kind = IcKind::disk;
        else if (k == "file") cfg.ic_kind = IcKind::file;
        else throw ConfigError("ic.kind: expected uniform_nu, disk or file, got '" + k + "'");
    }
    raw.take_double("ic.center_x", cfg.ic_center.x);
    raw.take_double("ic.center_y", cfg.ic_center.y);
    raw.take_double("ic.radius", cfg.ic_radius);
    if (raw.has("ic.value")) {
        const std::string v = raw.str("ic.value");
        if (v == "auto") cfg.ic_value.reset();
        else cfg.ic_value = parse_number<double>("ic.value", v);
    }
    if (raw.has("ic.normalization")) {
        const std::string k = raw.str("ic.normalization");
        if (k == "nu") cfg.ic_normalization = IcNormalization::nu;
        else if (k == "lebesgue") cfg.ic_normalization = IcNormalization::lebesgue;
        else throw ConfigError("ic.normalization: expected nu or lebesgue, got '" + k + "'");
    }
    if (raw.has("ic.path")) cfg.ic_path = raw.str("ic.path");

    raw.take_double("fdr.algebra_tol", cfg.fdr_algebra_tol);
    raw.take_double("fdr.var_tol", cfg.fdr_var_tol);
    raw.take_int("fdr.pairs", cfg.fdr_pairs);
    raw.take_double("compare.mean_rho_tol", cfg.mean_rho_tol);
    raw.take_double("compare.var_rho_tol", cfg.var_rho_tol);
    raw.take_double("compare.poisson_tol", cfg.poisson_tol);

    // validation
    if (cfg.I < 2) throw ConfigError("grid.I: must be >= 2");
    if (cfg.J < 2) throw ConfigError("grid.J: must be >= 2");
    if (cfg.per_cell) {
        cfg.N = static_cast<long long>(*cfg.per_cell) * cfg.I * cfg.J;
    }
    if (cfg.N < 1 && !(cfg.per_cell && *cfg.per_cell == 0)) {
        throw ConfigError("particles.N: must be >= 1");
    }
    if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("run.dt: must be > 0");
    if (cfg.dt_fraction && !(*cfg.dt_fraction > 0.0 && *cfg.dt_fraction <= 1.0)) {
        throw ConfigError("run.dt_fraction: must be in (0, 1]");
    }
    if (!cfg.dt && !cfg.dt_fraction) {
        throw ConfigError("run.dt: one of run.dt or run.dt_fraction is required");
    }
    if (cfg.steps < 0) throw ConfigError("run.steps: must be >= 0");
    if (cfg.equilibration_steps < 0) throw ConfigError("run.equilibration_steps: must be >= 0");
    if (cfg.sample_every < 1) throw ConfigError("output.sample_every: must be >= 1");
    if (cfg.snapshot_every < 0) throw ConfigError("output.snapshot_every: must be >= 0");
    if (cfg.ic_kind == IcKind::disk && !(cfg.ic_radius > 0.0)) {
        throw ConfigError("ic.radius: must be > 0 for a disk initial condition");
    }
    if (cfg.ic_kind == IcKind::file && cfg.ic_path.empty()) {
        throw ConfigError("ic.path: required for ic.kind = file");
    }
    if (cfg.fdr_pairs < 1) throw ConfigError("fdr.pairs: must be >= 1");

    return cfg;
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream os;
    os << "experiment = " << experiment_name(experiment) << "\n";
    os << "surface.kind = "
       << (surface_kind == SurfaceKind::sinusoidal_a ? "sinusoidal_a" : "four_peak_b") << "\n";
    os << "surface.amplitude = " << format_double(amplitude) << "\n";
    os << "grid.I = " << I << "\n";
    os << "grid.J = " << J << "\n";
    if (per_cell) os << "particles.per_cell = " << *per_cell << "\n";
    else os << "particles.N = " << N << "\n";
    os << "seed = " << seed << "\n";
    os << "potential.v0 = " << format_double(v0) << "\n";
    if (dt) os << "run.dt = " << format_double(*dt) << "\n";
    if (dt_fraction) os << "run.dt_fraction = " << format_double(*dt_fraction) << "\n";
    os << "run.steps = " << steps << "\n";
    os << "run.equilibration_steps = " << equilibration_steps << "\n";
    os << "run.particle_chain = " << (particle_chain ? "true" : "false") << "\n";
    os << "noise.enabled = " << (noise_enabled ? "true" : "false") << "\n";
    os << "output.sample_every = " << sample_every << "\n";
    os << "output.snapshot_every = " << snapshot_every << "\n";
    if (!snapshot_times.empty()) {
        os << "output.snapshot_times = ";
        for (size_t i = 0; i < snapshot_times.size(); ++i) {
            if (i) os << ",";
            os << format_double(snapshot_times[i]);
        }
        os << "\n";
    }
    os << "output.dir = " << output_dir << "\n";
    switch (ic_kind) {
        case IcKind::uniform_nu: os << "ic.kind = uniform_nu\n"; break;
        case IcKind::disk:
            os << "ic.kind = disk\n";
            os << "ic.center_x = " << format_double(ic_center.x) << "\n";
            os << "ic.center_y = " << format_double(ic_center.y) << "\n";
            os << "ic.radius = " << format_double(ic_radius) << "\n";
            os << "ic.value = " << (ic_value ? format_double(*ic_value) : std::string("auto"))
               << "\n";
            os << "ic.normalization = "
               << (ic_normalization == IcNormalization::nu ? "nu" : "lebesgue") << "\n";
            break;
        case IcKind::file:
            os << "ic.kind = file\n";
            os << "ic.path = " << ic_path << "\n";
            break;
    }
    os << "fdr.algebra_tol = " << format_double(fdr_algebra_tol) << "\n";
    os << "fdr.var_tol = " << format_double(fdr_var_tol) << "\n";
    os << "fdr.pairs = " << fdr_pairs << "\n";
    os << "compare.mean_rho_tol = " << format_double(mean_rho_tol) << "\n";
    os << "compare.var_rho_tol = " << format_double(var_rho_tol) << "\n";
    os << "compare.poisson_tol = " << format_double(poisson_tol) << "\n";
    return os.str();
}

void ExperimentConfig::write_manifest(const std::string& path, double wall_clock_seconds) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest '" + path + "'");
    out << "# surfdk " << SURFDK_VERSION_STRING << " run manifest\n";
    out << "# wall_clock_seconds = " << wall_clock_seconds << "\n";
    out << serialize();
    if (!out) throw IoError("failed writing manifest '" + path + "'");
}

HeightSurface ExperimentConfig::make_surface() const {
    switch (surface_kind) {
        case SurfaceKind::sinusoidal_a: return HeightSurface::sinusoidal(amplitude);
        case SurfaceKind::four_peak_b: return HeightSurface::four_peak(amplitude);
        default: throw ConfigError("surface.kind: custom surfaces are API-only");
    }
}

double ExperimentConfig::resolve_dt(const MetricGrid& grid) const {
    if (dt) return *dt;
    return *dt_fraction * fvm::estimate_max_dt(grid);
}

}  // namespace surfdk
