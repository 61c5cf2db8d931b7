#include "surfdk/snapshot.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "surfdk/errors.hpp"

namespace surfdk {

namespace {

void write_double(std::ostream& os, double v) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

}  // namespace

void write_snapshot_csv(const std::string& path, const DensityField& rho,
                        std::span<const double> counts) {
    const MetricGrid& g = rho.grid();
    if (counts.size() != static_cast<size_t>(g.cells())) {
        throw DimensionError("write_snapshot_csv: counts shape mismatch");
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write snapshot '" + path + "'");
    out << "i,j,x,y,rho,count\n";
    for (int j = 0; j < g.J(); ++j) {
        for (int i = 0; i < g.I(); ++i) {
            const int c = g.index(i, j);
            const Vec2 ctr = g.center(i, j);
            out << i << ',' << j << ',';
            write_double(out, ctr.x);
            out << ',';
            write_double(out, ctr.y);
            out << ',';
            write_double(out, rho[c]);
            out << ',';
            write_double(out, counts[c]);
            out << '\n';
        }
    }
    if (!out) throw IoError("failed writing snapshot '" + path + "'");
}

DensityField read_snapshot_csv(const std::string& path, const MetricGrid& grid) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open snapshot '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty snapshot '" + path + "'");
    DensityField rho(grid);
    std::vector<bool> seen(static_cast<size_t>(grid.cells()), false);
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        long vals_i = 0, vals_j = 0;
        double r = 0.0;
        int col = 0;
        bool ok = true;
        while (std::getline(ls, tok, ',')) {
            try {
                if (col == 0) vals_i = std::stol(tok);
                else if (col == 1) vals_j = std::stol(tok);
                else if (col == 4) r = std::stod(tok);
            } catch (const std::exception&) {
                ok = false;
                break;
            }
            ++col;
        }
        if (!ok || col < 5) throw IoError("malformed row in snapshot '" + path + "': " + line);
        if (vals_i < 0 || vals_i >= grid.I() || vals_j < 0 || vals_j >= grid.J()) {
            throw DimensionError("snapshot '" + path + "' does not match the grid shape");
        }
        rho.at(static_cast<int>(vals_i), static_cast<int>(vals_j)) = r;
        seen[grid.index(static_cast<int>(vals_i), static_cast<int>(vals_j))] = true;
        ++rows;
    }
    if (rows != grid.cells()) {
        throw DimensionError("snapshot '" + path + "' has " + std::to_string(rows) +
                             " rows, expected " + std::to_string(grid.cells()));
    }
    return rho;
}

void write_report_csv(const std::string& path, const MetricGrid& grid,
                      const stats::RunningMoments& acc, const stats::TheoryReference& ref,
                      const stats::CompareReport& cmp) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report '" + path + "'");
    out << "i,j,x,y,sqrt_det,mean_rho,var_rho,mean_count,var_count,"
           "theory_mean_rho,theory_var_rho,theory_mean_count,"
           "rel_err_mean_rho,rel_err_var_rho,poisson_ratio\n";
    for (int j = 0; j < grid.J(); ++j) {
        for (int i = 0; i < grid.I(); ++i) {
            const int c = grid.index(i, j);
            const Vec2 ctr = grid.center(i, j);
            out << i << ',' << j << ',' << ctr.x << ',' << ctr.y << ','
                << grid.cell(c).sqrt_det << ',' << acc.mean_rho(c) << ',' << acc.var_rho(c) << ','
                << acc.mean_count(c) << ',' << acc.var_count(c) << ',' << ref.mean_rho << ','
                << ref.var_rho[c] << ',' << ref.mean_count[c] << ',' << cmp.rel_err_mean_rho[c]
                << ',' << cmp.rel_err_var_rho[c] << ',' << cmp.poisson_ratio[c] << '\n';
        }
    }
    out << "# samples = " << acc.n() << "\n";
    out << "# rel_err_mean_rho: median = " << cmp.median_mean_rho
        << ", max = " << cmp.max_mean_rho << "\n";
    out << "# rel_err_var_rho: median = " << cmp.median_var_rho << ", max = " << cmp.max_var_rho
        << "\n";
    out << "# |poisson_ratio - 1|: median = " << cmp.median_poisson
        << ", max = " << cmp.max_poisson << "\n";
    out << "# passed = " << (cmp.passed ? "true" : "false") << "\n";
    if (!out) throw IoError("failed writing report '" + path + "'");
}

void ensure_run_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec)) {
            throw IoError("output path '" + dir + "' exists and is not a directory");
        }
        return;
    }
    if (!fs::create_directories(dir, ec) || ec) {
        throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    }
}

}  // namespace surfdk
