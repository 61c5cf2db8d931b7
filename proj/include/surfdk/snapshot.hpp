#pragma once

#include <span>
#include <string>
#include <vector>

#include "surfdk/field.hpp"
#include "surfdk/stats.hpp"

namespace surfdk {

/// Writes one per-cell snapshot as CSV with header `i,j,x,y,rho,count`.
void write_snapshot_csv(const std::string& path, const DensityField& rho,
                        std::span<const double> counts);

/// Reads the `rho` column of a snapshot CSV back into a field (used for
/// file-based initial conditions). The file must match the grid shape.
DensityField read_snapshot_csv(const std::string& path, const MetricGrid& grid);

/// Per-cell statistics report: accumulated moments, theory reference and
/// relative errors, one row per cell plus a trailing summary block of
/// comment lines.
void write_report_csv(const std::string& path, const MetricGrid& grid,
                      const stats::RunningMoments& acc, const stats::TheoryReference& ref,
                      const stats::CompareReport& cmp);

/// Creates a run directory (parents included). Errors if the path exists as a
/// non-directory.
void ensure_run_dir(const std::string& dir);

}  // namespace surfdk
