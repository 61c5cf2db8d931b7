#pragma once

#include <vector>

#include "surfdk/geometry.hpp"

namespace surfdk {

/// Cell-averaged scalar field on a MetricGrid (density with respect to the
/// surface area measure, units 1/area).
class DensityField {
public:
    explicit DensityField(const MetricGrid& grid, double fill = 0.0)
        : grid_(&grid), v_(static_cast<size_t>(grid.cells()), fill) {}

    const MetricGrid& grid() const { return *grid_; }
    int cells() const { return static_cast<int>(v_.size()); }

    double& operator[](int idx) { return v_[idx]; }
    double operator[](int idx) const { return v_[idx]; }
    double& at(int i, int j) { return v_[grid_->index(i, j)]; }
    double at(int i, int j) const { return v_[grid_->index(i, j)]; }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    /// Discrete mass sum rho sqrt|G| dx dy.
    double mass() const {
        double m = 0.0;
        for (int c = 0; c < cells(); ++c) m += v_[c] * grid_->cell(c).sqrt_det;
        return m * grid_->cell_area();
    }

private:
    const MetricGrid* grid_;
    std::vector<double> v_;
};

/// Per-cell 2-vector field, stored as separate x/y component arrays.
struct CellVectorField {
    explicit CellVectorField(const MetricGrid& grid)
        : grid(&grid),
          u(static_cast<size_t>(grid.cells()), 0.0),
          v(static_cast<size_t>(grid.cells()), 0.0) {}

    const MetricGrid* grid;
    std::vector<double> u;
    std::vector<double> v;
};

/// Per-cell independent standard Gaussian pair (one per component).
struct NoiseDraw {
    explicit NoiseDraw(const MetricGrid& grid)
        : zx(static_cast<size_t>(grid.cells()), 0.0),
          zy(static_cast<size_t>(grid.cells()), 0.0) {}

    std::vector<double> zx;
    std::vector<double> zy;
};

}  // namespace surfdk
