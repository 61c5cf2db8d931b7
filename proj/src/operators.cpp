#include "surfdk/operators.hpp"

#include <cmath>

#include "surfdk/errors.hpp"
#include "surfdk/field.hpp"
#include "surfdk/fvm.hpp"

namespace surfdk::fvm {

namespace {

/// K_h w = div_plus( |G|^{1/4} G^{-1/2} w ) for a 2IJ noise vector
/// (x components first, then y components).
void apply_K(const MetricGrid& g, const Eigen::VectorXd& w, Eigen::VectorXd& out) {
    const int n = g.cells();
    CellVectorField f(g);
    for (int c = 0; c < n; ++c) {
        const MetricSample& m = g.cell(c);
        const double amp = std::sqrt(m.sqrt_det);  // J^{1/2} = |G|^{1/4}
        const double zx = w[c], zy = w[n + c];
        f.u[c] = amp * (m.g_inv_sqrt.xx * zx + m.g_inv_sqrt.xy * zy);
        f.v[c] = amp * (m.g_inv_sqrt.xy * zx + m.g_inv_sqrt.yy * zy);
    }
    DensityField d = div_plus(f);
    for (int c = 0; c < n; ++c) out[c] = d[c];
}

/// L_h rho = div_plus( J G^{-1} grad_minus rho ), i.e. the matrix form
/// without the leading J^{-1}.
void apply_L(const MetricGrid& g, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    const int n = g.cells();
    DensityField rho(g);
    for (int c = 0; c < n; ++c) rho[c] = x[c];
    CellVectorField gm = grad_minus(rho);
    for (int c = 0; c < n; ++c) {
        const MetricSample& m = g.cell(c);
        const double u = gm.u[c], v = gm.v[c];
        gm.u[c] = m.sqrt_det * (m.g_inv.xx * u + m.g_inv.xy * v);
        gm.v[c] = m.sqrt_det * (m.g_inv.xy * u + m.g_inv.yy * v);
    }
    DensityField d = div_plus(gm);
    for (int c = 0; c < n; ++c) out[c] = d[c];
}

}  // namespace

AssembledOperators assemble_operators(const MetricGrid& grid) {
    const int n = grid.cells();
    if (n > 64 * 64) {
        throw SizeGuardError("assemble_operators: dense assembly limited to 64x64 cells, got " +
                             std::to_string(grid.I()) + "x" + std::to_string(grid.J()));
    }
    AssembledOperators ops;
    ops.L.resize(n, n);
    ops.K.resize(n, 2 * n);
    ops.J_diag.resize(n);
    for (int c = 0; c < n; ++c) ops.J_diag[c] = grid.cell(c).sqrt_det;

    Eigen::VectorXd probe = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd col(n);
    for (int k = 0; k < n; ++k) {
        probe[k] = 1.0;
        apply_L(grid, probe, col);
        ops.L.col(k) = col;
        probe[k] = 0.0;
    }
    Eigen::VectorXd probe2 = Eigen::VectorXd::Zero(2 * n);
    for (int k = 0; k < 2 * n; ++k) {
        probe2[k] = 1.0;
        apply_K(grid, probe2, col);
        ops.K.col(k) = col;
        probe2[k] = 0.0;
    }
    return ops;
}

FdrAlgebraResiduals fdr_algebra_residuals(const AssembledOperators& ops, const MetricGrid& grid,
                                          long long N) {
    FdrAlgebraResiduals r{};
    r.asymmetry = (ops.L - ops.L.transpose()).cwiseAbs().maxCoeff();
    r.factorization = (ops.L + ops.K * ops.K.transpose()).cwiseAbs().maxCoeff();

    const double rho_bar = 1.0 / grid.surface_area();
    const double scale = rho_bar / (double(N) * grid.cell_area());
    Eigen::VectorXd j_inv = ops.J_diag.cwiseInverse();
    Eigen::MatrixXd C = scale * j_inv.asDiagonal();
    Eigen::MatrixXd JiL = j_inv.asDiagonal() * ops.L;
    Eigen::MatrixXd lhs = JiL * C + C * JiL.transpose() +
                          2.0 * scale *
                              (j_inv.asDiagonal() * (ops.K * ops.K.transpose()) *
                               j_inv.asDiagonal());
    r.lyapunov = lhs.cwiseAbs().maxCoeff();
    return r;
}

}  // namespace surfdk::fvm
