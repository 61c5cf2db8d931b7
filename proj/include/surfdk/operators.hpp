#pragma once

#include <Eigen/Dense>

#include "surfdk/geometry.hpp"

namespace surfdk::fvm {

/// Dense matrix forms of the discrete operators, assembled column-by-column
/// from unit-vector probes of the matrix-free kernels. L_h is IJ x IJ, K_h is
/// IJ x 2IJ (noise components ordered x-block then y-block), J_diag holds
/// sqrt|G| per cell.
struct AssembledOperators {
    Eigen::MatrixXd L;
    Eigen::MatrixXd K;
    Eigen::VectorXd J_diag;
};

/// Assembly is guarded to grids of at most 64x64 cells (throws SizeGuardError
/// beyond that).
AssembledOperators assemble_operators(const MetricGrid& grid);

/// Residuals of the exact algebraic structure the discretization preserves.
struct FdrAlgebraResiduals {
    double asymmetry;        // max |L - L^T|
    double factorization;    // max |L + K K^T|
    double lyapunov;         // residual of C = (rho_bar/(N dx dy)) J^{-1}
};

FdrAlgebraResiduals fdr_algebra_residuals(const AssembledOperators& ops, const MetricGrid& grid,
                                          long long N);

}  // namespace surfdk::fvm
