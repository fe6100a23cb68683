#pragma once

#include <Eigen/Dense>

namespace heliumjcm::detail {

struct TridiagonalEigenpairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, unit 2-norm
};

// Lowest `count` eigenpairs of the symmetric tridiagonal matrix with the given
// diagonal and off-diagonal (size n-1). Throws ConvergenceFailure.
TridiagonalEigenpairs lowest_eigenpairs(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                                        int count, bool want_vectors = true);

} // namespace heliumjcm::detail
