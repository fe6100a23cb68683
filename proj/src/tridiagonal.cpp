#include "tridiagonal.hpp"

#include "heliumjcm/errors.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

namespace heliumjcm::detail {

TridiagonalEigenpairs lowest_eigenpairs(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                                        int count, bool want_vectors) {
    const lapack_int n = static_cast<lapack_int>(diag.size());
    if (count < 1 || count > n || offdiag.size() != diag.size() - 1)
        throw ConvergenceFailure("tridiagonal eigensolver: bad dimensions");

    // dstevr overwrites d and e; e needs length n.
    std::vector<double> d(diag.data(), diag.data() + n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (lapack_int i = 0; i + 1 < n; ++i)
        e[static_cast<std::size_t>(i)] = offdiag[i];

    lapack_int found = 0;
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
    TridiagonalEigenpairs out;
    out.vectors.resize(want_vectors ? n : 1, want_vectors ? count : 1);

    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'I', n, d.data(),
                                           e.data(), 0.0, 0.0, 1, count, 0.0, &found, w.data(),
                                           out.vectors.data(), want_vectors ? n : 1, isuppz.data());
    if (info != 0 || found != count)
        throw ConvergenceFailure("tridiagonal eigensolver failed (dstevr info=" + std::to_string(info) + ")");

    out.values = Eigen::Map<Eigen::VectorXd>(w.data(), count);
    return out;
}

} // namespace heliumjcm::detail
