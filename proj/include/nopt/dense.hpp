#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace nopt {

inline constexpr std::size_t kDenseEigsDefaultCap = 2000;

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Eigen::MatrixXd vectors;     // columns match `values`
};

// Eigenvalues of a dense symmetric matrix, ascending. Reference solver for
// tests and for Ritz values; not meant for large problems, hence the cap.
// Throws InvalidArgument when |M - M^T| exceeds 1e-10 * max(1, max|M_ij|).
std::vector<double> dense_sym_eigs(const Eigen::MatrixXd& m, std::size_t max_dim = kDenseEigsDefaultCap);

// Same, with eigenvectors. Verifies that Q diag(values) Q^T reproduces M to
// 1e-8 relative and throws Error otherwise.
SymmetricEigen dense_sym_eigen(const Eigen::MatrixXd& m, std::size_t max_dim = kDenseEigsDefaultCap);

} // namespace nopt
