#include "nopt/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nopt/errors.hpp"

namespace nopt {
namespace {

void check_symmetric(const Eigen::MatrixXd& m, std::size_t max_dim) {
    if (m.rows() != m.cols()) throw DimensionError("dense_sym_eigs: matrix must be square");
    if (m.rows() == 0) throw DimensionError("dense_sym_eigs: empty matrix");
    if (static_cast<std::size_t>(m.rows()) > max_dim) {
        throw InvalidArgument("dense_sym_eigs: dimension " + std::to_string(m.rows()) + " exceeds cap " +
                              std::to_string(max_dim));
    }
    if (!m.allFinite()) throw NonFiniteError("dense_sym_eigs: matrix contains NaN or Inf");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * scale) {
        throw InvalidArgument("dense_sym_eigs: matrix is not symmetric (max |M - M^T| = " + std::to_string(asym) + ")");
    }
}

} // namespace

std::vector<double> dense_sym_eigs(const Eigen::MatrixXd& m, std::size_t max_dim) {
    check_symmetric(m, max_dim);
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("dense_sym_eigs: eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end());
    return out;
}

SymmetricEigen dense_sym_eigen(const Eigen::MatrixXd& m, std::size_t max_dim) {
    check_symmetric(m, max_dim);
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw Error("dense_sym_eigen: eigensolver did not converge");

    // Eigen already returns ascending eigenvalues.
    SymmetricEigen out;
    const auto& ev = solver.eigenvalues();
    out.values.assign(ev.data(), ev.data() + ev.size());
    out.vectors = solver.eigenvectors();

    const Eigen::MatrixXd rebuilt = out.vectors * ev.asDiagonal() * out.vectors.transpose();
    const double scale = std::max(1.0, sym.norm());
    if ((rebuilt - sym).norm() > 1e-8 * scale) throw Error("dense_sym_eigen: reconstruction check failed");
    return out;
}

} // namespace nopt
