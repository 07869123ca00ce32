#include "nopt/linear_operator.hpp"

#include <memory>
#include <string>

#include "nopt/errors.hpp"

namespace nopt {

LinearOperator::LinearOperator(std::size_t dim, ApplyFn apply) : dim_(dim), apply_(std::move(apply)) {
    if (dim_ == 0) throw InvalidArgument("LinearOperator: dimension must be positive");
    if (!apply_) throw InvalidArgument("LinearOperator: empty apply function");
}

Vector LinearOperator::apply(const Vector& x) const {
    if (x.size() != dim_) {
        throw DimensionError("LinearOperator::apply: expected length " + std::to_string(dim_) + ", got " +
                             std::to_string(x.size()));
    }
    Vector y = apply_(x);
    if (y.size() != dim_) throw DimensionError("LinearOperator::apply: operator returned wrong length");
    return y;
}

LinearOperator LinearOperator::shifted(double shift) const {
    auto inner = apply_;
    return LinearOperator(dim_, [inner, shift](const Vector& x) {
        Vector y = inner(x);
        axpy(shift, x, y);
        return y;
    });
}

LinearOperator LinearOperator::from_dense(Eigen::MatrixXd m) {
    if (m.rows() != m.cols()) throw DimensionError("from_dense: matrix must be square");
    auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(m));
    const auto n = static_cast<std::size_t>(shared->rows());
    return LinearOperator(n, [shared](const Vector& x) {
        Vector y(x.size());
        const auto& a = *shared;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < a.cols(); ++j) s += a(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s;
        }
        return y;
    });
}

LinearOperator LinearOperator::identity(std::size_t dim, double scale) {
    return LinearOperator(dim, [scale](const Vector& x) { return nopt::scale(scale, x); });
}

Eigen::MatrixXd to_dense(const LinearOperator& op) {
    const auto n = op.dim();
    Eigen::MatrixXd m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector col = op.apply(Vector::unit(n, j));
        for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    return m;
}

} // namespace nopt
