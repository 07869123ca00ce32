#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

#include "nopt/vector.hpp"

namespace nopt {

// Symmetric linear map given only through its action on vectors.
class LinearOperator {
public:
    using ApplyFn = std::function<Vector(const Vector&)>;

    LinearOperator(std::size_t dim, ApplyFn apply);

    std::size_t dim() const noexcept { return dim_; }
    Vector apply(const Vector& x) const;
    Vector operator()(const Vector& x) const { return apply(x); }

    // A + shift*I
    LinearOperator shifted(double shift) const;

    static LinearOperator from_dense(Eigen::MatrixXd m);
    static LinearOperator identity(std::size_t dim, double scale = 1.0);

private:
    std::size_t dim_;
    ApplyFn apply_;
};

// Materializes the operator column by column.
Eigen::MatrixXd to_dense(const LinearOperator& op);

} // namespace nopt
