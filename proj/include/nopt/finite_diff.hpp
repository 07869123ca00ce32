#pragma once

#include <functional>

#include "nopt/vector.hpp"

namespace nopt {

using ScalarFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

inline constexpr double kFiniteDiffGradEps = 1e-5;
inline constexpr double kFiniteDiffHvpEps = 1e-4;

// Central differences. Coordinate i uses the step eps * max(1, |w_i|).
Vector finite_diff_grad(const ScalarFn& f, const Vector& w, double eps = kFiniteDiffGradEps);

// (g(w + h v) - g(w - h v)) / (2h) with h = eps / max(1, ||v||). Exact up to
// rounding when g is affine. Throws InvalidArgument for v = 0.
Vector finite_diff_hvp(const GradientFn& grad, const Vector& w, const Vector& v, double eps = kFiniteDiffHvpEps);

} // namespace nopt
