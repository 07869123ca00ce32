#pragma once

#include <cstddef>
#include <vector>

#include "nopt/linear_operator.hpp"
#include "nopt/vector.hpp"

namespace nopt {

struct SolveReport {
    Vector solution;
    std::size_t iterations = 0;
    bool converged = false;
    double final_residual = 0.0;           // ||A z - b|| / ||b|| (absolute when b = 0)
    std::vector<double> residual_history;  // ||A z_t - b|| for t = 0..iterations
};

// Solves A z = b with the Neumann-series recurrence
//   z_0 = b,  z_{t+1} = (I - A) z_t + b,
// which converges when every eigenvalue of A lies in (0, 2). Stops when
// ||A z - b|| <= tol * ||b||, after max_iters, or when ||z|| exceeds
// 1e12 * ||b|| (reported as converged = false).
SolveReport richardson_solve(const LinearOperator& a, const Vector& b, std::size_t max_iters, double tol);

inline constexpr double kRichardsonDivergenceFactor = 1e12;

} // namespace nopt
