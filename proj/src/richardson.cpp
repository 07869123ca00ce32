#include "nopt/richardson.hpp"

#include <cmath>

#include "nopt/errors.hpp"

namespace nopt {

SolveReport richardson_solve(const LinearOperator& a, const Vector& b, std::size_t max_iters, double tol) {
    if (a.dim() != b.size()) throw DimensionError("richardson_solve: operator and right-hand side differ in size");
    require_finite(b, "richardson_solve: right-hand side");
    if (!(tol > 0.0)) throw InvalidArgument("richardson_solve: tol must be positive");

    const double b_norm = norm(b);
    const double target = tol * b_norm;
    const double blowup = kRichardsonDivergenceFactor * (b_norm > 0.0 ? b_norm : 1.0);

    SolveReport report;
    Vector z = b;
    Vector az = a.apply(z);
    report.residual_history.push_back(norm(sub(b, az)));

    for (std::size_t it = 1; it <= max_iters; ++it) {
        // z <- z - A z + b
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = z[i] - az[i] + b[i];
        report.iterations = it;

        const double z_norm = norm(z);
        if (!std::isfinite(z_norm) || z_norm > blowup) {
            report.converged = false;
            report.final_residual = INFINITY;
            report.solution = std::move(z);
            return report;
        }

        az = a.apply(z);
        const double r = norm(sub(b, az));
        report.residual_history.push_back(r);
        if (r <= target) {
            report.converged = true;
            report.final_residual = b_norm > 0.0 ? r / b_norm : r;
            report.solution = std::move(z);
            return report;
        }
    }

    const double r = report.residual_history.back();
    report.final_residual = b_norm > 0.0 ? r / b_norm : r;
    report.solution = std::move(z);
    return report;
}

} // namespace nopt
