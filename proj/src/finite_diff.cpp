#include "nopt/finite_diff.hpp"

#include <algorithm>
#include <cmath>

#include "nopt/errors.hpp"

namespace nopt {

Vector finite_diff_grad(const ScalarFn& f, const Vector& w, double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("finite_diff_grad: eps must be positive");
    Vector g(w.size());
    Vector probe = w;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double h = eps * std::max(1.0, std::abs(w[i]));
        probe[i] = w[i] + h;
        const double fp = f(probe);
        probe[i] = w[i] - h;
        const double fm = f(probe);
        probe[i] = w[i];
        if (!std::isfinite(fp) || !std::isfinite(fm)) throw NonFiniteError("finite_diff_grad: non-finite function value");
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Vector finite_diff_hvp(const GradientFn& grad, const Vector& w, const Vector& v, double eps) {
    require_same_size(w, v, "finite_diff_hvp");
    if (!(eps > 0.0)) throw InvalidArgument("finite_diff_hvp: eps must be positive");
    const double v_norm = norm(v);
    if (!(v_norm > 0.0)) throw InvalidArgument("finite_diff_hvp: direction must be nonzero");
    const double h = eps / std::max(1.0, v_norm);
    const Vector gp = grad(lincomb(1.0, w, h, v));
    const Vector gm = grad(lincomb(1.0, w, -h, v));
    require_finite(gp, "finite_diff_hvp: gradient");
    require_finite(gm, "finite_diff_hvp: gradient");
    return scale(1.0 / (2.0 * h), sub(gp, gm));
}

} // namespace nopt
