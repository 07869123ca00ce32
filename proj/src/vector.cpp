#include "nopt/vector.hpp"

#include <cmath>
#include <string>

#include "nopt/errors.hpp"

namespace nopt {

void require_same_size(const Vector& x, const Vector& y, const char* where) {
    if (x.size() != y.size()) {
        throw DimensionError(std::string(where) + ": length mismatch (" + std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()) + ")");
    }
}

void require_finite(const Vector& x, const char* what) {
    if (!all_finite(x)) throw NonFiniteError(std::string(what) + " contains NaN or Inf");
}

bool all_finite(const Vector& x) noexcept {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double dot(const Vector& x, const Vector& y) {
    require_same_size(x, y, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm(const Vector& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

void axpy(double a, const Vector& x, Vector& y) {
    require_same_size(x, y, "axpy");
    if (a == 0.0) return;
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector scale(double s, const Vector& x) {
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = s * x[i];
    return out;
}

Vector add(const Vector& x, const Vector& y) {
    require_same_size(x, y, "add");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

Vector sub(const Vector& x, const Vector& y) {
    require_same_size(x, y, "sub");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

Vector lincomb(double a, const Vector& x, double b, const Vector& y) {
    require_same_size(x, y, "lincomb");
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

} // namespace nopt
