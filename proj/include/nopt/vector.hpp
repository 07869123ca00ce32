#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nopt {

// Dense real vector used for parameters, gradients and Krylov bases.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    bool operator==(const Vector&) const = default;

    static Vector unit(std::size_t n, std::size_t i) {
        Vector e(n);
        e[i] = 1.0;
        return e;
    }

private:
    std::vector<double> data_;
};

// Kernels. All reductions sum sequentially, left to right, so results are
// reproducible bit for bit. Length mismatches throw DimensionError.
double dot(const Vector& x, const Vector& y);
double norm(const Vector& x);
void axpy(double a, const Vector& x, Vector& y);   // y <- y + a*x
Vector scale(double s, const Vector& x);
Vector add(const Vector& x, const Vector& y);
Vector sub(const Vector& x, const Vector& y);
// a*x + b*y
Vector lincomb(double a, const Vector& x, double b, const Vector& y);

bool all_finite(const Vector& x) noexcept;
void require_same_size(const Vector& x, const Vector& y, const char* where);
void require_finite(const Vector& x, const char* what);

} // namespace nopt
