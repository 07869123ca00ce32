#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nopt/dataset.hpp"
#include "nopt/model.hpp"

namespace nopt {

struct Problem {
    std::shared_ptr<const LossModel> model;
    std::shared_ptr<const Dataset> data;
};

// Quadratic test problem with H = diag(spectrum). Noise vectors come in
// antithetic pairs (xi, -xi) quantized to a power-of-two grid, so any
// full-batch sum of them is exactly zero in floating point, whatever the
// summation order. An odd N gets one zero vector at the end. The initial
// point is w* + 1 (all coordinates offset by one).
Problem make_quadratic_problem(const Vector& spectrum, const Vector& w_star, double noise, std::size_t n_samples,
                               std::uint64_t seed);

// `count` values logarithmically spaced from lo to hi inclusive.
Vector logspace(double lo, double hi, std::size_t count);

// Two Gaussian blobs (unit covariance) centred at +/- separation/2 along a
// random unit direction; labels alternate 0, 1, 0, ...
std::shared_ptr<const Dataset> make_blob_dataset(std::size_t feature_dim, std::size_t n_samples, double separation,
                                                 std::uint64_t seed);
Problem make_logistic_problem(std::size_t feature_dim, std::size_t n_samples, double separation, std::uint64_t seed);

// Points uniform in [-1, 1]^d labelled by the XOR of the signs of the first
// two coordinates (sign of the first when d = 1).
std::shared_ptr<const Dataset> make_xor_dataset(std::size_t feature_dim, std::size_t n_samples, std::uint64_t seed);
Problem make_mlp_problem(std::size_t feature_dim, std::size_t hidden_width, std::size_t n_samples, std::uint64_t seed);

enum class ProblemFamily { quadratic, logistic, mlp };

std::string to_string(ProblemFamily f);
std::optional<ProblemFamily> parse_problem_family(const std::string& s);

struct ProblemSpec {
    ProblemFamily family = ProblemFamily::quadratic;
    std::size_t n_samples = 1000;
    // quadratic
    std::vector<double> spectrum{1.0, 0.1};
    double noise = 0.0;
    // logistic / mlp
    std::size_t feature_dim = 2;
    double separation = 2.0;
    std::size_t hidden_width = 8;
    std::string data_path;  // optional CSV replacing the generator

    bool operator==(const ProblemSpec&) const = default;
};

// Data generation is keyed on `seed`; w* for the quadratic family is drawn
// from the same seed.
Problem make_problem(const ProblemSpec& spec, std::uint64_t seed);

} // namespace nopt
