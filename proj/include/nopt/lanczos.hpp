#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "nopt/dataset.hpp"
#include "nopt/linear_operator.hpp"
#include "nopt/model.hpp"
#include "nopt/rng.hpp"

namespace nopt {

struct TridiagonalMatrix {
    std::vector<double> alphas;  // diagonal, length k
    std::vector<double> betas;   // off-diagonal, length k - 1, all >= 0

    std::size_t size() const noexcept { return alphas.size(); }
    Eigen::MatrixXd to_dense() const;
};

struct RitzSpectrum {
    std::vector<double> values;  // ascending
    std::size_t k = 0;
    std::optional<double> shift_used;
};

// k steps of Lanczos from a random unit start vector, with full
// reorthogonalization against every stored basis vector. Stops early, and
// returns the leading j x j block, once an off-diagonal falls below
// 1e-12 * max(1, |T|_max) (an invariant subspace was found).
TridiagonalMatrix lanczos(const LinearOperator& a, std::size_t k, RngStream& rng);

std::vector<double> ritz_values(const TridiagonalMatrix& t);

// Ritz spectrum of `a + shift * I` with the shift undone, so values
// estimate eigenvalues of `a` itself.
RitzSpectrum ritz_spectrum(const LinearOperator& a, std::size_t k, RngStream& rng, double shift = 0.0);

inline constexpr std::size_t kDefaultLanczosSteps = 10;
inline constexpr double kShiftInflation = 1.1;

struct ExtremalEigs {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double shift = 0.0;  // the upper bound used for the shifted run
};

// lambda_max: largest Ritz value of the mini-batch Hessian. lambda_min: the
// smallest Ritz value of H - s I plus s, where s inflates lambda_max by 10%
// of its magnitude so it bounds the spectrum from above.
ExtremalEigs extremal_eigs(const LossModel& model, const Vector& w, const MiniBatch& batch, std::size_t k,
                           RngStream& rng);

struct ProbeRecord {
    long step = 0;
    double lambda_min_est = 0.0;
    double lambda_max_est = 0.0;
    std::uint64_t batch_seed = 0;
};

// One record per checkpoint, each on a fresh random batch whose seed is kept
// in the record. Paths are probed in the order given.
std::vector<ProbeRecord> trajectory_probe(const std::vector<std::filesystem::path>& checkpoints, const LossModel& model,
                                          std::size_t k, std::size_t batch_size, const RngStream& rng);

// `step,lambda_min,lambda_max,batch_seed` header, %.17g floats.
void write_probe_csv(std::ostream& out, const std::vector<ProbeRecord>& records);

} // namespace nopt
