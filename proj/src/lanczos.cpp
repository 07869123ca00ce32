#include "nopt/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nopt/checkpoint.hpp"
#include "nopt/dense.hpp"
#include "nopt/errors.hpp"

namespace nopt {

Eigen::MatrixXd TridiagonalMatrix::to_dense() const {
    const auto k = static_cast<Eigen::Index>(alphas.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) t(i, i) = alphas[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < k; ++i) {
        t(i, i + 1) = betas[static_cast<std::size_t>(i)];
        t(i + 1, i) = betas[static_cast<std::size_t>(i)];
    }
    return t;
}

TridiagonalMatrix lanczos(const LinearOperator& a, std::size_t k, RngStream& rng) {
    if (k == 0) throw InvalidArgument("lanczos: k must be at least 1");
    if (k > a.dim()) throw InvalidArgument("lanczos: k exceeds operator dimension");

    TridiagonalMatrix t;
    std::vector<Vector> basis;
    basis.reserve(k);
    basis.push_back(rng.unit_vector(a.dim()));
    double scale_est = 0.0;

    for (std::size_t j = 0; j < k; ++j) {
        const Vector& q = basis[j];
        Vector r = a.apply(q);
        const double alpha = dot(q, r);
        if (!std::isfinite(alpha)) throw NonFiniteError("lanczos: non-finite diagonal coefficient");
        t.alphas.push_back(alpha);
        scale_est = std::max(scale_est, std::abs(alpha));
        if (j + 1 == k) break;

        axpy(-alpha, q, r);
        if (j > 0) axpy(-t.betas[j - 1], basis[j - 1], r);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) axpy(-dot(b, r), b, r);
        }
        const double beta = norm(r);
        if (!std::isfinite(beta)) throw NonFiniteError("lanczos: non-finite off-diagonal coefficient");
        if (beta < 1e-12 * std::max(1.0, scale_est)) break;
        scale_est = std::max(scale_est, beta);
        t.betas.push_back(beta);
        basis.push_back(scale(1.0 / beta, r));
    }
    return t;
}

std::vector<double> ritz_values(const TridiagonalMatrix& t) {
    if (t.alphas.empty() || t.betas.size() + 1 != t.alphas.size()) {
        throw InvalidArgument("ritz_values: malformed tridiagonal matrix");
    }
    for (double b : t.betas) {
        if (b < 0.0) throw InvalidArgument("ritz_values: negative off-diagonal");
    }
    return dense_sym_eigs(t.to_dense());
}

RitzSpectrum ritz_spectrum(const LinearOperator& a, std::size_t k, RngStream& rng, double shift) {
    const LinearOperator op = shift == 0.0 ? a : a.shifted(shift);
    const TridiagonalMatrix t = lanczos(op, k, rng);
    RitzSpectrum out;
    out.k = t.size();
    out.values = ritz_values(t);
    if (shift != 0.0) {
        for (auto& v : out.values) v -= shift;
        out.shift_used = shift;
    }
    return out;
}

ExtremalEigs extremal_eigs(const LossModel& model, const Vector& w, const MiniBatch& batch, std::size_t k,
                           RngStream& rng) {
    if (k < 2) throw InvalidArgument("extremal_eigs: k must be at least 2");
    const LinearOperator h = model.hessian_operator(w, batch);
    const std::size_t steps = std::min(k, h.dim());

    const TridiagonalMatrix t = lanczos(h, steps, rng);
    ExtremalEigs out;
    out.lambda_max = ritz_values(t).back();
    out.shift = out.lambda_max + (kShiftInflation - 1.0) * std::abs(out.lambda_max);

    const TridiagonalMatrix shifted = lanczos(h.shifted(-out.shift), steps, rng);
    out.lambda_min = ritz_values(shifted).front() + out.shift;
    out.lambda_min = std::min(out.lambda_min, out.lambda_max);
    return out;
}

std::vector<ProbeRecord> trajectory_probe(const std::vector<std::filesystem::path>& checkpoints, const LossModel& model,
                                          std::size_t k, std::size_t batch_size, const RngStream& rng) {
    std::vector<ProbeRecord> records;
    records.reserve(checkpoints.size());
    const std::size_t n = model.dataset().size();
    const std::size_t b = std::min(batch_size, n);
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        const auto& path = checkpoints[i];
        Checkpoint ckpt;
        try {
            ckpt = read_checkpoint(path);
        } catch (const Error& e) {
            throw IoError(path.string() + ": " + e.what());
        }
        if (ckpt.values.size() != model.param_count()) {
            throw DimensionError(path.string() + ": checkpoint has " + std::to_string(ckpt.values.size()) +
                                 " parameters, model expects " + std::to_string(model.param_count()));
        }
        RngStream probe_rng = rng.substream("probe", i);
        ProbeRecord rec;
        rec.step = static_cast<long>(ckpt.step);
        rec.batch_seed = probe_rng.seed();
        MiniBatchSampler sampler(model.dataset(), b, probe_rng.substream("batch"));
        const MiniBatch batch = sampler.next();
        RngStream start = probe_rng.substream("start");
        const auto eig = extremal_eigs(model, ckpt.values, batch, k, start);
        rec.lambda_min_est = eig.lambda_min;
        rec.lambda_max_est = eig.lambda_max;
        records.push_back(rec);
    }
    return records;
}

void write_probe_csv(std::ostream& out, const std::vector<ProbeRecord>& records) {
    out << "step,lambda_min,lambda_max,batch_seed\n";
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%llu\n", r.step, r.lambda_min_est, r.lambda_max_est,
                      static_cast<unsigned long long>(r.batch_seed));
        out << buf;
    }
}

} // namespace nopt
