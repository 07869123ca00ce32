#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nopt/dataset.hpp"
#include "nopt/linear_operator.hpp"
#include "nopt/rng.hpp"
#include "nopt/vector.hpp"

namespace nopt {

// Loss oracle over mini-batches of a fixed dataset. The mini-batch loss is
// the plain average of per-sample losses. Implementations are immutable and
// safe to call concurrently.
class LossModel {
public:
    explicit LossModel(std::shared_ptr<const Dataset> data);
    virtual ~LossModel() = default;

    virtual std::size_t param_count() const = 0;
    virtual std::string family() const = 0;

    virtual double sample_loss(const Vector& w, std::size_t index) const = 0;
    double loss(const Vector& w, const MiniBatch& batch) const;
    virtual Vector gradient(const Vector& w, const MiniBatch& batch) const = 0;

    // Hessian-vector product of the mini-batch loss. The default is a central
    // difference of `gradient`.
    virtual Vector hvp(const Vector& w, const MiniBatch& batch, const Vector& v) const;
    virtual bool has_exact_hvp() const { return false; }

    // Model output for one feature vector; for classifiers, P(target = 1).
    virtual double predict(const Vector& w, const Vector& features) const = 0;

    virtual Vector initial_params(RngStream& rng) const = 0;

    const Dataset& dataset() const noexcept { return *data_; }
    std::shared_ptr<const Dataset> dataset_ptr() const noexcept { return data_; }

    // Mini-batch Hessian as an operator at fixed (w, batch).
    LinearOperator hessian_operator(const Vector& w, const MiniBatch& batch) const;

protected:
    void check_args(const Vector& w, const MiniBatch& batch) const;

private:
    std::shared_ptr<const Dataset> data_;
};

// Fraction of correctly classified samples (threshold 0.5). Zero for
// regression datasets.
double accuracy(const LossModel& model, const Vector& w, const MiniBatch& batch);

// f_i(w) = 1/2 (w - w*)^T H (w - w*) + (w - w*)^T xi_i with H diagonal.
// The xi_i are stored as the sample features.
class QuadraticModel final : public LossModel {
public:
    QuadraticModel(std::shared_ptr<const Dataset> data, Vector spectrum, Vector w_star, Vector initial);

    std::size_t param_count() const override { return spectrum_.size(); }
    std::string family() const override { return "quadratic"; }
    double sample_loss(const Vector& w, std::size_t index) const override;
    Vector gradient(const Vector& w, const MiniBatch& batch) const override;
    Vector hvp(const Vector& w, const MiniBatch& batch, const Vector& v) const override;
    bool has_exact_hvp() const override { return true; }
    double predict(const Vector& w, const Vector& features) const override;
    Vector initial_params(RngStream& rng) const override;

    const Vector& spectrum() const noexcept { return spectrum_; }
    const Vector& w_star() const noexcept { return w_star_; }

private:
    Vector spectrum_;
    Vector w_star_;
    Vector initial_;
};

// Binary cross-entropy on sigma(x^T w_x + b) plus (l2/2) ||w||^2 over all
// parameters. Parameter layout: feature weights, then bias.
class LogisticModel final : public LossModel {
public:
    static constexpr double kDefaultL2 = 1e-4;

    explicit LogisticModel(std::shared_ptr<const Dataset> data, double l2 = kDefaultL2);

    std::size_t param_count() const override { return dataset().feature_dim() + 1; }
    std::string family() const override { return "logistic"; }
    double sample_loss(const Vector& w, std::size_t index) const override;
    Vector gradient(const Vector& w, const MiniBatch& batch) const override;
    Vector hvp(const Vector& w, const MiniBatch& batch, const Vector& v) const override;
    bool has_exact_hvp() const override { return true; }
    double predict(const Vector& w, const Vector& features) const override;
    Vector initial_params(RngStream& rng) const override;

    double l2() const noexcept { return l2_; }

private:
    double logit(const Vector& w, const Vector& x) const;
    double l2_;
};

// One hidden tanh layer, sigmoid output, cross-entropy loss. Parameter
// layout: W1 (hidden x d, row-major), b1 (hidden), w2 (hidden), b2.
class MlpModel final : public LossModel {
public:
    MlpModel(std::shared_ptr<const Dataset> data, std::size_t hidden_width);

    std::size_t param_count() const override;
    std::string family() const override { return "mlp"; }
    double sample_loss(const Vector& w, std::size_t index) const override;
    Vector gradient(const Vector& w, const MiniBatch& batch) const override;
    double predict(const Vector& w, const Vector& features) const override;
    Vector initial_params(RngStream& rng) const override;

    std::size_t hidden_width() const noexcept { return hidden_; }

private:
    double forward(const Vector& w, const Vector& x, std::vector<double>& hidden) const;
    std::size_t hidden_;
};

} // namespace nopt
