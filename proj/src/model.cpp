#include "nopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nopt/errors.hpp"
#include "nopt/finite_diff.hpp"

namespace nopt {
namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

} // namespace

LossModel::LossModel(std::shared_ptr<const Dataset> data) : data_(std::move(data)) {
    if (!data_) throw InvalidArgument("LossModel: null dataset");
}

void LossModel::check_args(const Vector& w, const MiniBatch& batch) const {
    if (w.size() != param_count()) {
        throw DimensionError(family() + ": expected " + std::to_string(param_count()) + " parameters, got " +
                             std::to_string(w.size()));
    }
    if (batch.indices.empty()) throw InvalidArgument(family() + ": empty mini-batch");
    for (auto i : batch.indices) {
        if (i >= data_->size()) throw InvalidArgument(family() + ": sample index " + std::to_string(i) + " out of range");
    }
}

double LossModel::loss(const Vector& w, const MiniBatch& batch) const {
    check_args(w, batch);
    double s = 0.0;
    for (auto i : batch.indices) s += sample_loss(w, i);
    return s / static_cast<double>(batch.size());
}

Vector LossModel::hvp(const Vector& w, const MiniBatch& batch, const Vector& v) const {
    check_args(w, batch);
    return finite_diff_hvp([&](const Vector& x) { return gradient(x, batch); }, w, v);
}

LinearOperator LossModel::hessian_operator(const Vector& w, const MiniBatch& batch) const {
    check_args(w, batch);
    return LinearOperator(param_count(), [this, w, batch](const Vector& v) {
        if (norm(v) == 0.0) return Vector(v.size());
        return hvp(w, batch, v);
    });
}

double accuracy(const LossModel& model, const Vector& w, const MiniBatch& batch) {
    const auto& data = model.dataset();
    if (data.kind() != TaskKind::classification || batch.size() == 0) return 0.0;
    std::size_t correct = 0;
    for (auto i : batch.indices) {
        const bool predicted = model.predict(w, data[i].features) >= 0.5;
        correct += static_cast<std::size_t>(predicted == (data[i].target == 1.0));
    }
    return static_cast<double>(correct) / static_cast<double>(batch.size());
}

// ---------------------------------------------------------------- quadratic

QuadraticModel::QuadraticModel(std::shared_ptr<const Dataset> data, Vector spectrum, Vector w_star, Vector initial)
    : LossModel(std::move(data)), spectrum_(std::move(spectrum)), w_star_(std::move(w_star)), initial_(std::move(initial)) {
    if (spectrum_.empty()) throw InvalidArgument("quadratic: spectrum must be nonempty");
    require_same_size(spectrum_, w_star_, "quadratic: w_star");
    require_same_size(spectrum_, initial_, "quadratic: initial point");
    if (dataset().feature_dim() != spectrum_.size()) throw DimensionError("quadratic: noise vectors have wrong length");
    require_finite(spectrum_, "quadratic: spectrum");
}

double QuadraticModel::sample_loss(const Vector& w, std::size_t index) const {
    const auto& xi = dataset()[index].features;
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double d = w[j] - w_star_[j];
        s += 0.5 * spectrum_[j] * d * d + d * xi[j];
    }
    return s;
}

Vector QuadraticModel::gradient(const Vector& w, const MiniBatch& batch) const {
    check_args(w, batch);
    const std::size_t n = w.size();
    Vector noise_sum(n);
    for (auto i : batch.indices) axpy(1.0, dataset()[i].features, noise_sum);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    Vector g(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = spectrum_[j] * (w[j] - w_star_[j]) + noise_sum[j] * inv_b;
    return g;
}

Vector QuadraticModel::hvp(const Vector& w, const MiniBatch& batch, const Vector& v) const {
    check_args(w, batch);
    require_same_size(w, v, "quadratic hvp");
    Vector out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = spectrum_[j] * v[j];
    return out;
}

double QuadraticModel::predict(const Vector&, const Vector&) const { return 0.0; }

Vector QuadraticModel::initial_params(RngStream&) const { return initial_; }

// ----------------------------------------------------------------- logistic

LogisticModel::LogisticModel(std::shared_ptr<const Dataset> data, double l2) : LossModel(std::move(data)), l2_(l2) {
    if (dataset().kind() != TaskKind::classification) throw InvalidArgument("logistic: dataset must be 0/1 labelled");
    if (!(l2_ >= 0.0)) throw InvalidArgument("logistic: l2 must be nonnegative");
}

double LogisticModel::logit(const Vector& w, const Vector& x) const {
    const std::size_t d = x.size();
    double z = w[d];
    for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
    return z;
}

double LogisticModel::sample_loss(const Vector& w, std::size_t index) const {
    const auto& s = dataset()[index];
    const double z = logit(w, s.features);
    double reg = 0.0;
    for (double x : w) reg += x * x;
    return softplus(z) - s.target * z + 0.5 * l2_ * reg;
}

Vector LogisticModel::gradient(const Vector& w, const MiniBatch& batch) const {
    check_args(w, batch);
    const std::size_t d = dataset().feature_dim();
    Vector g(d + 1);
    for (auto i : batch.indices) {
        const auto& s = dataset()[i];
        const double r = sigmoid(logit(w, s.features)) - s.target;
        for (std::size_t j = 0; j < d; ++j) g[j] += r * s.features[j];
        g[d] += r;
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t j = 0; j <= d; ++j) g[j] = g[j] * inv_b + l2_ * w[j];
    return g;
}

Vector LogisticModel::hvp(const Vector& w, const MiniBatch& batch, const Vector& v) const {
    check_args(w, batch);
    require_same_size(w, v, "logistic hvp");
    const std::size_t d = dataset().feature_dim();
    Vector out(d + 1);
    for (auto i : batch.indices) {
        const auto& s = dataset()[i];
        const double p = sigmoid(logit(w, s.features));
        double xv = v[d];
        for (std::size_t j = 0; j < d; ++j) xv += s.features[j] * v[j];
        const double c = p * (1.0 - p) * xv;
        for (std::size_t j = 0; j < d; ++j) out[j] += c * s.features[j];
        out[d] += c;
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t j = 0; j <= d; ++j) out[j] = out[j] * inv_b + l2_ * v[j];
    return out;
}

double LogisticModel::predict(const Vector& w, const Vector& features) const {
    return sigmoid(logit(w, features));
}

Vector LogisticModel::initial_params(RngStream&) const { return Vector(param_count()); }

// ---------------------------------------------------------------------- mlp

MlpModel::MlpModel(std::shared_ptr<const Dataset> data, std::size_t hidden_width)
    : LossModel(std::move(data)), hidden_(hidden_width) {
    if (hidden_ == 0) throw InvalidArgument("mlp: hidden width must be at least 1");
    if (dataset().kind() != TaskKind::classification) throw InvalidArgument("mlp: dataset must be 0/1 labelled");
}

std::size_t MlpModel::param_count() const { return hidden_ * dataset().feature_dim() + 2 * hidden_ + 1; }

double MlpModel::forward(const Vector& w, const Vector& x, std::vector<double>& hidden) const {
    const std::size_t d = x.size();
    const std::size_t b1 = hidden_ * d;
    const std::size_t w2 = b1 + hidden_;
    const std::size_t b2 = w2 + hidden_;
    hidden.resize(hidden_);
    double z = w[b2];
    for (std::size_t h = 0; h < hidden_; ++h) {
        double pre = w[b1 + h];
        for (std::size_t j = 0; j < d; ++j) pre += w[h * d + j] * x[j];
        hidden[h] = std::tanh(pre);
        z += w[w2 + h] * hidden[h];
    }
    return z;
}

double MlpModel::sample_loss(const Vector& w, std::size_t index) const {
    const auto& s = dataset()[index];
    std::vector<double> hidden;
    const double z = forward(w, s.features, hidden);
    return softplus(z) - s.target * z;
}

Vector MlpModel::gradient(const Vector& w, const MiniBatch& batch) const {
    check_args(w, batch);
    const std::size_t d = dataset().feature_dim();
    const std::size_t b1 = hidden_ * d;
    const std::size_t w2 = b1 + hidden_;
    const std::size_t b2 = w2 + hidden_;
    Vector g(param_count());
    std::vector<double> hidden;
    for (auto i : batch.indices) {
        const auto& s = dataset()[i];
        const double dz = sigmoid(forward(w, s.features, hidden)) - s.target;
        g[b2] += dz;
        for (std::size_t h = 0; h < hidden_; ++h) {
            g[w2 + h] += dz * hidden[h];
            const double dpre = dz * w[w2 + h] * (1.0 - hidden[h] * hidden[h]);
            g[b1 + h] += dpre;
            for (std::size_t j = 0; j < d; ++j) g[h * d + j] += dpre * s.features[j];
        }
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (auto& x : g) x *= inv_b;
    return g;
}

double MlpModel::predict(const Vector& w, const Vector& features) const {
    std::vector<double> hidden;
    return sigmoid(forward(w, features, hidden));
}

Vector MlpModel::initial_params(RngStream& rng) const {
    const std::size_t d = dataset().feature_dim();
    Vector w(param_count());
    const double s1 = 1.0 / std::sqrt(static_cast<double>(d));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
    for (std::size_t k = 0; k < hidden_ * d; ++k) w[k] = s1 * rng.normal();
    const std::size_t w2 = hidden_ * d + hidden_;
    for (std::size_t h = 0; h < hidden_; ++h) w[w2 + h] = s2 * rng.normal();
    return w;
}

} // namespace nopt
