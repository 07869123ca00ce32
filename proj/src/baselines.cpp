#include "nopt/baselines.hpp"

#include <cmath>

#include "nopt/errors.hpp"

namespace nopt {
namespace {

void check_step(const OptimizerState& state, BaselineKind expected, const Vector& w, const Vector& grad) {
    if (state.kind != expected) throw InvalidArgument("optimizer state is for " + to_string(state.kind));
    require_same_size(w, grad, "optimizer step");
    require_finite(grad, "gradient");
}

} // namespace

std::string to_string(BaselineKind k) {
    switch (k) {
    case BaselineKind::sgd: return "sgd";
    case BaselineKind::momentum: return "momentum";
    case BaselineKind::adam: return "adam";
    case BaselineKind::rmsprop: return "rmsprop";
    }
    return "unknown";
}

std::optional<BaselineKind> parse_baseline_kind(const std::string& s) {
    if (s == "sgd") return BaselineKind::sgd;
    if (s == "momentum") return BaselineKind::momentum;
    if (s == "adam") return BaselineKind::adam;
    if (s == "rmsprop") return BaselineKind::rmsprop;
    return std::nullopt;
}

OptimizerState make_optimizer_state(BaselineKind kind, std::size_t param_count, const BaselineSettings& settings) {
    OptimizerState s;
    s.kind = kind;
    s.settings = settings;
    if (kind == BaselineKind::momentum || kind == BaselineKind::adam) s.first = Vector(param_count);
    if (kind == BaselineKind::adam || kind == BaselineKind::rmsprop) s.second = Vector(param_count);
    return s;
}

void sgd_step(OptimizerState& state, Vector& w, const Vector& grad, double lr) {
    check_step(state, BaselineKind::sgd, w, grad);
    axpy(-lr, grad, w);
    ++state.step;
}

void momentum_step(OptimizerState& state, Vector& w, const Vector& grad, double lr) {
    check_step(state, BaselineKind::momentum, w, grad);
    require_same_size(w, state.first, "momentum buffer");
    const double mu = state.settings.momentum;
    for (std::size_t i = 0; i < w.size(); ++i) {
        state.first[i] = mu * state.first[i] - lr * grad[i];
        w[i] += state.first[i];
    }
    ++state.step;
}

void adam_step(OptimizerState& state, Vector& w, const Vector& grad, double lr) {
    check_step(state, BaselineKind::adam, w, grad);
    require_same_size(w, state.first, "adam first moment");
    const auto& c = state.settings;
    const long t = state.step + 1;
    const double bias1 = 1.0 - std::pow(c.adam_beta1, static_cast<double>(t));
    const double bias2 = 1.0 - std::pow(c.adam_beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < w.size(); ++i) {
        state.first[i] = c.adam_beta1 * state.first[i] + (1.0 - c.adam_beta1) * grad[i];
        state.second[i] = c.adam_beta2 * state.second[i] + (1.0 - c.adam_beta2) * grad[i] * grad[i];
        const double m_hat = state.first[i] / bias1;
        const double v_hat = state.second[i] / bias2;
        w[i] -= lr * m_hat / (std::sqrt(v_hat) + c.adam_epsilon);
    }
    state.step = t;
}

void rmsprop_step(OptimizerState& state, Vector& w, const Vector& grad, double lr) {
    check_step(state, BaselineKind::rmsprop, w, grad);
    require_same_size(w, state.second, "rmsprop accumulator");
    const auto& c = state.settings;
    for (std::size_t i = 0; i < w.size(); ++i) {
        state.second[i] = c.rmsprop_decay * state.second[i] + (1.0 - c.rmsprop_decay) * grad[i] * grad[i];
        w[i] -= lr * grad[i] / (std::sqrt(state.second[i]) + c.rmsprop_epsilon);
    }
    ++state.step;
}

void baseline_step(OptimizerState& state, Vector& w, const Vector& grad, double lr) {
    switch (state.kind) {
    case BaselineKind::sgd: return sgd_step(state, w, grad, lr);
    case BaselineKind::momentum: return momentum_step(state, w, grad, lr);
    case BaselineKind::adam: return adam_step(state, w, grad, lr);
    case BaselineKind::rmsprop: return rmsprop_step(state, w, grad, lr);
    }
}

} // namespace nopt
