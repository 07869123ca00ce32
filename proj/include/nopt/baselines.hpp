#pragma once

#include <optional>
#include <string>

#include "nopt/vector.hpp"

namespace nopt {

enum class BaselineKind { sgd, momentum, adam, rmsprop };

std::string to_string(BaselineKind k);
std::optional<BaselineKind> parse_baseline_kind(const std::string& s);

struct BaselineSettings {
    double momentum = 0.9;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double rmsprop_decay = 0.9;
    double rmsprop_epsilon = 1e-10;
};

// Accumulators for the first-order optimizers. `first` holds the momentum
// displacement (momentum), the first moment (adam); `second` holds the second
// moment (adam) or the decayed squared gradient (rmsprop).
struct OptimizerState {
    BaselineKind kind = BaselineKind::sgd;
    BaselineSettings settings;
    Vector first;
    Vector second;
    long step = 0;
};

OptimizerState make_optimizer_state(BaselineKind kind, std::size_t param_count, const BaselineSettings& settings = {});

// Each step validates sizes and rejects non-finite gradients before touching
// `state` or `w`.
void sgd_step(OptimizerState& state, Vector& w, const Vector& grad, double lr);
// m <- mu m - lr g;  w <- w + m
void momentum_step(OptimizerState& state, Vector& w, const Vector& grad, double lr);
void adam_step(OptimizerState& state, Vector& w, const Vector& grad, double lr);
void rmsprop_step(OptimizerState& state, Vector& w, const Vector& grad, double lr);

// Dispatches on state.kind.
void baseline_step(OptimizerState& state, Vector& w, const Vector& grad, double lr);

} // namespace nopt
