#include "nopt/neumann.hpp"

#include <algorithm>
#include <cmath>

#include "nopt/errors.hpp"

namespace nopt {

std::optional<EtaMode> parse_eta_mode(const std::string& s) {
    if (s == "schedule") return EtaMode::schedule;
    if (s == "inverse_t") return EtaMode::inverse_t;
    return std::nullopt;
}

std::optional<RegularizerAnchor> parse_anchor(const std::string& s) {
    if (s == "displaced") return RegularizerAnchor::displaced;
    if (s == "implied") return RegularizerAnchor::implied;
    return std::nullopt;
}

std::string to_string(EtaMode m) { return m == EtaMode::schedule ? "schedule" : "inverse_t"; }
std::string to_string(RegularizerAnchor a) { return a == RegularizerAnchor::displaced ? "displaced" : "implied"; }

void NeumannHyperParams::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
    if (!(beta_per_variable >= 0.0) || !std::isfinite(beta_per_variable)) throw InvalidArgument("beta must be >= 0");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must be in [0,1)");
    if (!(mu_min >= 0.0 && mu_min <= mu_max && mu_max < 1.0)) {
        throw InvalidArgument("mu bounds must satisfy 0 <= mu_min <= mu_max < 1");
    }
    if (k0_epochs == 0) throw InvalidArgument("k0_epochs must be at least 1");
}

Vector regularized_gradient(const Vector& grad, const Vector& w, const Vector& v, double alpha, double beta,
                            double epsilon_guard) {
    require_same_size(grad, w, "regularized_gradient");
    require_same_size(w, v, "regularized_gradient");
    require_finite(grad, "regularized_gradient: gradient");
    require_finite(w, "regularized_gradient: weights");
    require_finite(v, "regularized_gradient: moving average");

    const Vector delta = sub(w, v);
    const double r = norm(delta);
    if (r <= epsilon_guard || r == 0.0) return grad;
    const double coef = (alpha * r * r - beta / (r * r)) / r;
    return lincomb(1.0, grad, coef, delta);
}

double mu_at(long t, const NeumannHyperParams& hp, std::size_t steps_per_epoch) {
    if (t < 1) throw InvalidArgument("mu_at: step must be >= 1");
    if (steps_per_epoch == 0) throw InvalidArgument("mu_at: steps_per_epoch must be positive");
    const double e = static_cast<double>(t) / static_cast<double>(steps_per_epoch);
    return std::clamp(1.0 - 1.0 / (1.0 + e), hp.mu_min, hp.mu_max);
}

double neumann_eta(long t, const NeumannSettings& s) {
    if (s.hp.eta_mode == EtaMode::inverse_t && t > static_cast<long>(s.hp.burnin_epochs * s.lr.steps_per_epoch)) {
        const double e = static_cast<double>(t) / static_cast<double>(s.lr.steps_per_epoch);
        return s.lr.base_lr / (1.0 + e);
    }
    return lr_at(s.lr, t);
}

NeumannState make_neumann_state(const Vector& w0, const NeumannSettings& settings) {
    settings.hp.validate();
    settings.lr.validate();
    require_finite(w0, "initial weights");
    if (w0.empty()) throw InvalidArgument("initial weights must be nonempty");

    const std::size_t n = w0.size();
    NeumannState s;
    s.w = w0;
    s.m = Vector(n);
    s.v = w0;
    s.beta = settings.hp.beta_per_variable * static_cast<double>(n);
    s.epsilon_guard = 1e-12 * std::sqrt(static_cast<double>(n));
    s.burnin_steps = static_cast<long>(settings.hp.burnin_epochs * settings.lr.steps_per_epoch);
    s.reset_period = static_cast<long>(settings.hp.k0_epochs * settings.lr.steps_per_epoch);
    s.next_reset = 1;
    s.phase = s.burnin_steps > 0 ? NeumannPhase::burnin : NeumannPhase::main;
    return s;
}

NeumannStepInfo burn_in_step(NeumannState& s, const LossModel& model, const MiniBatch& batch,
                             const NeumannSettings& settings) {
    if (s.phase != NeumannPhase::burnin) throw InvalidArgument("burn_in_step: state is past burn-in");
    const Vector g = model.gradient(s.w, batch);
    require_finite(g, "gradient");

    NeumannStepInfo info;
    ++s.t;
    info.lr = lr_at(settings.lr, s.t);
    info.grad_norm = norm(g);
    axpy(-info.lr, g, s.w);
    s.v = s.w;
    if (s.t >= s.burnin_steps) {
        s.phase = NeumannPhase::main;
        s.m = Vector(s.w.size());
        s.main_step = 0;
        s.next_reset = 1;
    }
    return info;
}

NeumannStepInfo neumann_step(NeumannState& s, const LossModel& model, const MiniBatch& batch,
                             const NeumannSettings& settings) {
    if (s.phase != NeumannPhase::main) throw InvalidArgument("neumann_step: state is still in burn-in");
    const auto& hp = settings.hp;
    const Vector g = model.gradient(s.w, batch);
    require_finite(g, "gradient");

    const long t = s.t + 1;
    const long k = s.main_step + 1;
    const double eta = neumann_eta(t, settings);
    const double mu = mu_at(k, hp, settings.lr.steps_per_epoch);

    NeumannStepInfo info;
    info.lr = eta;
    info.mu = mu;
    info.grad_norm = norm(g);

    Vector m;
    if (k == s.next_reset) {
        m = scale(-eta, g);
        info.reset = true;
    } else {
        const Vector anchor = hp.anchor == RegularizerAnchor::displaced ? s.w : lincomb(1.0, s.w, -s.mu, s.m);
        const Vector d = regularized_gradient(g, anchor, s.v, hp.alpha, s.beta, s.epsilon_guard);
        m = lincomb(mu, s.m, -eta, d);
        Vector w = s.w;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += mu * m[i] - eta * d[i];
        if (!all_finite(w)) throw DivergenceError("neumann_step: non-finite weights at step " + std::to_string(t), t);
        s.w = std::move(w);
        const Vector a = hp.anchor == RegularizerAnchor::displaced ? s.w : lincomb(1.0, s.w, -mu, m);
        for (std::size_t i = 0; i < a.size(); ++i) s.v[i] = a[i] + hp.gamma * (s.v[i] - a[i]);
    }

    const double m_norm = norm(m);
    if (!std::isfinite(m_norm) || m_norm > kNeumannDivergenceNorm) {
        throw DivergenceError("neumann_step: Neumann iterate diverged at step " + std::to_string(t), t);
    }

    s.m = std::move(m);
    s.mu = mu;
    s.t = t;
    s.main_step = k;
    if (info.reset) {
        s.next_reset = k + s.reset_period;
        if (hp.k_doubling) s.reset_period *= 2;
    }
    return info;
}

NeumannStepInfo neumann_advance(NeumannState& state, const LossModel& model, const MiniBatch& batch,
                                const NeumannSettings& settings) {
    return state.phase == NeumannPhase::burnin ? burn_in_step(state, model, batch, settings)
                                               : neumann_step(state, model, batch, settings);
}

Vector neumann_finalize(const NeumannState& state) { return lincomb(1.0, state.w, -state.mu, state.m); }

void IdealizedParams::validate() const {
    if (!(eta_in > 0.0) || !(eta_out > 0.0)) throw InvalidArgument("idealized: learning rates must be positive");
    if (inner_iters == 0) throw InvalidArgument("idealized: K must be at least 1");
    if (batch_size == 0) throw InvalidArgument("idealized: batch size must be at least 1");
}

Vector idealized_neumann_run(const LossModel& model, const Vector& w0, const IdealizedParams& p, RngStream rng) {
    p.validate();
    if (w0.size() != model.param_count()) throw DimensionError("idealized: initial weights have wrong length");
    MiniBatchSampler sampler(model.dataset(), p.batch_size, std::move(rng));

    Vector w = w0;
    for (std::size_t t = 1; t <= p.outer_steps; ++t) {
        const MiniBatch batch = sampler.next();
        Vector m = scale(-1.0, model.gradient(w, batch));
        for (std::size_t k = 0; k < p.inner_iters; ++k) {
            const Vector g = model.gradient(lincomb(1.0, w, p.eta_in, m), batch);
            for (std::size_t i = 0; i < m.size(); ++i) m[i] -= g[i];
            const double m_norm = norm(m);
            if (!std::isfinite(m_norm) || m_norm > kNeumannDivergenceNorm) {
                throw DivergenceError("idealized Neumann run diverged at outer step " + std::to_string(t),
                                      static_cast<long>(t));
            }
        }
        axpy(p.eta_out, m, w);
    }
    return w;
}

DirectionCheck convexified_direction_check(const LossModel& model, const Vector& w, const MiniBatch& batch, double mu,
                                           double eta, std::size_t k_steps) {
    if (!model.has_exact_hvp()) throw InvalidArgument("convexified_direction_check: model has no exact HVP");
    const Vector g = model.gradient(w, batch);
    Vector by_gradient = scale(-eta, g);
    Vector by_matrix = by_gradient;
    for (std::size_t k = 0; k < k_steps; ++k) {
        const Vector g_ahead = model.gradient(lincomb(1.0, w, mu, by_gradient), batch);
        by_gradient = lincomb(mu, by_gradient, -eta, g_ahead);

        Vector hm = norm(by_matrix) > 0.0 ? model.hvp(w, batch, by_matrix) : Vector(w.size());
        Vector taylor = lincomb(1.0, g, mu, hm);
        by_matrix = lincomb(mu, by_matrix, -eta, taylor);
    }
    return {sub(by_gradient, by_matrix), by_gradient, by_matrix};
}

} // namespace nopt
