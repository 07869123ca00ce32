#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "nopt/dataset.hpp"
#include "nopt/model.hpp"
#include "nopt/rng.hpp"
#include "nopt/schedule.hpp"
#include "nopt/vector.hpp"

namespace nopt {

inline constexpr double kNeumannDivergenceNorm = 1e12;

// How the learning rate evolves during the main phase.
enum class EtaMode {
    schedule,   // the harness LrSchedule (warm-up ramp, then staircase decay)
    inverse_t,  // base_lr / (1 + epochs elapsed)
};

// Which point the regularizers and the moving average are anchored to.
// `displaced` uses the stored (look-ahead) weights exactly as the flattened
// update is written; `implied` uses the undisplaced weights w - mu m.
enum class RegularizerAnchor { displaced, implied };

std::optional<EtaMode> parse_eta_mode(const std::string& s);
std::optional<RegularizerAnchor> parse_anchor(const std::string& s);
std::string to_string(EtaMode m);
std::string to_string(RegularizerAnchor a);

struct NeumannHyperParams {
    double alpha = 1e-7;              // cubic regularizer
    double beta_per_variable = 1e-5;  // repulsive regularizer, multiplied by param_count
    double gamma = 0.99;              // moving average factor
    double mu_min = 0.5;
    double mu_max = 0.9;
    std::size_t burnin_epochs = 5;
    std::size_t k0_epochs = 10;       // first reset period
    bool k_doubling = true;
    EtaMode eta_mode = EtaMode::schedule;
    RegularizerAnchor anchor = RegularizerAnchor::displaced;

    void validate() const;
};

struct NeumannSettings {
    NeumannHyperParams hp;
    LrSchedule lr;  // lr.steps_per_epoch is the epoch clock for every schedule
};

enum class NeumannPhase { burnin, main };

struct NeumannState {
    Vector w;  // displaced parameters
    Vector m;  // Neumann iterate
    Vector v;  // moving average of weights
    long t = 0;             // steps taken, burn-in included
    long main_step = 0;     // main-phase steps taken
    long burnin_steps = 0;  // length of the burn-in phase in steps
    long next_reset = 1;    // main_step at which the next reset fires
    long reset_period = 1;  // current K in steps
    double mu = 0.0;        // momentum used by the latest main-phase step
    double beta = 0.0;      // beta_per_variable * param_count
    double epsilon_guard = 0.0;
    NeumannPhase phase = NeumannPhase::burnin;
};

struct NeumannStepInfo {
    double lr = 0.0;
    double mu = 0.0;
    double grad_norm = 0.0;
    bool reset = false;
};

// Gradient of f + alpha/3 ||w - v||^3 + beta / ||w - v||:
//   grad + (alpha ||d||^2 - beta / ||d||^2) d / ||d||,  d = w - v.
// Returns grad unchanged when ||d|| <= epsilon_guard.
Vector regularized_gradient(const Vector& grad, const Vector& w, const Vector& v, double alpha, double beta,
                            double epsilon_guard);

// mu(t) = clamp(1 - 1/(1 + t/steps_per_epoch), mu_min, mu_max), t >= 1.
double mu_at(long t, const NeumannHyperParams& hp, std::size_t steps_per_epoch);

// Learning rate for global step t under the configured EtaMode.
double neumann_eta(long t, const NeumannSettings& settings);

NeumannState make_neumann_state(const Vector& w0, const NeumannSettings& settings);

// Plain SGD with v tracking w. Moves to the main phase once burn-in is
// complete, with m = 0 and a reset scheduled for the first main step.
NeumannStepInfo burn_in_step(NeumannState& state, const LossModel& model, const MiniBatch& batch,
                             const NeumannSettings& settings);

// One step of the flattened optimizer on a fresh mini-batch. On reset steps
// only m changes: m = -eta * grad. Otherwise
//   d = regularized gradient at the anchor point
//   m <- mu m - eta d
//   w <- w + mu m - eta d
//   v <- a + gamma (v - a),  a the anchor point after the update.
// Reset periods start at k0_epochs * steps_per_epoch and double after every
// reset when k_doubling is set.
NeumannStepInfo neumann_step(NeumannState& state, const LossModel& model, const MiniBatch& batch,
                             const NeumannSettings& settings);

// burn_in_step or neumann_step depending on state.phase.
NeumannStepInfo neumann_advance(NeumannState& state, const LossModel& model, const MiniBatch& batch,
                                const NeumannSettings& settings);

// Undisplaced weights w - mu m.
Vector neumann_finalize(const NeumannState& state);

// Two-loop form: per outer step one batch is frozen, m starts at -grad(w) and
// m <- m - grad(w + eta_in m) runs K times, then w <- w + eta_out m.
struct IdealizedParams {
    double eta_in = 0.1;
    double eta_out = 0.1;
    std::size_t inner_iters = 10;  // K
    std::size_t batch_size = 1;    // B
    std::size_t outer_steps = 1;   // T

    void validate() const;
};

Vector idealized_neumann_run(const LossModel& model, const Vector& w0, const IdealizedParams& params, RngStream rng);

// Compares the gradient-evaluation form of the convexified inner recurrence
//   m_k = mu m_{k-1} - eta grad(w + mu m_{k-1})
// with its first-order matrix form
//   m_k = mu m_{k-1} - eta (grad(w) + mu H m_{k-1})
// starting from m_0 = -eta grad(w) and running both for k_steps.
struct DirectionCheck {
    Vector difference;     // gradient form minus matrix form
    Vector gradient_form;
    Vector matrix_form;
};

DirectionCheck convexified_direction_check(const LossModel& model, const Vector& w, const MiniBatch& batch, double mu,
                                           double eta, std::size_t k_steps);

} // namespace nopt
