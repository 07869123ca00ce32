#include "nopt/schedule.hpp"

#include <cmath>

#include "nopt/errors.hpp"

namespace nopt {

void LrSchedule::validate() const {
    if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw InvalidArgument("lr.base must be positive");
    if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw InvalidArgument("lr.decay_factor must be in (0,1]");
    if (steps_per_epoch == 0) throw InvalidArgument("steps_per_epoch must be positive");
}

double lr_at(const LrSchedule& s, long t) {
    if (t < 1) throw InvalidArgument("lr_at: step must be >= 1");
    const auto step = static_cast<std::size_t>(t);
    const std::size_t warmup_steps = s.warmup_epochs * s.steps_per_epoch;
    if (step <= warmup_steps) return s.base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
    if (s.decay_every_epochs == 0 || s.decay_factor == 1.0) return s.base_lr;
    const std::size_t epoch = (step - 1) / s.steps_per_epoch;
    const std::size_t since = epoch >= s.warmup_epochs ? epoch - s.warmup_epochs : 0;
    const auto k = static_cast<double>(since / s.decay_every_epochs);
    return s.base_lr * std::pow(s.decay_factor, k);
}

double linearly_scaled_lr(double base_lr, std::size_t batch_size, std::size_t reference_batch) {
    if (reference_batch == 0) return base_lr;
    return base_lr * static_cast<double>(batch_size) / static_cast<double>(reference_batch);
}

} // namespace nopt
