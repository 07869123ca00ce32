#pragma once

#include <cstddef>

namespace nopt {

// Linear warm-up followed by staircase decay, with time measured in epochs.
struct LrSchedule {
    double base_lr = 0.1;
    std::size_t warmup_epochs = 0;
    std::size_t decay_every_epochs = 0;  // 0 disables decay
    double decay_factor = 1.0;
    std::size_t steps_per_epoch = 1;

    void validate() const;
};

// Learning rate for the 1-based step t. During warm-up the rate ramps
// linearly from base_lr / warmup_steps (t = 1) to base_lr (t = warmup_steps).
// Afterwards, with e = floor((t - 1) / steps_per_epoch) the 0-based epoch,
// lr = base_lr * decay_factor ^ floor((e - warmup_epochs) / decay_every_epochs).
double lr_at(const LrSchedule& schedule, long t);

// Base rate scaled by batch_size / reference_batch; unchanged when the
// reference is 0.
double linearly_scaled_lr(double base_lr, std::size_t batch_size, std::size_t reference_batch);

} // namespace nopt
