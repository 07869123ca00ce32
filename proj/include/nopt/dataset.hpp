#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <vector>

#include "nopt/rng.hpp"
#include "nopt/vector.hpp"

namespace nopt {

enum class TaskKind { classification, regression };

struct Sample {
    Vector features;
    double target = 0.0;  // 0/1 for classification
};

class Dataset {
public:
    Dataset(std::vector<Sample> samples, TaskKind kind);

    std::size_t size() const noexcept { return samples_.size(); }
    std::size_t feature_dim() const noexcept { return feature_dim_; }
    TaskKind kind() const noexcept { return kind_; }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    const std::vector<Sample>& samples() const noexcept { return samples_; }

private:
    std::vector<Sample> samples_;
    std::size_t feature_dim_ = 0;
    TaskKind kind_;
};

struct MiniBatch {
    std::vector<std::size_t> indices;
    std::size_t size() const noexcept { return indices.size(); }
};

MiniBatch full_batch(std::size_t n);
MiniBatch batch_of(std::vector<std::size_t> indices);

// Shuffled-epoch sampling: each epoch draws a fresh permutation of the pool
// and hands it out in consecutive chunks of `batch_size`. When the pool size
// is not a multiple of batch_size the leftover tail of the permutation is
// dropped, so every batch has exactly batch_size indices.
class MiniBatchSampler {
public:
    MiniBatchSampler(std::vector<std::size_t> pool, std::size_t batch_size, RngStream rng);
    MiniBatchSampler(const Dataset& data, std::size_t batch_size, RngStream rng);

    MiniBatch next();

    std::size_t batch_size() const noexcept { return batch_size_; }
    std::size_t batches_per_epoch() const noexcept { return pool_.size() / batch_size_; }
    std::size_t epoch() const noexcept { return epoch_; }

private:
    void reshuffle();

    std::vector<std::size_t> pool_;
    std::vector<std::size_t> order_;
    std::size_t batch_size_;
    std::size_t cursor_ = 0;
    std::size_t epoch_ = 0;
    bool started_ = false;
    RngStream rng_;
};

// Reads `f1,...,fd,target` rows after a single header line. Targets that are
// all 0 or 1 make a classification dataset; anything else is regression.
std::shared_ptr<const Dataset> load_csv(const std::filesystem::path& path);

} // namespace nopt
