#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "nopt/vector.hpp"

namespace nopt {

// Seeded random stream. Identical seeds give identical sequences; the
// distributions below are written out here rather than taken from <random>
// so the sequences do not depend on the standard library build.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0);

    std::uint64_t seed() const noexcept { return seed_; }

    // Independent stream keyed by (purpose, index), derived from this stream's
    // seed only; drawing from the parent does not change it.
    RngStream substream(std::string_view purpose, std::uint64_t index = 0) const;

    std::uint64_t next_u64() { return engine_(); }
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double normal();                        // N(0, 1)
    std::size_t index(std::size_t n);       // uniform in [0, n)

    Vector normal_vector(std::size_t n, double stddev = 1.0);
    Vector unit_vector(std::size_t n);

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index);

} // namespace nopt
