#include "nopt/problems.hpp"

#include <cmath>

#include "nopt/errors.hpp"

namespace nopt {

Problem make_quadratic_problem(const Vector& spectrum, const Vector& w_star, double noise, std::size_t n_samples,
                               std::uint64_t seed) {
    if (spectrum.empty()) throw InvalidArgument("quadratic: spectrum must be nonempty");
    require_same_size(spectrum, w_star, "quadratic: w_star");
    if (n_samples == 0) throw InvalidArgument("quadratic: need at least one sample");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("quadratic: noise must be finite and >= 0");

    const std::size_t n = spectrum.size();
    RngStream rng = RngStream(seed).substream("quadratic-noise");
    // Grid spacing: 2^-24 relative to the noise scale. Sums of up to ~2^22
    // such values stay exact in a double.
    const double quantum = noise > 0.0 ? std::ldexp(1.0, static_cast<int>(std::floor(std::log2(noise))) - 24) : 0.0;

    std::vector<Sample> samples(n_samples);
    for (std::size_t i = 0; i + 1 < n_samples; i += 2) {
        Vector xi(n);
        if (noise > 0.0) {
            for (auto& x : xi) x = std::round(noise * rng.normal() / quantum) * quantum;
        }
        samples[i].features = xi;
        samples[i + 1].features = scale(-1.0, xi);
    }
    if (n_samples % 2 == 1) samples.back().features = Vector(n);

    auto data = std::make_shared<const Dataset>(std::move(samples), TaskKind::regression);
    Vector initial = w_star;
    for (auto& x : initial) x += 1.0;
    auto model = std::make_shared<const QuadraticModel>(data, spectrum, w_star, std::move(initial));
    return {model, data};
}

Vector logspace(double lo, double hi, std::size_t count) {
    if (count == 0) throw InvalidArgument("logspace: count must be positive");
    if (!(lo > 0.0) || !(hi > 0.0)) throw InvalidArgument("logspace: bounds must be positive");
    Vector out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out[0] = lo;
    out[count - 1] = hi;
    return out;
}

std::shared_ptr<const Dataset> make_blob_dataset(std::size_t feature_dim, std::size_t n_samples, double separation,
                                                 std::uint64_t seed) {
    if (feature_dim == 0) throw InvalidArgument("logistic: feature_dim must be at least 1");
    if (n_samples < 2) throw InvalidArgument("logistic: need at least two samples");
    RngStream base(seed);
    RngStream dir_rng = base.substream("blob-direction");
    RngStream rng = base.substream("blob-samples");
    const Vector direction = dir_rng.unit_vector(feature_dim);

    std::vector<Sample> samples(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double label = static_cast<double>(i % 2);
        const double offset = (label == 1.0 ? 0.5 : -0.5) * separation;
        Vector x = rng.normal_vector(feature_dim);
        axpy(offset, direction, x);
        samples[i] = Sample{std::move(x), label};
    }
    return std::make_shared<const Dataset>(std::move(samples), TaskKind::classification);
}

Problem make_logistic_problem(std::size_t feature_dim, std::size_t n_samples, double separation, std::uint64_t seed) {
    auto data = make_blob_dataset(feature_dim, n_samples, separation, seed);
    return {std::make_shared<const LogisticModel>(data), data};
}

std::shared_ptr<const Dataset> make_xor_dataset(std::size_t feature_dim, std::size_t n_samples, std::uint64_t seed) {
    if (feature_dim == 0) throw InvalidArgument("mlp: feature_dim must be at least 1");
    if (n_samples == 0) throw InvalidArgument("mlp: need at least one sample");
    RngStream rng = RngStream(seed).substream("xor-samples");
    std::vector<Sample> samples(n_samples);
    for (auto& s : samples) {
        s.features = Vector(feature_dim);
        for (auto& x : s.features) x = rng.uniform(-1.0, 1.0);
        const double sign = feature_dim >= 2 ? s.features[0] * s.features[1] : s.features[0];
        s.target = sign > 0.0 ? 1.0 : 0.0;
    }
    return std::make_shared<const Dataset>(std::move(samples), TaskKind::classification);
}

Problem make_mlp_problem(std::size_t feature_dim, std::size_t hidden_width, std::size_t n_samples, std::uint64_t seed) {
    auto data = make_xor_dataset(feature_dim, n_samples, seed);
    return {std::make_shared<const MlpModel>(data, hidden_width), data};
}

std::string to_string(ProblemFamily f) {
    switch (f) {
    case ProblemFamily::quadratic: return "quadratic";
    case ProblemFamily::logistic: return "logistic";
    case ProblemFamily::mlp: return "mlp";
    }
    return "unknown";
}

std::optional<ProblemFamily> parse_problem_family(const std::string& s) {
    if (s == "quadratic") return ProblemFamily::quadratic;
    if (s == "logistic") return ProblemFamily::logistic;
    if (s == "mlp") return ProblemFamily::mlp;
    return std::nullopt;
}

Problem make_problem(const ProblemSpec& spec, std::uint64_t seed) {
    switch (spec.family) {
    case ProblemFamily::quadratic: {
        const Vector spectrum(spec.spectrum);
        RngStream rng = RngStream(seed).substream("quadratic-wstar");
        const Vector w_star = rng.normal_vector(spectrum.size());
        return make_quadratic_problem(spectrum, w_star, spec.noise, spec.n_samples, seed);
    }
    case ProblemFamily::logistic: {
        if (!spec.data_path.empty()) {
            auto data = load_csv(spec.data_path);
            return {std::make_shared<const LogisticModel>(data), data};
        }
        return make_logistic_problem(spec.feature_dim, spec.n_samples, spec.separation, seed);
    }
    case ProblemFamily::mlp: {
        if (!spec.data_path.empty()) {
            auto data = load_csv(spec.data_path);
            return {std::make_shared<const MlpModel>(data, spec.hidden_width), data};
        }
        return make_mlp_problem(spec.feature_dim, spec.hidden_width, spec.n_samples, seed);
    }
    }
    throw InvalidArgument("unknown problem family");
}

} // namespace nopt
