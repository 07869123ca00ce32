#include "nopt/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <string_view>
#include <system_error>

#include "nopt/errors.hpp"

namespace nopt {

Dataset::Dataset(std::vector<Sample> samples, TaskKind kind) : samples_(std::move(samples)), kind_(kind) {
    if (samples_.empty()) throw InvalidArgument("empty dataset");
    feature_dim_ = samples_.front().features.size();
    if (feature_dim_ == 0) throw InvalidArgument("dataset samples must have at least one feature");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (s.features.size() != feature_dim_) {
            throw DimensionError("sample " + std::to_string(i) + " has " + std::to_string(s.features.size()) +
                                 " features, expected " + std::to_string(feature_dim_));
        }
        require_finite(s.features, "sample features");
        if (kind_ == TaskKind::classification && s.target != 0.0 && s.target != 1.0) {
            throw InvalidArgument("sample " + std::to_string(i) + ": classification targets must be 0 or 1");
        }
    }
}

MiniBatch full_batch(std::size_t n) {
    MiniBatch b;
    b.indices.resize(n);
    std::iota(b.indices.begin(), b.indices.end(), std::size_t{0});
    return b;
}

MiniBatch batch_of(std::vector<std::size_t> indices) {
    if (indices.empty()) throw InvalidArgument("mini-batch must be nonempty");
    return MiniBatch{std::move(indices)};
}

MiniBatchSampler::MiniBatchSampler(std::vector<std::size_t> pool, std::size_t batch_size, RngStream rng)
    : pool_(std::move(pool)), batch_size_(batch_size), rng_(std::move(rng)) {
    if (batch_size_ == 0) throw InvalidArgument("batch size must be at least 1");
    if (batch_size_ > pool_.size()) {
        throw InvalidArgument("batch size " + std::to_string(batch_size_) + " exceeds sample count " +
                              std::to_string(pool_.size()));
    }
}

MiniBatchSampler::MiniBatchSampler(const Dataset& data, std::size_t batch_size, RngStream rng)
    : MiniBatchSampler(full_batch(data.size()).indices, batch_size, std::move(rng)) {}

void MiniBatchSampler::reshuffle() {
    order_ = pool_;
    rng_.shuffle(order_);
    cursor_ = 0;
}

MiniBatch MiniBatchSampler::next() {
    if (!started_) {
        reshuffle();
        started_ = true;
    } else if (cursor_ + batch_size_ > order_.size()) {
        reshuffle();
        ++epoch_;
    }
    MiniBatch b;
    b.indices.assign(order_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                     order_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch_size_));
    cursor_ += batch_size_;
    return b;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

std::shared_ptr<const Dataset> load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty dataset");
    const std::size_t header_fields = split_fields(trim(line)).size();
    if (header_fields < 2) throw FormatError(path.string() + ": header must name at least one feature and a target");

    std::vector<Sample> samples;
    std::size_t line_no = 1;
    bool all_binary = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(trim(line));
        const std::size_t row = samples.size() + 1;
        if (fields.size() != header_fields) {
            throw FormatError(path.string() + ": row " + std::to_string(row) + " (line " + std::to_string(line_no) +
                              ") has " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header_fields));
        }
        Sample s;
        s.features = Vector(header_fields - 1);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v = 0.0;
            if (!parse_double(fields[i], v)) {
                throw FormatError(path.string() + ": row " + std::to_string(row) + " (line " +
                                  std::to_string(line_no) + ") field " + std::to_string(i + 1) +
                                  " is not a number: '" + std::string(trim(fields[i])) + "'");
            }
            if (i + 1 < fields.size()) {
                s.features[i] = v;
            } else {
                s.target = v;
            }
        }
        if (!all_finite(s.features) || !std::isfinite(s.target)) {
            throw FormatError(path.string() + ": row " + std::to_string(row) + " contains a non-finite value");
        }
        all_binary = all_binary && (s.target == 0.0 || s.target == 1.0);
        samples.push_back(std::move(s));
    }
    if (samples.empty()) throw FormatError(path.string() + ": empty dataset");
    return std::make_shared<const Dataset>(std::move(samples),
                                           all_binary ? TaskKind::classification : TaskKind::regression);
}

} // namespace nopt
