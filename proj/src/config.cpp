#include "nopt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "nopt/errors.hpp"

namespace nopt {

std::string to_string(OptimizerKind k) {
    switch (k) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::momentum: return "momentum";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::rmsprop: return "rmsprop";
    case OptimizerKind::neumann: return "neumann";
    }
    return "unknown";
}

std::optional<OptimizerKind> parse_optimizer_kind(const std::string& s) {
    if (s == "sgd") return OptimizerKind::sgd;
    if (s == "momentum") return OptimizerKind::momentum;
    if (s == "adam") return OptimizerKind::adam;
    if (s == "rmsprop") return OptimizerKind::rmsprop;
    if (s == "neumann") return OptimizerKind::neumann;
    return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v, std::size_t line) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
        throw ConfigError(key + ": expected a number, got '" + v + "'", line);
    }
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v, std::size_t line) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'", line);
    }
    return out;
}

std::size_t to_count(const std::string& key, const std::string& v, std::size_t line) {
    return static_cast<std::size_t>(to_u64(key, v, line));
}

bool to_bool(const std::string& key, const std::string& v, std::size_t line) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'", line);
}

std::vector<double> to_list(const std::string& key, const std::string& v, std::size_t line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item), line));
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers", line);
    return out;
}

void require(bool ok, const std::string& message, std::size_t line) {
    if (!ok) throw ConfigError(message, line);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value, std::size_t)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["name"] = [](auto& c, auto&, auto& v, auto) { c.name = v; };

        t["problem"] = [](auto& c, auto& k, auto& v, auto line) {
            auto f = parse_problem_family(v);
            require(f.has_value(), k + " must be one of quadratic, logistic, mlp", line);
            c.problem.family = *f;
        };
        t["problem.n_samples"] = [](auto& c, auto& k, auto& v, auto line) {
            c.problem.n_samples = to_count(k, v, line);
            require(c.problem.n_samples >= 1, "n_samples must be at least 1", line);
        };
        t["problem.spectrum"] = [](auto& c, auto& k, auto& v, auto line) { c.problem.spectrum = to_list(k, v, line); };
        t["problem.spectrum_logspace"] = [](auto& c, auto& k, auto& v, auto line) {
            auto parts = to_list(k, v, line);
            require(parts.size() == 3, k + " expects 'lo, hi, count'", line);
            require(parts[0] > 0.0 && parts[1] > 0.0, k + ": bounds must be positive", line);
            require(parts[2] >= 1.0 && parts[2] == std::floor(parts[2]), k + ": count must be a positive integer", line);
            const Vector s = logspace(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
            c.problem.spectrum = s.values();
        };
        t["problem.noise"] = [](auto& c, auto& k, auto& v, auto line) {
            c.problem.noise = to_double(k, v, line);
            require(c.problem.noise >= 0.0, "noise must be >= 0", line);
        };
        t["problem.feature_dim"] = [](auto& c, auto& k, auto& v, auto line) {
            c.problem.feature_dim = to_count(k, v, line);
            require(c.problem.feature_dim >= 1, "feature_dim must be at least 1", line);
        };
        t["problem.separation"] = [](auto& c, auto& k, auto& v, auto line) { c.problem.separation = to_double(k, v, line); };
        t["problem.hidden_width"] = [](auto& c, auto& k, auto& v, auto line) {
            c.problem.hidden_width = to_count(k, v, line);
            require(c.problem.hidden_width >= 1, "hidden_width must be at least 1", line);
        };
        t["problem.data"] = [](auto& c, auto&, auto& v, auto) { c.problem.data_path = v; };

        t["optimizer"] = [](auto& c, auto& k, auto& v, auto line) {
            auto o = parse_optimizer_kind(v);
            require(o.has_value(), k + " must be one of sgd, momentum, adam, rmsprop, neumann", line);
            c.optimizer = *o;
        };
        t["momentum.mu"] = [](auto& c, auto& k, auto& v, auto line) {
            c.baseline.momentum = to_double(k, v, line);
            require(c.baseline.momentum >= 0.0 && c.baseline.momentum < 1.0, "momentum.mu must be in [0,1)", line);
        };
        t["adam.beta1"] = [](auto& c, auto& k, auto& v, auto line) {
            c.baseline.adam_beta1 = to_double(k, v, line);
            require(c.baseline.adam_beta1 >= 0.0 && c.baseline.adam_beta1 < 1.0, "adam.beta1 must be in [0,1)", line);
        };
        t["adam.beta2"] = [](auto& c, auto& k, auto& v, auto line) {
            c.baseline.adam_beta2 = to_double(k, v, line);
            require(c.baseline.adam_beta2 >= 0.0 && c.baseline.adam_beta2 < 1.0, "adam.beta2 must be in [0,1)", line);
        };
        t["adam.epsilon"] = [](auto& c, auto& k, auto& v, auto line) {
            c.baseline.adam_epsilon = to_double(k, v, line);
            require(c.baseline.adam_epsilon > 0.0, "adam.epsilon must be positive", line);
        };
        t["rmsprop.decay"] = [](auto& c, auto& k, auto& v, auto line) {
            c.baseline.rmsprop_decay = to_double(k, v, line);
            require(c.baseline.rmsprop_decay >= 0.0 && c.baseline.rmsprop_decay < 1.0, "rmsprop.decay must be in [0,1)",
                    line);
        };
        t["rmsprop.epsilon"] = [](auto& c, auto& k, auto& v, auto line) {
            c.baseline.rmsprop_epsilon = to_double(k, v, line);
            require(c.baseline.rmsprop_epsilon > 0.0, "rmsprop.epsilon must be positive", line);
        };

        t["neumann.alpha"] = [](auto& c, auto& k, auto& v, auto line) {
            c.neumann.alpha = to_double(k, v, line);
            require(c.neumann.alpha >= 0.0, "alpha must be >= 0", line);
        };
        t["neumann.beta"] = [](auto& c, auto& k, auto& v, auto line) {
            c.neumann.beta_per_variable = to_double(k, v, line);
            require(c.neumann.beta_per_variable >= 0.0, "beta must be >= 0", line);
        };
        t["neumann.gamma"] = [](auto& c, auto& k, auto& v, auto line) {
            c.neumann.gamma = to_double(k, v, line);
            require(c.neumann.gamma >= 0.0 && c.neumann.gamma < 1.0, "gamma must be in [0,1)", line);
        };
        t["neumann.mu_min"] = [](auto& c, auto& k, auto& v, auto line) {
            c.neumann.mu_min = to_double(k, v, line);
            require(c.neumann.mu_min >= 0.0 && c.neumann.mu_min < 1.0, "mu_min must be in [0,1)", line);
        };
        t["neumann.mu_max"] = [](auto& c, auto& k, auto& v, auto line) {
            c.neumann.mu_max = to_double(k, v, line);
            require(c.neumann.mu_max >= 0.0 && c.neumann.mu_max < 1.0, "mu_max must be in [0,1)", line);
        };
        t["neumann.burnin_epochs"] = [](auto& c, auto& k, auto& v, auto line) {
            c.neumann.burnin_epochs = to_count(k, v, line);
        };
        t["neumann.k0_epochs"] = [](auto& c, auto& k, auto& v, auto line) {
            c.neumann.k0_epochs = to_count(k, v, line);
            require(c.neumann.k0_epochs >= 1, "k0_epochs must be at least 1", line);
        };
        t["neumann.k_doubling"] = [](auto& c, auto& k, auto& v, auto line) { c.neumann.k_doubling = to_bool(k, v, line); };
        t["neumann.eta_mode"] = [](auto& c, auto& k, auto& v, auto line) {
            auto m = parse_eta_mode(v);
            require(m.has_value(), k + " must be schedule or inverse_t", line);
            c.neumann.eta_mode = *m;
        };
        t["neumann.anchor"] = [](auto& c, auto& k, auto& v, auto line) {
            auto a = parse_anchor(v);
            require(a.has_value(), k + " must be displaced or implied", line);
            c.neumann.anchor = *a;
        };

        t["lr.base"] = [](auto& c, auto& k, auto& v, auto line) {
            c.lr.base_lr = to_double(k, v, line);
            require(c.lr.base_lr > 0.0, "lr.base must be positive", line);
        };
        t["lr.warmup_epochs"] = [](auto& c, auto& k, auto& v, auto line) { c.lr.warmup_epochs = to_count(k, v, line); };
        t["lr.decay_every_epochs"] = [](auto& c, auto& k, auto& v, auto line) {
            c.lr.decay_every_epochs = to_count(k, v, line);
        };
        t["lr.decay_factor"] = [](auto& c, auto& k, auto& v, auto line) {
            c.lr.decay_factor = to_double(k, v, line);
            require(c.lr.decay_factor > 0.0 && c.lr.decay_factor <= 1.0, "lr.decay_factor must be in (0,1]", line);
        };
        t["lr.linear_scaling_reference"] = [](auto& c, auto& k, auto& v, auto line) {
            c.lr_linear_scaling_reference = to_count(k, v, line);
        };

        t["batch_size"] = [](auto& c, auto& k, auto& v, auto line) {
            c.batch_size = to_count(k, v, line);
            require(c.batch_size >= 1, "batch_size must be at least 1", line);
        };
        t["epochs"] = [](auto& c, auto& k, auto& v, auto line) { c.epochs = to_count(k, v, line); };
        t["seed"] = [](auto& c, auto& k, auto& v, auto line) { c.seed = to_u64(k, v, line); };
        t["eval_fraction"] = [](auto& c, auto& k, auto& v, auto line) {
            c.eval_fraction = to_double(k, v, line);
            require(c.eval_fraction >= 0.0 && c.eval_fraction < 1.0, "eval_fraction must be in [0,1)", line);
        };
        t["output_dir"] = [](auto& c, auto&, auto& v, auto) { c.output_dir = v; };
        t["deterministic"] = [](auto& c, auto& k, auto& v, auto line) { c.deterministic = to_bool(k, v, line); };
        t["checkpoint_every_epochs"] = [](auto& c, auto& k, auto& v, auto line) {
            c.checkpoint_every_epochs = to_count(k, v, line);
        };
        t["probe.k"] = [](auto& c, auto& k, auto& v, auto line) {
            c.probe_k = to_count(k, v, line);
            require(c.probe_k >= 2, "probe.k must be at least 2", line);
        };
        t["probe.batch_size"] = [](auto& c, auto& k, auto& v, auto line) {
            c.probe_batch_size = to_count(k, v, line);
            require(c.probe_batch_size >= 1, "probe.batch_size must be at least 1", line);
        };
        t["compare.target_loss"] = [](auto& c, auto& k, auto& v, auto line) {
            c.compare_target_loss = to_double(k, v, line);
        };
        return t;
    }();
    return table;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string closest_key(const std::string& key) {
    std::string best;
    std::size_t best_d = 4;  // suggest only close matches
    for (const auto& [k, _] : setters()) {
        const auto d = edit_distance(key, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

std::size_t line_of(const ExperimentConfig& c, const std::string& key) {
    auto it = c.key_lines.find(key);
    return it == c.key_lines.end() ? 0 : it->second;
}

} // namespace

std::vector<std::string> known_config_keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
}

void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value, std::size_t line) {
    const auto& table = setters();
    auto it = table.find(key);
    if (it == table.end()) {
        std::string msg = "unknown key '" + key + "'";
        if (auto s = closest_key(key); !s.empty()) msg += " (did you mean '" + s + "'?)";
        throw ConfigError(msg, line);
    }
    it->second(config, key, value, line);
    config.key_lines[key] = line;
}

ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& origin) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", line);
        if (value.empty()) throw ConfigError(key + ": missing value", line);
        apply_config_value(config, key, value, line);
    }
    if (!config.problem.data_path.empty() && !origin.empty()) {
        std::filesystem::path p(config.problem.data_path);
        if (p.is_relative()) config.problem.data_path = (origin.parent_path() / p).string();
    }
    config.validate();
    return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str(), path);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::filesystem::path ExperimentConfig::resolved_output_dir() const {
    if (!output_dir.empty()) return output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return "out";
}

void ExperimentConfig::validate() const {
    if (neumann.mu_min > neumann.mu_max) {
        throw ConfigError("mu_min must not exceed mu_max", line_of(*this, "neumann.mu_min"));
    }
    if (problem.family == ProblemFamily::quadratic) {
        if (problem.spectrum.empty()) throw ConfigError("quadratic problem needs a spectrum");
        for (double s : problem.spectrum) {
            if (!std::isfinite(s)) throw ConfigError("spectrum entries must be finite", line_of(*this, "problem.spectrum"));
        }
    }
    if (problem.family == ProblemFamily::logistic && problem.data_path.empty() && problem.n_samples < 2) {
        throw ConfigError("logistic problem needs at least 2 samples", line_of(*this, "problem.n_samples"));
    }
    if (problem.data_path.empty()) {
        const auto n = problem.n_samples;
        const auto n_eval = static_cast<std::size_t>(std::ceil(eval_fraction * static_cast<double>(n)));
        if (n_eval >= n) throw ConfigError("eval_fraction leaves no training samples", line_of(*this, "eval_fraction"));
        if (batch_size > n - n_eval) {
            throw ConfigError("batch_size " + std::to_string(batch_size) + " exceeds training split size " +
                                  std::to_string(n - n_eval),
                              line_of(*this, "batch_size"));
        }
    }
}

} // namespace nopt
