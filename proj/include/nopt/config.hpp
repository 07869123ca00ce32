#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nopt/baselines.hpp"
#include "nopt/neumann.hpp"
#include "nopt/problems.hpp"
#include "nopt/schedule.hpp"

namespace nopt {

enum class OptimizerKind { sgd, momentum, adam, rmsprop, neumann };

std::string to_string(OptimizerKind k);
std::optional<OptimizerKind> parse_optimizer_kind(const std::string& s);

inline constexpr const char* kOutputDirEnv = "NOPT_OUTPUT_DIR";

struct ExperimentConfig {
    std::string name;  // column label in comparisons; defaults to the optimizer tag
    ProblemSpec problem;
    OptimizerKind optimizer = OptimizerKind::neumann;
    BaselineSettings baseline;
    NeumannHyperParams neumann;
    LrSchedule lr{0.1, 5, 0, 1.0, 1};  // steps_per_epoch is filled in by the harness
    std::size_t lr_linear_scaling_reference = 0;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
    double eval_fraction = 0.1;
    std::string output_dir;
    bool deterministic = true;
    std::size_t checkpoint_every_epochs = 0;
    std::size_t probe_k = 10;
    std::size_t probe_batch_size = 128;
    double compare_target_loss = 1e-6;

    // Line on which each key was set; used for error messages.
    std::map<std::string, std::size_t> key_lines;

    std::string label() const { return name.empty() ? to_string(optimizer) : name; }

    // Directory for outputs: output_dir, else $NOPT_OUTPUT_DIR, else "out".
    std::filesystem::path resolved_output_dir() const;

    // Cross-key checks (mu bounds, schedule, eval split). Per-key checks
    // happen while parsing.
    void validate() const;
};

// `key = value` lines, `#` starts a comment, dotted keys select a section
// (e.g. `neumann.alpha = 1e-7`). Every error is a ConfigError carrying the
// offending line number; unknown keys suggest the closest known key.
ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& origin = {});
ExperimentConfig parse_config(const std::filesystem::path& path);

// Applies one `key = value` assignment as if it appeared in the file.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value,
                        std::size_t line = 0);

std::vector<std::string> known_config_keys();

} // namespace nopt
