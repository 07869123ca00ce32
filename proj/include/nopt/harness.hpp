#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nopt/config.hpp"
#include "nopt/lanczos.hpp"
#include "nopt/problems.hpp"

namespace nopt {

inline constexpr const char* kMetricsHeader =
    "step,epoch,train_loss,eval_loss,eval_acc,lr,mu,grad_norm,update_norm,wall_ms";

struct MetricsRow {
    long step = 0;
    double epoch = 0.0;
    double train_loss = 0.0;  // mini-batch loss where the gradient was taken
    std::optional<double> eval_loss;
    std::optional<double> eval_acc;
    double lr = 0.0;
    std::optional<double> mu;
    double grad_norm = 0.0;
    double update_norm = 0.0;
    double wall_ms = 0.0;
};

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

struct RunSummary {
    std::string label;
    std::string optimizer;
    long total_steps = 0;
    std::size_t steps_per_epoch = 0;
    double final_train_loss = 0.0;  // full training split
    double final_train_acc = 0.0;
    double final_eval_loss = 0.0;
    double final_eval_acc = 0.0;
    bool diverged = false;
    std::string failure;
};

struct RunResult {
    std::vector<MetricsRow> rows;
    Vector final_weights;
    RunSummary summary;
    std::filesystem::path output_dir;
};

// Data split, model and sampler for a config, shared by the run_* entry
// points and tests. The evaluation split is the last ceil(eval_fraction * N)
// entries of a seeded permutation; the training split is the rest (the whole
// dataset is used for evaluation when the holdout is empty).
struct Experiment {
    Problem problem;
    MiniBatch train;
    MiniBatch eval;
    std::size_t steps_per_epoch = 0;
    Vector initial;
};

Experiment prepare_experiment(const ExperimentConfig& config);

// Trains and writes metrics.csv, summary.txt, final.ckpt (and periodic
// checkpoints under checkpoints/) into `output_dir` when it is set. On
// divergence the partial metrics plus a failure row are written and
// DivergenceError is rethrown.
RunResult run_train(const ExperimentConfig& config, const std::optional<std::filesystem::path>& output_dir);
RunResult run_train(const ExperimentConfig& config);  // writes to config.resolved_output_dir()

struct CompareEntry {
    RunSummary summary;
    std::optional<long> steps_to_target;
};

struct CompareReport {
    std::vector<std::string> labels;
    std::vector<std::vector<MetricsRow>> runs;
    std::vector<CompareEntry> entries;
    double target_loss = 0.0;
};

// Runs each config (all must share problem and seed) and writes compare.csv
// (step + one train_loss column per run) and compare_summary.csv into
// `output_dir` when set. Runs that diverge are reported, not rethrown.
CompareReport run_compare(const std::vector<ExperimentConfig>& configs,
                          const std::optional<std::filesystem::path>& output_dir);

// First step whose train_loss is <= target.
std::optional<long> steps_to_target(const std::vector<MetricsRow>& rows, double target);

// Probes every checkpoint matching `pattern` (sorted by path) and writes
// eigenprobe.csv into `output_dir` when set. No match yields an empty CSV
// and a warning on `diag`.
std::vector<ProbeRecord> run_eigenprobe(const ExperimentConfig& config, const std::string& pattern,
                                        std::optional<std::size_t> k,
                                        const std::optional<std::filesystem::path>& output_dir, std::ostream& diag);

std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

struct GradcheckPoint {
    double grad_rel_error = 0.0;
    double hvp_rel_error = 0.0;       // hvp vs central difference of the gradient
    double curvature_rel_error = 0.0; // v^T H v vs second difference of the loss
    double symmetry_error = 0.0;      // |<Hu,v> - <u,Hv>| / (1 + |<Hu,v>|)
};

struct GradcheckReport {
    std::string family;
    std::vector<GradcheckPoint> points;
    double grad_tol = 1e-5;
    double hvp_tol = 1e-4;
    bool passed = false;
};

GradcheckReport run_gradcheck(const ExperimentConfig& config, std::size_t points = 10);
GradcheckReport gradcheck_model(const LossModel& model, const Vector& center, const MiniBatch& batch, RngStream rng,
                                std::size_t points = 10);

void write_summary(std::ostream& out, const RunSummary& s);

} // namespace nopt
