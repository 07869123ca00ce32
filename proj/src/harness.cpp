#include "nopt/harness.hpp"

#include <glob.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nopt/baselines.hpp"
#include "nopt/checkpoint.hpp"
#include "nopt/errors.hpp"
#include "nopt/finite_diff.hpp"
#include "nopt/neumann.hpp"

namespace nopt {
namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << contents;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

double relative_error(const Vector& a, const Vector& b) {
    const double denom = std::max({norm(a), norm(b), 1e-8});
    return norm(sub(a, b)) / denom;
}

std::string checkpoint_name(long step) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "ckpt_%09ld.ckpt", step);
    return buf;
}

void write_outputs(const std::filesystem::path& dir, const RunResult& r) {
    std::ostringstream metrics;
    write_metrics_csv(metrics, r.rows);
    write_file_atomic(dir / "metrics.csv", metrics.str());
    std::ostringstream summary;
    write_summary(summary, r.summary);
    write_file_atomic(dir / "summary.txt", summary.str());
}

} // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    out << kMetricsHeader << '\n';
    for (const auto& r : rows) {
        out << r.step << ',' << fmt(r.epoch) << ',' << fmt(r.train_loss) << ',' << fmt(r.eval_loss) << ','
            << fmt(r.eval_acc) << ',' << fmt(r.lr) << ',' << fmt(r.mu) << ',' << fmt(r.grad_norm) << ','
            << fmt(r.update_norm) << ',' << fmt(r.wall_ms) << '\n';
    }
}

void write_summary(std::ostream& out, const RunSummary& s) {
    out << "label=" << s.label << '\n'
        << "optimizer=" << s.optimizer << '\n'
        << "total_steps=" << s.total_steps << '\n'
        << "steps_per_epoch=" << s.steps_per_epoch << '\n'
        << "final_train_loss=" << fmt(s.final_train_loss) << '\n'
        << "final_train_acc=" << fmt(s.final_train_acc) << '\n'
        << "final_eval_loss=" << fmt(s.final_eval_loss) << '\n'
        << "final_eval_acc=" << fmt(s.final_eval_acc) << '\n'
        << "diverged=" << (s.diverged ? "true" : "false") << '\n';
    if (!s.failure.empty()) out << "failure=" << s.failure << '\n';
}

Experiment prepare_experiment(const ExperimentConfig& config) {
    config.validate();
    Experiment exp;
    exp.problem = make_problem(config.problem, config.seed);
    const std::size_t n = exp.problem.data->size();
    const auto n_eval = static_cast<std::size_t>(std::ceil(config.eval_fraction * static_cast<double>(n)));
    if (n_eval >= n) throw ConfigError("eval_fraction leaves no training samples");

    RngStream rng(config.seed);
    std::vector<std::size_t> perm = full_batch(n).indices;
    RngStream split_rng = rng.substream("split");
    split_rng.shuffle(perm);
    exp.train.indices.assign(perm.begin(), perm.end() - static_cast<std::ptrdiff_t>(n_eval));
    exp.eval.indices.assign(perm.end() - static_cast<std::ptrdiff_t>(n_eval), perm.end());
    if (exp.eval.indices.empty()) exp.eval = exp.train;

    if (config.batch_size > exp.train.size()) {
        throw ConfigError("batch_size " + std::to_string(config.batch_size) + " exceeds training split size " +
                          std::to_string(exp.train.size()));
    }
    exp.steps_per_epoch = exp.train.size() / config.batch_size;
    RngStream init_rng = rng.substream("init");
    exp.initial = exp.problem.model->initial_params(init_rng);
    return exp;
}

RunResult run_train(const ExperimentConfig& config) { return run_train(config, config.resolved_output_dir()); }

RunResult run_train(const ExperimentConfig& config, const std::optional<std::filesystem::path>& output_dir) {
    const Experiment exp = prepare_experiment(config);
    const LossModel& model = *exp.problem.model;
    const bool is_classifier = model.dataset().kind() == TaskKind::classification;

    LrSchedule lr = config.lr;
    lr.steps_per_epoch = exp.steps_per_epoch;
    lr.base_lr = linearly_scaled_lr(lr.base_lr, config.batch_size, config.lr_linear_scaling_reference);
    try {
        lr.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }

    const bool use_neumann = config.optimizer == OptimizerKind::neumann;
    NeumannSettings nsettings{config.neumann, lr};
    NeumannState nstate;
    OptimizerState bstate;
    Vector w = exp.initial;
    if (use_neumann) {
        try {
            nstate = make_neumann_state(exp.initial, nsettings);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    } else {
        const auto kind = *parse_baseline_kind(to_string(config.optimizer));
        bstate = make_optimizer_state(kind, model.param_count(), config.baseline);
    }
    auto reported = [&]() { return use_neumann ? neumann_finalize(nstate) : w; };

    RunResult result;
    result.summary.label = config.label();
    result.summary.optimizer = to_string(config.optimizer);
    result.summary.steps_per_epoch = exp.steps_per_epoch;

    if (output_dir) {
        ensure_dir(*output_dir);
        if (config.checkpoint_every_epochs > 0) {
            ensure_dir(*output_dir / "checkpoints");
            write_checkpoint(*output_dir / "checkpoints" / checkpoint_name(0),
                             Checkpoint{kCheckpointVersion, reported(), result.summary.optimizer, 0});
        }
    }

    MiniBatchSampler sampler(exp.train.indices, config.batch_size, RngStream(config.seed).substream("batches"));
    const long total_steps = static_cast<long>(config.epochs * exp.steps_per_epoch);
    const auto spe = static_cast<long>(exp.steps_per_epoch);

    long step = 0;
    try {
        for (step = 1; step <= total_steps; ++step) {
            const auto t0 = std::chrono::steady_clock::now();
            const MiniBatch batch = sampler.next();
            MetricsRow row;
            row.step = step;
            row.epoch = static_cast<double>(step) / static_cast<double>(spe);

            const Vector before = reported();
            row.train_loss = model.loss(use_neumann ? nstate.w : w, batch);
            if (!std::isfinite(row.train_loss)) throw DivergenceError("non-finite training loss", step);

            if (use_neumann) {
                const bool burnin = nstate.phase == NeumannPhase::burnin;
                const auto info = neumann_advance(nstate, model, batch, nsettings);
                row.lr = info.lr;
                row.grad_norm = info.grad_norm;
                if (!burnin) row.mu = info.mu;
            } else {
                const Vector g = model.gradient(w, batch);
                row.lr = lr_at(lr, step);
                row.grad_norm = norm(g);
                baseline_step(bstate, w, g, row.lr);
                if (bstate.kind == BaselineKind::momentum) row.mu = bstate.settings.momentum;
            }
            const Vector after = reported();
            if (!all_finite(after)) throw DivergenceError("non-finite weights", step);
            row.update_norm = norm(sub(after, before));

            if (step % spe == 0) {
                row.eval_loss = model.loss(after, exp.eval);
                if (is_classifier) row.eval_acc = accuracy(model, after, exp.eval);
                const auto epoch = static_cast<std::size_t>(step / spe);
                if (output_dir && config.checkpoint_every_epochs > 0 && epoch % config.checkpoint_every_epochs == 0) {
                    write_checkpoint(*output_dir / "checkpoints" / checkpoint_name(step),
                                     Checkpoint{kCheckpointVersion, after, result.summary.optimizer,
                                                static_cast<std::uint64_t>(step)});
                }
            }
            if (!config.deterministic) {
                row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            }
            result.rows.push_back(std::move(row));
        }
    } catch (const Error& e) {
        const bool is_divergence = dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const NonFiniteError*>(&e);
        if (!is_divergence) throw;
        MetricsRow fail;
        fail.step = step;
        fail.epoch = static_cast<double>(step) / static_cast<double>(spe);
        fail.train_loss = std::nan("");
        result.rows.push_back(fail);
        result.summary.total_steps = step;
        result.summary.diverged = true;
        result.summary.failure = e.what();
        result.final_weights = reported();
        if (output_dir) write_outputs(*output_dir, result);
        throw DivergenceError(std::string("run diverged at step ") + std::to_string(step) + ": " + e.what(), step);
    }

    result.final_weights = reported();
    result.summary.total_steps = total_steps;
    result.summary.final_train_loss = model.loss(result.final_weights, exp.train);
    result.summary.final_eval_loss = model.loss(result.final_weights, exp.eval);
    if (is_classifier) {
        result.summary.final_train_acc = accuracy(model, result.final_weights, exp.train);
        result.summary.final_eval_acc = accuracy(model, result.final_weights, exp.eval);
    }
    if (output_dir) {
        result.output_dir = *output_dir;
        write_outputs(*output_dir, result);
        write_checkpoint(*output_dir / "final.ckpt",
                         Checkpoint{kCheckpointVersion, result.final_weights, result.summary.optimizer,
                                    static_cast<std::uint64_t>(total_steps)});
    }
    return result;
}

std::optional<long> steps_to_target(const std::vector<MetricsRow>& rows, double target) {
    for (const auto& r : rows) {
        if (std::isfinite(r.train_loss) && r.train_loss <= target) return r.step;
    }
    return std::nullopt;
}

CompareReport run_compare(const std::vector<ExperimentConfig>& configs,
                          const std::optional<std::filesystem::path>& output_dir) {
    if (configs.empty()) throw InvalidArgument("compare: no configs given");
    for (const auto& c : configs) {
        if (!(c.problem == configs.front().problem) || c.seed != configs.front().seed) {
            throw ConfigError("compare: all configs must share the same problem and seed (" + c.label() + " differs)");
        }
    }

    CompareReport report;
    report.target_loss = configs.front().compare_target_loss;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::string label = configs[i].label();
        if (seen.count(label)) label += "_" + std::to_string(i + 1);
        seen.insert(label);
        report.labels.push_back(label);

        std::optional<std::filesystem::path> dir;
        if (output_dir) dir = *output_dir / label;
        CompareEntry entry;
        std::vector<MetricsRow> rows;
        try {
            RunResult r = run_train(configs[i], dir);
            entry.summary = r.summary;
            rows = std::move(r.rows);
        } catch (const DivergenceError& e) {
            entry.summary.label = label;
            entry.summary.optimizer = to_string(configs[i].optimizer);
            entry.summary.diverged = true;
            entry.summary.failure = e.what();
        }
        entry.summary.label = label;
        entry.steps_to_target = steps_to_target(rows, report.target_loss);
        report.entries.push_back(entry);
        report.runs.push_back(std::move(rows));
    }

    if (output_dir) {
        ensure_dir(*output_dir);
        std::ostringstream csv;
        csv << "step";
        for (const auto& l : report.labels) csv << ',' << l;
        csv << '\n';
        std::size_t max_rows = 0;
        for (const auto& r : report.runs) max_rows = std::max(max_rows, r.size());
        for (std::size_t i = 0; i < max_rows; ++i) {
            csv << (i + 1);
            for (const auto& r : report.runs) {
                csv << ',';
                if (i < r.size()) csv << fmt(r[i].train_loss);
            }
            csv << '\n';
        }
        write_file_atomic(*output_dir / "compare.csv", csv.str());

        std::ostringstream sum;
        sum << "label,optimizer,final_train_loss,final_eval_loss,final_eval_acc,total_steps,steps_to_target,diverged\n";
        for (const auto& e : report.entries) {
            sum << e.summary.label << ',' << e.summary.optimizer << ',' << fmt(e.summary.final_train_loss) << ','
                << fmt(e.summary.final_eval_loss) << ',' << fmt(e.summary.final_eval_acc) << ','
                << e.summary.total_steps << ',' << (e.steps_to_target ? std::to_string(*e.steps_to_target) : "")
                << ',' << (e.summary.diverged ? "true" : "false") << '\n';
        }
        write_file_atomic(*output_dir / "compare_summary.csv", sum.str());
    }
    return report;
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    std::vector<std::filesystem::path> out;
    if (rc == 0) {
        for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    }
    globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH) throw IoError("cannot expand pattern '" + pattern + "'");
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ProbeRecord> run_eigenprobe(const ExperimentConfig& config, const std::string& pattern,
                                        std::optional<std::size_t> k,
                                        const std::optional<std::filesystem::path>& output_dir, std::ostream& diag) {
    const std::size_t steps = k.value_or(config.probe_k);
    if (steps < 2) throw ConfigError("eigenprobe: k must be at least 2");
    const auto paths = expand_glob(pattern);
    std::vector<ProbeRecord> records;
    if (paths.empty()) {
        diag << "warning: no checkpoints match '" << pattern << "'\n";
    } else {
        const Problem problem = make_problem(config.problem, config.seed);
        records = trajectory_probe(paths, *problem.model, steps, config.probe_batch_size,
                                   RngStream(config.seed).substream("eigenprobe"));
    }
    if (output_dir) {
        ensure_dir(*output_dir);
        std::ostringstream csv;
        write_probe_csv(csv, records);
        write_file_atomic(*output_dir / "eigenprobe.csv", csv.str());
    }
    return records;
}

GradcheckReport gradcheck_model(const LossModel& model, const Vector& center, const MiniBatch& batch, RngStream rng,
                                std::size_t points) {
    GradcheckReport report;
    report.family = model.family();
    const std::size_t n = model.param_count();
    auto loss = [&](const Vector& x) { return model.loss(x, batch); };
    auto grad = [&](const Vector& x) { return model.gradient(x, batch); };

    for (std::size_t p = 0; p < points; ++p) {
        GradcheckPoint pt;
        Vector w = center;
        axpy(0.5, rng.normal_vector(n), w);

        pt.grad_rel_error = relative_error(grad(w), finite_diff_grad(loss, w));

        const Vector v = rng.unit_vector(n);
        const Vector hv = model.hvp(w, batch, v);
        pt.hvp_rel_error = relative_error(hv, finite_diff_hvp(grad, w, v));

        const double h = 1e-3;
        const double second = (loss(lincomb(1.0, w, h, v)) - 2.0 * loss(w) + loss(lincomb(1.0, w, -h, v))) / (h * h);
        const double curvature = dot(v, hv);
        pt.curvature_rel_error = std::abs(second - curvature) / std::max({std::abs(second), std::abs(curvature), 1e-6});

        const Vector u = rng.unit_vector(n);
        const double huv = dot(model.hvp(w, batch, u), v);
        const double uhv = dot(u, hv);
        pt.symmetry_error = std::abs(huv - uhv) / (1.0 + std::abs(huv));
        report.points.push_back(pt);
    }
    report.passed = std::all_of(report.points.begin(), report.points.end(), [&](const GradcheckPoint& pt) {
        return pt.grad_rel_error <= report.grad_tol && pt.hvp_rel_error <= report.hvp_tol &&
               pt.curvature_rel_error <= report.hvp_tol && pt.symmetry_error <= report.hvp_tol;
    });
    return report;
}

GradcheckReport run_gradcheck(const ExperimentConfig& config, std::size_t points) {
    const Experiment exp = prepare_experiment(config);
    MiniBatchSampler sampler(exp.train.indices, config.batch_size, RngStream(config.seed).substream("gradcheck-batch"));
    return gradcheck_model(*exp.problem.model, exp.initial, sampler.next(), RngStream(config.seed).substream("gradcheck"),
                           points);
}

} // namespace nopt
