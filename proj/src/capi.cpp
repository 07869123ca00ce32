#include "nopt/nopt.h"

#include <algorithm>
#include <iostream>
#include <new>
#include <string>

#include "nopt/checkpoint.hpp"
#include "nopt/config.hpp"
#include "nopt/errors.hpp"
#include "nopt/harness.hpp"

struct nopt_config {
    nopt::ExperimentConfig config;
    mutable std::string output_dir;
};

struct nopt_checkpoint {
    nopt::Checkpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

nopt_status fail(nopt_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

// Runs `fn`, translating library exceptions into status codes.
template <class Fn>
nopt_status guarded(Fn&& fn) {
    g_last_error.clear();
    try {
        return fn();
    } catch (const nopt::ConfigError& e) {
        return fail(NOPT_ERR_CONFIG, e.what());
    } catch (const nopt::DivergenceError& e) {
        return fail(NOPT_ERR_DIVERGED, e.what());
    } catch (const nopt::IoError& e) {
        return fail(NOPT_ERR_IO, e.what());
    } catch (const nopt::FormatError& e) {
        return fail(NOPT_ERR_FORMAT, e.what());
    } catch (const nopt::InvalidArgument& e) {
        return fail(NOPT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const nopt::DimensionError& e) {
        return fail(NOPT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const nopt::NonFiniteError& e) {
        return fail(NOPT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(NOPT_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NOPT_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(NOPT_ERR_INTERNAL, "unknown error");
    }
}

std::optional<std::filesystem::path> dir_or(const char* out_dir, const nopt::ExperimentConfig& c) {
    if (out_dir && *out_dir) return std::filesystem::path(out_dir);
    return c.resolved_output_dir();
}

} // namespace

extern "C" {

const char* nopt_version(void) { return "1.0.0"; }

const char* nopt_last_error(void) { return g_last_error.c_str(); }

const char* nopt_status_string(nopt_status status) {
    switch (status) {
    case NOPT_OK: return "ok";
    case NOPT_ERR_INTERNAL: return "internal error";
    case NOPT_ERR_CONFIG: return "configuration error";
    case NOPT_ERR_DIVERGED: return "diverged";
    case NOPT_ERR_IO: return "i/o error";
    case NOPT_ERR_FORMAT: return "format error";
    case NOPT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NOPT_ERR_CHECK_FAILED: return "check failed";
    }
    return "unknown status";
}

nopt_status nopt_config_load(const char* path, nopt_config** out) {
    return guarded([&] {
        if (!path || !out) return fail(NOPT_ERR_INVALID_ARGUMENT, "null argument");
        auto* h = new nopt_config{nopt::parse_config(path), {}};
        *out = h;
        return NOPT_OK;
    });
}

nopt_status nopt_config_parse(const char* text, nopt_config** out) {
    return guarded([&] {
        if (!text || !out) return fail(NOPT_ERR_INVALID_ARGUMENT, "null argument");
        auto* h = new nopt_config{nopt::parse_config_text(text), {}};
        *out = h;
        return NOPT_OK;
    });
}

nopt_status nopt_config_set(nopt_config* config, const char* key, const char* value) {
    return guarded([&] {
        if (!config || !key || !value) return fail(NOPT_ERR_INVALID_ARGUMENT, "null argument");
        nopt::ExperimentConfig updated = config->config;
        nopt::apply_config_value(updated, key, value);
        updated.validate();
        config->config = std::move(updated);
        return NOPT_OK;
    });
}

const char* nopt_config_output_dir(const nopt_config* config) {
    if (!config) return "";
    config->output_dir = config->config.resolved_output_dir().string();
    return config->output_dir.c_str();
}

void nopt_config_free(nopt_config* config) { delete config; }

nopt_status nopt_train(const nopt_config* config, const char* out_dir, nopt_train_summary* summary) {
    return guarded([&] {
        if (!config) return fail(NOPT_ERR_INVALID_ARGUMENT, "null config");
        if (summary) *summary = nopt_train_summary{};
        nopt::RunResult result;
        try {
            result = nopt::run_train(config->config, dir_or(out_dir, config->config));
        } catch (const nopt::DivergenceError& e) {
            if (summary) {
                summary->total_steps = e.step();
                summary->diverged = 1;
            }
            throw;
        }
        if (summary) {
            const auto& s = result.summary;
            *summary = nopt_train_summary{s.total_steps,      s.steps_per_epoch, s.final_train_loss, s.final_train_acc,
                                          s.final_eval_loss,  s.final_eval_acc,  s.diverged ? 1 : 0};
        }
        return NOPT_OK;
    });
}

nopt_status nopt_compare(const nopt_config* const* configs, size_t count, const char* out_dir) {
    return guarded([&] {
        if (count > 0 && !configs) return fail(NOPT_ERR_INVALID_ARGUMENT, "null config list");
        std::vector<nopt::ExperimentConfig> list;
        for (size_t i = 0; i < count; ++i) {
            if (!configs[i]) return fail(NOPT_ERR_INVALID_ARGUMENT, "null config in list");
            list.push_back(configs[i]->config);
        }
        if (list.empty()) return fail(NOPT_ERR_INVALID_ARGUMENT, "compare: no configs given");
        nopt::run_compare(list, dir_or(out_dir, list.front()));
        return NOPT_OK;
    });
}

nopt_status nopt_eigenprobe(const nopt_config* config, const char* pattern, size_t k, const char* out_dir,
                            size_t* n_records) {
    return guarded([&] {
        if (!config || !pattern) return fail(NOPT_ERR_INVALID_ARGUMENT, "null argument");
        std::optional<std::size_t> steps;
        if (k > 0) steps = k;
        const auto records = nopt::run_eigenprobe(config->config, pattern, steps, dir_or(out_dir, config->config), std::cerr);
        if (n_records) *n_records = records.size();
        return NOPT_OK;
    });
}

nopt_status nopt_gradcheck(const nopt_config* config, nopt_gradcheck_summary* summary) {
    return guarded([&] {
        if (!config) return fail(NOPT_ERR_INVALID_ARGUMENT, "null config");
        const auto report = nopt::run_gradcheck(config->config);
        nopt_gradcheck_summary s{};
        s.points = report.points.size();
        s.grad_tol = report.grad_tol;
        s.hvp_tol = report.hvp_tol;
        for (const auto& p : report.points) {
            s.max_grad_rel_error = std::max(s.max_grad_rel_error, p.grad_rel_error);
            s.max_hvp_rel_error = std::max(s.max_hvp_rel_error, p.hvp_rel_error);
            s.max_curvature_rel_error = std::max(s.max_curvature_rel_error, p.curvature_rel_error);
            s.max_symmetry_error = std::max(s.max_symmetry_error, p.symmetry_error);
        }
        s.passed = report.passed ? 1 : 0;
        if (summary) *summary = s;
        if (!report.passed) return fail(NOPT_ERR_CHECK_FAILED, "derivative check exceeded tolerance");
        return NOPT_OK;
    });
}

nopt_status nopt_checkpoint_write(const char* path, const double* values, size_t count, const char* optimizer,
                                  uint64_t step) {
    return guarded([&] {
        if (!path || (count > 0 && !values)) return fail(NOPT_ERR_INVALID_ARGUMENT, "null argument");
        nopt::Checkpoint c;
        c.values = nopt::Vector(std::vector<double>(values, values + count));
        c.optimizer = optimizer ? optimizer : "";
        c.step = step;
        nopt::write_checkpoint(path, c);
        return NOPT_OK;
    });
}

nopt_status nopt_checkpoint_read(const char* path, nopt_checkpoint** out) {
    return guarded([&] {
        if (!path || !out) return fail(NOPT_ERR_INVALID_ARGUMENT, "null argument");
        *out = new nopt_checkpoint{nopt::read_checkpoint(path)};
        return NOPT_OK;
    });
}

size_t nopt_checkpoint_size(const nopt_checkpoint* ckpt) { return ckpt ? ckpt->ckpt.values.size() : 0; }

const double* nopt_checkpoint_values(const nopt_checkpoint* ckpt) { return ckpt ? ckpt->ckpt.values.data() : nullptr; }

const char* nopt_checkpoint_optimizer(const nopt_checkpoint* ckpt) { return ckpt ? ckpt->ckpt.optimizer.c_str() : ""; }

uint64_t nopt_checkpoint_step(const nopt_checkpoint* ckpt) { return ckpt ? ckpt->ckpt.step : 0; }

void nopt_checkpoint_free(nopt_checkpoint* ckpt) { delete ckpt; }

} // extern "C"
