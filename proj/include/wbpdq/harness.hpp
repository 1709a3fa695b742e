#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wbpdq/model.hpp"
#include "wbpdq/solver.hpp"
#include "wbpdq/types.hpp"

namespace wbpdq {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum class ExperimentMode { quantized, noiseless };

struct ExperimentConfig {
    Index n = 1024;
    Index k = 16;
    std::vector<Index> m_list = {256};
    std::vector<double> p_list = {2.0};  // kInf allowed
    double theta = 0.5;
    double rho_prior = 1.0;     // |T~| = round(rho * k)
    double alpha_overlap = 0.5; // |T~ cap T0| = round(alpha * rho * k)
    double bin_divisor = 40.0;  // bin width = ||Phi x||_inf / bin_divisor
    Index trials = 50;
    int max_iters = 800;
    std::uint64_t seed = 0;
    ExperimentMode mode = ExperimentMode::quantized;
    double epsilon_slack = 1.1;
    double gamma = 1.0;
    std::optional<double> fp_tol;
    bool record_timing = true;  // timing is outside the determinism contract
    TubeProjectionConfig tube;

    void validate() const;
};

struct TrialResult {
    Index trial_id = 0;
    double p = 2.0;
    Index m = 0;
    double snr_db = 0.0;  // +inf encodes perfect recovery
    int iterations = 0;
    bool converged = false;
    double feasibility_gap = 0.0;
    double epsilon = 0.0;
    std::uint64_t seed_used = 0;
    double wall_time_seconds = 0.0;  // millisecond precision
    bool solver_error = false;
    std::string error_message;
};

struct Instance {
    Signal signal;
    SensingMatrix matrix;
    WeightVector weights;
    Quantizer quantizer;
    Vec y;
};

struct CellAggregate {
    double p = 2.0;
    Index m = 0;
    Index trials = 0;
    Index finite_count = 0;
    double mean_snr = 0.0;
    double median_snr = 0.0;
    double std_snr = 0.0;
    Index perfect_count = 0;
    Index nonconverged_count = 0;
};

struct ResultTable {
    ExperimentConfig config;
    std::vector<TrialResult> rows;  // ordered by (p, m, trial_id)
    std::vector<CellAggregate> aggregates;
};

/// Per-trial stream: splitmix chain over (seed, bits(p), m, trial).
std::uint64_t derive_trial_seed(std::uint64_t seed, double p, Index m, Index trial);

/// Draws, in this order: support T0, on-support values, Phi (row by row),
/// prior support T1 from T0 and T2 from the complement. The bin width is
/// ||Phi x||_inf / bin_divisor; y is the quantized (or, in noiseless mode,
/// exact) measurement vector.
Instance generate_instance(const ExperimentConfig& cfg, Index m, std::uint64_t trial_seed);

/// Single-m convenience overload using cfg.m_list.front() and the first p.
Instance generate_instance(const ExperimentConfig& cfg, Index trial_id);

/// Decode one instance (solve_bpdq, or solve_bp in noiseless mode) and score
/// it. Solver failures are recorded in the result, not thrown.
TrialResult run_trial(const Instance& inst, double p, const ExperimentConfig& cfg,
                      std::uint64_t seed_used, Index trial_id);

CellAggregate aggregate_cell(double p, Index m, const std::vector<TrialResult>& rows);

using CellCallback = std::function<void(const CellAggregate&, const std::vector<TrialResult>&)>;

/// Full (p, m) sweep, trials in parallel within each cell; rows are collected
/// in deterministic (p, m, trial_id) order regardless of scheduling.
ResultTable run_experiment(const ExperimentConfig& cfg, const CellCallback& on_cell = {});

enum class EmitFormat { csv, json };

/// Write the per-trial table (and, for JSON, the config header block and
/// aggregates) to path.
void emit_results(const ResultTable& table, EmitFormat format, const std::string& path);

/// Aggregates as CSV (own schema; the per-trial schema is fixed separately).
void emit_aggregates_csv(const ResultTable& table, const std::string& path);

std::string trial_csv_header();
std::string trial_csv_row(const TrialResult& r, const ExperimentConfig& cfg);

}  // namespace wbpdq
