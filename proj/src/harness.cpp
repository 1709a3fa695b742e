#include "wbpdq/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wbpdq/rng.hpp"

namespace wbpdq {

namespace {

std::string fmt_double(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_ms(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

nlohmann::json config_json(const ExperimentConfig& cfg, int threads) {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    j["n"] = cfg.n;
    j["k"] = cfg.k;
    j["m"] = cfg.m_list;
    nlohmann::json plist = nlohmann::json::array();
    for (double p : cfg.p_list) plist.push_back(p == kInf ? nlohmann::json("inf") : nlohmann::json(p));
    j["p_list"] = plist;
    j["theta"] = cfg.theta;
    j["rho_prior"] = cfg.rho_prior;
    j["alpha_overlap"] = cfg.alpha_overlap;
    j["bin_divisor"] = cfg.bin_divisor;
    j["trials"] = cfg.trials;
    j["max_iters"] = cfg.max_iters;
    j["seed"] = cfg.seed;
    j["mode"] = cfg.mode == ExperimentMode::quantized ? "quantized" : "noiseless";
    j["epsilon_slack"] = cfg.epsilon_slack;
    j["gamma"] = cfg.gamma;
    j["record_timing"] = cfg.record_timing;
    j["tube_method"] =
        cfg.tube.method == TubeMethod::iterative_dual ? "iterative_dual" : "tight_frame";
    j["inner_max_iters"] = cfg.tube.inner_max_iters;
    j["inner_tol"] = cfg.tube.inner_tol;
    j["threads"] = threads;
    return j;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n < 1 || k < 1 || k > n) throw std::invalid_argument("ExperimentConfig: need 1 <= k <= n");
    if (m_list.empty()) throw std::invalid_argument("ExperimentConfig: m list is empty");
    for (Index m : m_list)
        if (m < k || m > n)
            throw std::invalid_argument("ExperimentConfig: need k <= m <= n for every m");
    if (p_list.empty()) throw std::invalid_argument("ExperimentConfig: p list is empty");
    for (double p : p_list)
        if (!(p >= 2.0)) throw std::invalid_argument("ExperimentConfig: every p must be >= 2");
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("ExperimentConfig: theta must lie in (0, 1)");
    if (rho_prior < 0.0 || alpha_overlap < 0.0 || alpha_overlap > 1.0)
        throw std::invalid_argument("ExperimentConfig: bad prior parameters");
    if (alpha_overlap * rho_prior > 1.0)
        throw std::invalid_argument("ExperimentConfig: need alpha * rho <= 1");
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("ExperimentConfig: max_iters must be >= 1");
    if (!(bin_divisor > 0.0))
        throw std::invalid_argument("ExperimentConfig: bin_divisor must be positive");
    const auto want1 = static_cast<Index>(std::llround(alpha_overlap * rho_prior * double(k)));
    const auto want = static_cast<Index>(std::llround(rho_prior * double(k)));
    if (want1 > k || want > n || want1 > want)
        throw std::invalid_argument("ExperimentConfig: prior support cardinality out of range");
}

std::uint64_t derive_trial_seed(std::uint64_t seed, double p, Index m, Index trial) {
    return derive_seed(seed, std::bit_cast<std::uint64_t>(p), static_cast<std::uint64_t>(m),
                       static_cast<std::uint64_t>(trial));
}

Instance generate_instance(const ExperimentConfig& cfg, Index m, std::uint64_t trial_seed) {
    cfg.validate();
    if (m < cfg.k || m > cfg.n) throw std::invalid_argument("generate_instance: bad m");
    Rng rng(trial_seed);
    const Index n = cfg.n, k = cfg.k;

    const IndexSet t0 = rng.sample_indices(n, k);
    Vec x = Vec::Zero(n);
    for (Index i : t0) x[i] = rng.normal();

    Mat phi(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) phi(i, j) = rng.normal();

    const auto n_prior = static_cast<Index>(std::llround(cfg.rho_prior * double(k)));
    const auto n_hit =
        static_cast<Index>(std::llround(cfg.alpha_overlap * cfg.rho_prior * double(k)));
    const Index n_miss = n_prior - n_hit;
    if (n_miss > n - k)
        throw std::invalid_argument("generate_instance: prior support does not fit");

    IndexSet prior;
    prior.reserve(n_prior);
    for (Index pos : rng.sample_indices(k, n_hit)) prior.push_back(t0[pos]);
    IndexSet complement;
    complement.reserve(n - k);
    {
        IndexSet sorted_t0 = t0;
        Index next = 0;
        for (Index i = 0; i < n; ++i) {
            if (next < k && sorted_t0[next] == i) {
                ++next;
                continue;
            }
            complement.push_back(i);
        }
    }
    for (Index pos : rng.sample_indices(n - k, n_miss)) prior.push_back(complement[pos]);
    std::sort(prior.begin(), prior.end());

    const Vec clean = phi * x;
    const double peak = clean.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) throw std::runtime_error("generate_instance: zero measurement vector");
    const Quantizer quant(peak / cfg.bin_divisor);

    Instance inst{Signal(x, t0), SensingMatrix(std::move(phi)), make_weights(prior, cfg.theta, n),
                  quant, Vec()};
    inst.y = cfg.mode == ExperimentMode::quantized ? quantize(clean, quant) : clean;
    return inst;
}

Instance generate_instance(const ExperimentConfig& cfg, Index trial_id) {
    cfg.validate();
    const Index m = cfg.m_list.front();
    return generate_instance(cfg, m,
                             derive_trial_seed(cfg.seed, cfg.p_list.front(), m, trial_id));
}

TrialResult run_trial(const Instance& inst, double p, const ExperimentConfig& cfg,
                      std::uint64_t seed_used, Index trial_id) {
    TrialResult r;
    r.trial_id = trial_id;
    r.p = p;
    r.m = inst.matrix.rows();
    r.seed_used = seed_used;

    SolverConfig scfg;
    scfg.p = p;
    scfg.quant_bin_width = inst.quantizer.alpha;
    scfg.epsilon_slack = cfg.epsilon_slack;
    scfg.gamma = cfg.gamma;
    scfg.max_iters = cfg.max_iters;
    scfg.fp_tol = cfg.fp_tol;

    const auto start = std::chrono::steady_clock::now();
    try {
        const SolveReport report = cfg.mode == ExperimentMode::noiseless
                                       ? solve_bp(inst.y, inst.matrix, inst.weights, scfg)
                                       : solve_bpdq(inst.y, inst.matrix, inst.weights, scfg,
                                                    cfg.tube);
        r.snr_db = snr_db(inst.signal, report.estimate);
        r.iterations = report.iterations;
        r.converged = report.converged;
        r.feasibility_gap = report.feasibility_gap;
        r.epsilon = report.epsilon;
    } catch (const std::exception& ex) {
        r.solver_error = true;
        r.error_message = ex.what();
        r.snr_db = std::numeric_limits<double>::quiet_NaN();
        r.converged = false;
    }
    const auto stop = std::chrono::steady_clock::now();
    if (cfg.record_timing) {
        const double sec = std::chrono::duration<double>(stop - start).count();
        r.wall_time_seconds = std::round(sec * 1000.0) / 1000.0;
    }
    return r;
}

CellAggregate aggregate_cell(double p, Index m, const std::vector<TrialResult>& rows) {
    CellAggregate agg;
    agg.p = p;
    agg.m = m;
    agg.trials = static_cast<Index>(rows.size());
    std::vector<double> finite;
    for (const auto& r : rows) {
        if (r.snr_db == kInf) {
            ++agg.perfect_count;
        } else if (std::isfinite(r.snr_db)) {
            finite.push_back(r.snr_db);
        }
        if (!r.converged) ++agg.nonconverged_count;
    }
    agg.finite_count = static_cast<Index>(finite.size());
    if (!finite.empty()) {
        agg.mean_snr = std::accumulate(finite.begin(), finite.end(), 0.0) / finite.size();
        std::sort(finite.begin(), finite.end());
        const std::size_t h = finite.size() / 2;
        agg.median_snr =
            finite.size() % 2 ? finite[h] : 0.5 * (finite[h - 1] + finite[h]);
        if (finite.size() > 1) {
            double ss = 0.0;
            for (double v : finite) ss += (v - agg.mean_snr) * (v - agg.mean_snr);
            agg.std_snr = std::sqrt(ss / double(finite.size() - 1));
        }
    } else {
        agg.mean_snr = agg.median_snr = std::numeric_limits<double>::quiet_NaN();
    }
    return agg;
}

ResultTable run_experiment(const ExperimentConfig& cfg, const CellCallback& on_cell) {
    cfg.validate();
    ResultTable table;
    table.config = cfg;
    for (double p : cfg.p_list) {
        for (Index m : cfg.m_list) {
            std::vector<TrialResult> cell(cfg.trials);
#pragma omp parallel for schedule(dynamic)
            for (Index i = 0; i < cfg.trials; ++i) {
                const std::uint64_t s = derive_trial_seed(cfg.seed, p, m, i);
                const Instance inst = generate_instance(cfg, m, s);
                cell[i] = run_trial(inst, p, cfg, s, i);
            }
            const CellAggregate agg = aggregate_cell(p, m, cell);
            if (on_cell) on_cell(agg, cell);
            table.aggregates.push_back(agg);
            table.rows.insert(table.rows.end(), cell.begin(), cell.end());
        }
    }
    return table;
}

std::string trial_csv_header() {
    return "trial_id,p,m,k,n,theta,rho_prior,alpha_overlap,epsilon,snr_db,iterations,"
           "converged,feasibility_gap,seed_used,wall_time_seconds";
}

std::string trial_csv_row(const TrialResult& r, const ExperimentConfig& cfg) {
    std::string out;
    out += std::to_string(r.trial_id);
    out += ',' + fmt_double(r.p);
    out += ',' + std::to_string(r.m);
    out += ',' + std::to_string(cfg.k);
    out += ',' + std::to_string(cfg.n);
    out += ',' + fmt_double(cfg.theta);
    out += ',' + fmt_double(cfg.rho_prior);
    out += ',' + fmt_double(cfg.alpha_overlap);
    out += ',' + fmt_double(r.epsilon);
    out += ',' + fmt_double(r.snr_db);
    out += ',' + std::to_string(r.iterations);
    out += r.converged ? ",true" : ",false";
    out += ',' + fmt_double(r.feasibility_gap);
    out += ',' + std::to_string(r.seed_used);
    out += ',' + fmt_ms(r.wall_time_seconds);
    return out;
}

void emit_results(const ResultTable& table, EmitFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_results: cannot open " + path);
    if (format == EmitFormat::csv) {
        out << trial_csv_header() << '\n';
        for (const auto& r : table.rows) out << trial_csv_row(r, table.config) << '\n';
    } else {
        nlohmann::json j;
        j["config"] = config_json(table.config, 0);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : table.rows) {
            nlohmann::json row;
            row["trial_id"] = r.trial_id;
            row["p"] = r.p == kInf ? nlohmann::json("inf") : nlohmann::json(r.p);
            row["m"] = r.m;
            row["k"] = table.config.k;
            row["n"] = table.config.n;
            row["theta"] = table.config.theta;
            row["rho_prior"] = table.config.rho_prior;
            row["alpha_overlap"] = table.config.alpha_overlap;
            row["epsilon"] = r.epsilon;
            row["snr_db"] = r.snr_db == kInf
                                ? nlohmann::json("inf")
                                : (std::isnan(r.snr_db) ? nlohmann::json("nan")
                                                        : nlohmann::json(r.snr_db));
            row["iterations"] = r.iterations;
            row["converged"] = r.converged;
            row["feasibility_gap"] = r.feasibility_gap;
            row["seed_used"] = r.seed_used;
            row["wall_time_seconds"] = r.wall_time_seconds;
            if (r.solver_error) row["error"] = r.error_message;
            rows.push_back(row);
        }
        j["rows"] = rows;
        nlohmann::json aggs = nlohmann::json::array();
        for (const auto& a : table.aggregates) {
            nlohmann::json ja;
            ja["p"] = a.p == kInf ? nlohmann::json("inf") : nlohmann::json(a.p);
            ja["m"] = a.m;
            ja["trials"] = a.trials;
            ja["finite_count"] = a.finite_count;
            ja["mean_snr"] = std::isnan(a.mean_snr) ? nlohmann::json("nan")
                                                    : nlohmann::json(a.mean_snr);
            ja["median_snr"] = std::isnan(a.median_snr) ? nlohmann::json("nan")
                                                        : nlohmann::json(a.median_snr);
            ja["std_snr"] = a.std_snr;
            ja["perfect_count"] = a.perfect_count;
            ja["nonconverged_count"] = a.nonconverged_count;
            aggs.push_back(ja);
        }
        j["aggregates"] = aggs;
        out << j.dump(2) << '\n';
    }
    if (!out) throw std::runtime_error("emit_results: write failed for " + path);
}

void emit_aggregates_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_aggregates_csv: cannot open " + path);
    out << "p,m,trials,finite_count,mean_snr,median_snr,std_snr,perfect_count,"
           "nonconverged_count\n";
    for (const auto& a : table.aggregates) {
        out << fmt_double(a.p) << ',' << a.m << ',' << a.trials << ',' << a.finite_count << ','
            << fmt_double(a.mean_snr) << ',' << fmt_double(a.median_snr) << ','
            << fmt_double(a.std_snr) << ',' << a.perfect_count << ','
            << a.nonconverged_count << '\n';
    }
}

}  // namespace wbpdq
