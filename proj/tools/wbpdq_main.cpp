// Command-line front end: single decodes, experiment sweeps, quantization,
// restricted-isometry estimation and error-bound evaluation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "wbpdq/analysis.hpp"
#include "wbpdq/harness.hpp"
#include "wbpdq/io.hpp"
#include "wbpdq/model.hpp"
#include "wbpdq/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitIo = 4;

// Weight files hold the omega vector itself; reconstruct the two-level form.
wbpdq::WeightVector weights_from_vector(const wbpdq::Vec& w) {
    using namespace wbpdq;
    IndexSet prior;
    double theta = -1.0;
    for (Index i = 0; i < w.size(); ++i) {
        const double v = w[i];
        if (!(v > 0.0 && v <= 1.0))
            throw ConfigError("weights must lie in (0, 1]");
        if (v == 1.0) continue;
        if (theta < 0.0)
            theta = v;
        else if (v != theta)
            throw ConfigError("weights must be two-level: theta on the prior support, 1 elsewhere");
        prior.push_back(i);
    }
    if (theta < 0.0) theta = 0.5;  // all ones: empty prior support
    return make_weights(prior, theta, w.size());
}

int run_recover(const std::string& matrix_path, const std::string& y_path,
                const std::string& weights_path, double p, const std::string& epsilon_text,
                double alpha, int max_iters, double gamma, const std::string& out_path,
                bool strict, const std::string& tube_method) {
    using namespace wbpdq;
    const SensingMatrix matrix(read_matrix(matrix_path));
    const Vec y = read_vector(y_path);
    if (!matrix.compressive())
        std::cerr << "warning: m >= N, not a compressive regime\n";
    const WeightVector w = weights_path.empty()
                               ? make_weights({}, 0.5, matrix.cols())
                               : weights_from_vector(read_vector(weights_path));

    SolverConfig cfg;
    cfg.p = p;
    cfg.gamma = gamma;
    cfg.max_iters = max_iters;
    TubeProjectionConfig tube;
    if (tube_method == "tight_frame")
        tube.method = TubeMethod::tight_frame;
    else if (tube_method != "iterative_dual")
        throw ConfigError("unknown tube method: " + tube_method);

    bool equality = false;
    if (epsilon_text == "auto") {
        if (!(alpha > 0.0))
            throw ConfigError("--epsilon auto requires --alpha (quantizer bin width)");
        cfg.quant_bin_width = alpha;
    } else {
        const double eps = parse_double_or_inf(epsilon_text);
        if (eps < 0.0) throw ConfigError("epsilon must be >= 0");
        if (eps == 0.0)
            equality = true;  // exact-fit decode through the affine projection
        else
            cfg.epsilon = eps;
    }

    const SolveReport report = equality ? solve_bp(y, matrix, w, cfg)
                                        : solve_bpdq(y, matrix, w, cfg, tube);
    write_vector(out_path, report.estimate.values);
    std::printf("iterations %d converged %s objective %.12g feasibility_gap %.3e epsilon %.6g\n",
                report.iterations, report.converged ? "true" : "false", report.objective,
                report.feasibility_gap, report.epsilon);
    if (strict && !report.converged) return kExitNotConverged;
    return kExitOk;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_dir,
                       const std::string& format, int threads) {
    using namespace wbpdq;
    if (threads > 0) omp_set_num_threads(threads);
    const ExperimentConfig cfg = parse_experiment_config(config_path);
    std::filesystem::create_directories(out_dir);

    const bool csv = format == "csv";
    if (!csv && format != "json") throw ConfigError("format must be csv or json");

    const std::string rows_path =
        (std::filesystem::path(out_dir) / (csv ? "results.csv" : "results.json")).string();

    if (csv) {
        // Stream rows cell by cell so partial results survive interruption.
        std::ofstream out(rows_path);
        if (!out) throw IoError("cannot open " + rows_path);
        out << trial_csv_header() << '\n';
        const ResultTable table = run_experiment(
            cfg, [&](const CellAggregate& agg, const std::vector<TrialResult>& rows) {
                for (const auto& r : rows) out << trial_csv_row(r, cfg) << '\n';
                out.flush();
                std::fprintf(stderr, "cell p=%g m=%lld: mean snr %.2f dB (%lld trials)\n",
                             agg.p, static_cast<long long>(agg.m), agg.mean_snr,
                             static_cast<long long>(agg.trials));
            });
        out.close();
        emit_aggregates_csv(table,
                            (std::filesystem::path(out_dir) / "aggregates.csv").string());
    } else {
        const ResultTable table = run_experiment(cfg);
        emit_results(table, EmitFormat::json, rows_path);
    }
    return kExitOk;
}

int run_quantize(const std::string& input, double alpha, const std::string& out_path) {
    using namespace wbpdq;
    const Vec v = read_vector(input);
    const Vec q = quantize(v, Quantizer(alpha));
    if (out_path.empty()) {
        std::printf("%lld 1\n", static_cast<long long>(q.size()));
        for (Index i = 0; i < q.size(); ++i) std::printf("%.17g\n", q[i]);
    } else {
        write_vector(out_path, q);
    }
    return kExitOk;
}

int run_check_rip(const std::string& matrix_path, wbpdq::Index s, double p, double q,
                  wbpdq::Index samples, std::uint64_t seed, wbpdq::Index budget) {
    using namespace wbpdq;
    const SensingMatrix matrix(read_matrix(matrix_path));
    const RipEstimate est = estimate_rip(matrix, s, p, q, samples, seed, budget);
    std::printf("method %s s %lld p %g q %g mu %.12g delta %.12g samples %lld\n",
                est.method == RipMethod::exact_22 ? "exact_22" : "sampled",
                static_cast<long long>(est.s), est.p, est.q, est.mu, est.delta,
                static_cast<long long>(est.num_samples));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse recovery from quantized measurements: weighted l1 decoders with "
                 "lp residual constraints, restricted-isometry analysis and an experiment "
                 "harness"};
    app.require_subcommand(1);

    // recover
    auto* rec = app.add_subcommand("recover", "decode one measurement vector");
    std::string rec_matrix, rec_y, rec_weights, rec_eps = "auto", rec_out = "estimate.txt";
    std::string rec_tube = "iterative_dual";
    std::string rec_p = "2";
    double rec_alpha = 0.0, rec_gamma = 1.0;
    int rec_iters = 800;
    bool rec_strict = false;
    rec->add_option("--matrix", rec_matrix)->required();
    rec->add_option("--measurements", rec_y)->required();
    rec->add_option("--weights", rec_weights);
    rec->add_option("--p", rec_p, "residual norm exponent, >= 2 or 'inf'");
    rec->add_option("--epsilon", rec_eps, "tube half-width, a number, 0 (equality) or 'auto'");
    rec->add_option("--alpha", rec_alpha, "quantizer bin width (needed for --epsilon auto)");
    rec->add_option("--max-iters", rec_iters);
    rec->add_option("--gamma", rec_gamma);
    rec->add_option("--tube-method", rec_tube, "iterative_dual | tight_frame");
    rec->add_option("--out", rec_out);
    rec->add_flag("--strict", rec_strict, "exit 3 when the iteration did not converge");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a seeded recovery sweep");
    std::string exp_config, exp_out = "results", exp_format = "csv";
    int exp_threads = 0;
    exp->add_option("--config", exp_config)->required();
    exp->add_option("--out", exp_out, "output directory");
    exp->add_option("--format", exp_format, "csv | json");
    exp->add_option("--threads", exp_threads, "OpenMP thread count (0 = default)");

    // quantize
    auto* qz = app.add_subcommand("quantize", "mid-riser quantization of a vector");
    std::string qz_in, qz_out;
    double qz_alpha = 1.0;
    qz->add_option("--input", qz_in)->required();
    qz->add_option("--alpha", qz_alpha)->required();
    qz->add_option("--out", qz_out, "output file (stdout when omitted)");

    // check-rip
    auto* rip = app.add_subcommand("check-rip", "estimate restricted-isometry constants");
    std::string rip_matrix;
    long long rip_s = 1, rip_samples = 10000, rip_budget = 1000000;
    std::string rip_p = "2", rip_q = "2";
    std::uint64_t rip_seed = 0;
    rip->add_option("--matrix", rip_matrix)->required();
    rip->add_option("--s", rip_s)->required();
    rip->add_option("--p", rip_p);
    rip->add_option("--q", rip_q);
    rip->add_option("--samples", rip_samples);
    rip->add_option("--seed", rip_seed);
    rip->add_option("--budget", rip_budget, "support enumeration budget for the exact method");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "evaluate recovery error bounds");
    std::string bnd_mode = "thm2";
    double bnd_delta = 0.1, bnd_mu = 1.0, bnd_theta = 0.5, bnd_rho = 0.5, bnd_gamma = 1.0;
    std::string bnd_p = "2", bnd_q = "2", bnd_r = "2";
    long long bnd_s = 1;
    double bnd_eps = 0.0, bnd_sigma = 0.0;
    bnd->add_option("--mode", bnd_mode, "thm1 | thm2");
    bnd->add_option("--delta2s", bnd_delta);
    bnd->add_option("--mu", bnd_mu);
    bnd->add_option("--rho", bnd_rho);
    bnd->add_option("--gamma", bnd_gamma);
    bnd->add_option("--theta", bnd_theta);
    bnd->add_option("--s", bnd_s);
    bnd->add_option("--p", bnd_p);
    bnd->add_option("--q", bnd_q);
    bnd->add_option("--r", bnd_r);
    bnd->add_option("--epsilon", bnd_eps);
    bnd->add_option("--sigma-s", bnd_sigma);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (rec->parsed())
            return run_recover(rec_matrix, rec_y, rec_weights, wbpdq::parse_double_or_inf(rec_p),
                               rec_eps, rec_alpha, rec_iters, rec_gamma, rec_out, rec_strict,
                               rec_tube);
        if (exp->parsed()) return run_experiment_cmd(exp_config, exp_out, exp_format, exp_threads);
        if (qz->parsed()) return run_quantize(qz_in, qz_alpha, qz_out);
        if (rip->parsed())
            return run_check_rip(rip_matrix, rip_s, wbpdq::parse_double_or_inf(rip_p),
                                 wbpdq::parse_double_or_inf(rip_q), rip_samples, rip_seed,
                                 rip_budget);
        if (bnd->parsed()) {
            wbpdq::ErrorBoundResult res;
            if (bnd_mode == "thm1") {
                wbpdq::Thm1Inputs in;
                in.delta_2s = bnd_delta;
                in.mu = bnd_mu;
                in.p = wbpdq::parse_double_or_inf(bnd_p);
                in.q = wbpdq::parse_double_or_inf(bnd_q);
                in.theta = bnd_theta;
                in.s = bnd_s;
                in.epsilon = bnd_eps;
                in.sigma_s = bnd_sigma;
                res = wbpdq::recovery_error_bound(in);
            } else if (bnd_mode == "thm2") {
                wbpdq::Thm2Inputs in;
                in.rho = bnd_rho;
                in.gamma = bnd_gamma;
                in.theta = bnd_theta;
                in.s = bnd_s;
                in.r = wbpdq::parse_double_or_inf(bnd_r);
                in.q = wbpdq::parse_double_or_inf(bnd_q);
                in.epsilon = bnd_eps;
                in.sigma_s = bnd_sigma;
                res = wbpdq::recovery_error_bound(in);
            } else {
                throw wbpdq::ConfigError("mode must be thm1 or thm2");
            }
            std::printf("valid %s A %.12g B %.12g bound %.12g\n", res.valid ? "true" : "false",
                        res.A, res.B, res.bound_value);
            return kExitOk;
        }
    } catch (const wbpdq::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const wbpdq::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
