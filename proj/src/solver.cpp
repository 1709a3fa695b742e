#include "wbpdq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace wbpdq {

void SolverConfig::validate() const {
    if (!(p >= 2.0)) throw std::invalid_argument("SolverConfig: p must be >= 2");
    if (!(gamma > 0.0)) throw std::invalid_argument("SolverConfig: gamma must be positive");
    if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    if (!(alpha_min > 0.0 && alpha_min <= alpha_max && alpha_max < 2.0))
        throw std::invalid_argument("SolverConfig: need 0 < alpha_min <= alpha_max < 2");
    if (epsilon && !(*epsilon > 0.0))
        throw std::invalid_argument("SolverConfig: epsilon must be positive");
    if (fp_tol && !(*fp_tol > 0.0))
        throw std::invalid_argument("SolverConfig: fp_tol must be positive");
}

double auto_epsilon(double bin_width, Index m, double p, double slack) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("auto_epsilon: bin width must be positive");
    if (m < 1) throw std::invalid_argument("auto_epsilon: m must be >= 1");
    if (p == kInf) return bin_width / 2.0;
    if (!(p >= 1.0)) throw std::invalid_argument("auto_epsilon: p must be >= 1");
    return (bin_width / 2.0) * std::pow(double(m) / (p + 1.0), 1.0 / p) * slack;
}

std::pair<Vec, double> dr_step(const Vec& x, const ProxFn& prox_f1,
                               const std::function<Vec(const Vec&)>& prox_f2,
                               double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("dr_step: alpha must lie in (0, 2)");
    const Vec px = prox_f2(x);
    const Vec shrunk = prox_f1(2.0 * px - x, gamma);
    const Vec g = px - shrunk;
    return {x - alpha * g, g.norm()};
}

namespace {

struct EngineResult {
    Vec x_final;
    std::vector<double> history;
    bool converged = false;
};

EngineResult run_dr(const Vec& x0, const ProxFn& prox_f1,
                    const std::function<Vec(const Vec&)>& prox_f2,
                    const SolverConfig& cfg, double fp_tol) {
    EngineResult res;
    res.history.reserve(cfg.max_iters);
    Vec x = x0;
    for (int k = 0; k < cfg.max_iters; ++k) {
        double alpha = cfg.relaxation ? cfg.relaxation(k) : cfg.alpha_min;
        alpha = std::clamp(alpha, cfg.alpha_min, cfg.alpha_max);
        auto [x_next, g] = dr_step(x, prox_f1, prox_f2, alpha, cfg.gamma);
        x = std::move(x_next);
        res.history.push_back(g);
        if (g <= fp_tol) {
            res.converged = true;
            break;
        }
    }
    res.x_final = std::move(x);
    return res;
}

}  // namespace

SolveReport solve_bpdq(const Vec& y, const SensingMatrix& matrix, const WeightVector& w,
                       const SolverConfig& cfg, const TubeProjectionConfig& tube_cfg) {
    cfg.validate();
    if (y.size() != matrix.rows()) throw std::invalid_argument("solve_bpdq: y length != rows");
    if (w.size() != matrix.cols()) throw std::invalid_argument("solve_bpdq: weight length != cols");

    const double eps = cfg.epsilon
                           ? *cfg.epsilon
                           : auto_epsilon(cfg.quant_bin_width, matrix.rows(), cfg.p,
                                          cfg.epsilon_slack);
    const TubeConstraint tube(matrix, y, eps, cfg.p);
    TubeProjector projector(tube, tube_cfg);

    const Index n = matrix.cols();
    const Vec x0 = cfg.x0 ? *cfg.x0 : Vec::Zero(n);
    if (x0.size() != n) throw std::invalid_argument("solve_bpdq: x0 length != cols");
    const double fp_tol = cfg.fp_tol ? *cfg.fp_tol : 1e-7 * std::sqrt(double(n));

    const ProxFn prox_f1 = [&](const Vec& v, double g) { return prox_weighted_l1(v, w, g); };
    const auto prox_f2 = [&](const Vec& v) { return projector.project(v); };

    EngineResult run = run_dr(x0, prox_f1, prox_f2, cfg, fp_tol);

    SolveReport report;
    report.estimate = Signal(projector.project(run.x_final));
    report.iterations = static_cast<int>(run.history.size());
    report.residual_history = std::move(run.history);
    report.converged = run.converged;
    report.epsilon = eps;
    report.feasibility_gap = lp_norm(y - matrix.apply(report.estimate.values), cfg.p) - eps;
    report.objective = weighted_l1_norm(report.estimate.values, w.weights);
    report.threads = omp_get_max_threads();
    return report;
}

SolveReport solve_bp(const Vec& y, const SensingMatrix& matrix, const WeightVector& w,
                     const SolverConfig& cfg) {
    cfg.validate();
    if (y.size() != matrix.rows()) throw std::invalid_argument("solve_bp: y length != rows");
    if (w.size() != matrix.cols()) throw std::invalid_argument("solve_bp: weight length != cols");
    if (!matrix.has_row_factorization())
        throw std::runtime_error("solve_bp: sensing matrix is row-rank-deficient");

    const Index n = matrix.cols();
    const Vec x0 = cfg.x0 ? *cfg.x0 : Vec::Zero(n);
    if (x0.size() != n) throw std::invalid_argument("solve_bp: x0 length != cols");
    const double fp_tol = cfg.fp_tol ? *cfg.fp_tol : 1e-7 * std::sqrt(double(n));

    const ProxFn prox_f1 = [&](const Vec& v, double g) { return prox_weighted_l1(v, w, g); };
    const auto prox_f2 = [&](const Vec& v) { return project_affine_set(v, matrix, y); };

    EngineResult run = run_dr(x0, prox_f1, prox_f2, cfg, fp_tol);

    SolveReport report;
    report.estimate = Signal(project_affine_set(run.x_final, matrix, y));
    report.iterations = static_cast<int>(run.history.size());
    report.residual_history = std::move(run.history);
    report.converged = run.converged;
    report.epsilon = 0.0;
    report.feasibility_gap = (y - matrix.apply(report.estimate.values)).norm();
    report.objective = weighted_l1_norm(report.estimate.values, w.weights);
    report.threads = omp_get_max_threads();
    return report;
}

}  // namespace wbpdq
