#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "wbpdq/prox.hpp"
#include "wbpdq/types.hpp"

namespace wbpdq {

struct SolverConfig {
    double p = 2.0;
    /// Residual tolerance of the tube; nullopt resolves it from the
    /// quantizer bin width (see auto_epsilon).
    std::optional<double> epsilon;
    double quant_bin_width = 0.0;  // required when epsilon is auto
    double epsilon_slack = 1.1;
    double gamma = 1.0;
    /// Relaxation: constant alpha_min(==alpha_max) by default; an optional
    /// schedule is clamped into [alpha_min, alpha_max] each step.
    double alpha_min = 1.0;
    double alpha_max = 1.0;
    std::function<double(int)> relaxation;
    int max_iters = 800;
    /// Threshold on ||G(x_k)||_2; default 1e-7 * sqrt(N).
    std::optional<double> fp_tol;
    std::optional<Vec> x0;

    void validate() const;
};

struct SolveReport {
    Signal estimate;
    int iterations = 0;
    std::vector<double> residual_history;  // ||G(x_k)||_2 per step
    double feasibility_gap = 0.0;          // ||y - Phi xhat||_p - epsilon
    double objective = 0.0;                // ||xhat||_{w,1}
    bool converged = false;
    double epsilon = 0.0;  // resolved value
    int threads = 1;
};

/// Tube half-width for quantized data: (alpha/2) (m/(p+1))^{1/p} * slack for
/// finite p, alpha/2 for p = inf.
double auto_epsilon(double bin_width, Index m, double p, double slack = 1.1);

/// One relaxed Douglas-Rachford step:
///   x+ = x + alpha [prox_{gamma f1}(2 prox_{f2}(x) - x) - prox_{f2}(x)].
/// Returns (x+, ||G(x)||_2); each prox is evaluated exactly once.
std::pair<Vec, double> dr_step(const Vec& x, const ProxFn& prox_f1,
                               const std::function<Vec(const Vec&)>& prox_f2,
                               double alpha, double gamma);

/// Weighted basis pursuit dequantization:
///   min ||x||_{w,1}  s.t.  ||Phi x - y||_p <= epsilon.
SolveReport solve_bpdq(const Vec& y, const SensingMatrix& matrix, const WeightVector& w,
                       const SolverConfig& cfg, const TubeProjectionConfig& tube_cfg = {});

/// Noiseless weighted basis pursuit: min ||x||_{w,1} s.t. Phi x = y.
SolveReport solve_bp(const Vec& y, const SensingMatrix& matrix, const WeightVector& w,
                     const SolverConfig& cfg);

}  // namespace wbpdq
