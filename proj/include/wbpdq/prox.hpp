#pragma once

#include <functional>

#include "wbpdq/types.hpp"

namespace wbpdq {

/// Newton solve of the lp-ball projection KKT system.
struct NewtonConfig {
    int max_iters = 100;
    double tol = 1e-10;  // on the l2 norm of the KKT residual
    bool bisection_fallback = true;
};

enum class TubeMethod { tight_frame, iterative_dual };

struct TubeProjectionConfig {
    TubeMethod method = TubeMethod::iterative_dual;
    int inner_max_iters = 2000;
    double inner_tol = 1e-8;
};

/// prox of gamma * ||.||_{w,1}: componentwise shrink by gamma * w_i.
Vec prox_weighted_l1(const Vec& x, const WeightVector& w, double gamma);

/// Euclidean projection onto the unit lp ball, p in [2, inf]. Closed form for
/// p in {2, inf}; Newton on the KKT system otherwise, with an optional
/// bisection fallback on the multiplier.
Vec project_lp_ball(const Vec& x, double p, const NewtonConfig& cfg = {});

/// Projection onto {u : ||y - Phi u||_p <= epsilon}. Feasible inputs are
/// returned unchanged.
Vec project_tube(const Vec& x, const TubeConstraint& tube,
                 const TubeProjectionConfig& cfg = {});

/// Projection onto {u : Phi u = y} through the cached row-Gram factorization.
Vec project_affine_set(const Vec& x, const SensingMatrix& matrix, const Vec& y);

/// A prox family: (v, scale) -> prox_{scale * f}(v).
using ProxFn = std::function<Vec(const Vec&, double)>;

/// prox of f(L .) for a linear map with L L^T = nu * Id:
/// x + nu^{-1} L^T (prox_{nu f}(L x) - L x). When verify_tight_frame is set,
/// the frame identity is checked to 1e-8 first.
Vec prox_composition(const ProxFn& prox_f, const Mat& L, double nu, const Vec& x,
                     bool verify_tight_frame = false);

/// Repeated tube projections with a warm-started dual variable. project() is
/// deterministic given the call sequence; the class is not thread-safe.
class TubeProjector {
public:
    TubeProjector(const TubeConstraint& tube, TubeProjectionConfig cfg,
                  NewtonConfig ball_cfg = {});

    Vec project(const Vec& x);

    int last_inner_iters() const { return last_inner_iters_; }

private:
    Vec project_iterative_dual(const Vec& x, const Vec& residual0);
    Vec project_tight_frame(const Vec& x, const Vec& residual0) const;
    Vec ball_project(const Vec& v);

    const TubeConstraint tube_;
    TubeProjectionConfig cfg_;
    NewtonConfig ball_cfg_;
    double dual_p_;
    Vec lambda_;  // warm-started dual state
    double ball_hint_ = 0.0;
    int newton_failures_ = 0;
    int last_inner_iters_ = 0;
};

}  // namespace wbpdq
