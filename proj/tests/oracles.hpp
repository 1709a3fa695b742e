#pragma once

// Independent reference implementations used only by the test suites. These
// deliberately avoid the library's code paths: projections are solved by
// multiplier bisection, constrained programs by log-barrier Newton methods,
// and scalar proxes by golden-section search.

#include <functional>

#include "wbpdq/rng.hpp"
#include "wbpdq/types.hpp"

namespace wbpdq::oracles {

/// Minimize a unimodal function on [lo, hi] to the given x tolerance.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-12);

/// argmin_z (1/2)(z - x)^2 + gamma * w * |z| by coarse grid + golden section.
double scalar_prox_l1(double x, double w, double gamma);

/// Euclidean projection onto the unit lp ball by bisection on the KKT
/// multiplier (coordinate solves are pure bisection).
Vec project_lp_ball_bisection(const Vec& x, double p);

/// min ||u - x||_2 s.t. ||y - Phi u||_p <= eps by log-barrier Newton.
Vec project_tube_barrier(const Vec& x, const Mat& phi, const Vec& y, double eps, double p);

/// min sum_i w_i |x_i| s.t. ||Phi x - y||_2 <= eps (log-barrier on the
/// epigraph formulation).
Vec bpdq_p2_barrier(const Mat& phi, const Vec& y, const Vec& w, double eps);

/// min sum_i w_i |x_i| s.t. Phi x = y (equality-constrained barrier LP).
Vec bp_barrier(const Mat& phi, const Vec& y, const Vec& w);

struct RipExtremes {
    double lo = 0.0, hi = 0.0;  // extreme singular values over all supports
    double mu = 0.0, delta = 0.0;
};

/// Per-support singular-value sweep via JacobiSVD.
RipExtremes rip_exact_svd(const Mat& phi, Index s);

/// Exhaustive cone test over all size-s supports.
bool cone_member_exhaustive(const Vec& x, const Vec& weights, double rho, Index s, double q);

/// Random rotation of [I_m | extra flat sign columns] with permuted columns:
/// an m x (m + extras) matrix whose low-order restricted-isometry constants
/// are small by construction (roughly sqrt(3/m) at order 4), so derived
/// null-space certificates exist. Used to build certifiable test instances.
Mat certifiable_matrix(Rng& rng, Index m, Index extras);

}  // namespace wbpdq::oracles
