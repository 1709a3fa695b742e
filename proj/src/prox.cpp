#include "wbpdq/prox.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wbpdq/kernels.hpp"

namespace wbpdq {

namespace {

// Nonnegative root of u + p*lam*u^{p-1} = a on [0, a]. Normalized as
// tau + beta tau^{p-1} = 1 with tau = u/a; the start tau0 = (1+beta)^{-1/(p-1)}
// is exact in both the beta -> 0 and beta -> inf regimes, so the safeguarded
// Newton below converges in a handful of steps at any scale.
double shrink_coordinate(double a, double p, double lam) {
    if (a == 0.0 || lam == 0.0) return a;
    const double beta = p * lam * std::pow(a, p - 2.0);
    if (!(beta > 1e-16)) return a;  // shrink below resolution
    if (!std::isfinite(beta)) return 0.0;
    double lo = 0.0, hi = 1.0;
    double t = std::pow(1.0 + beta, -1.0 / (p - 1.0));
    for (int it = 0; it < 60; ++it) {
        const double tp2 = std::pow(t, p - 2.0);
        const double power_term = beta * tp2 * t;
        const double f = t + power_term - 1.0;
        // Terms are O(1), so this is the floating-point noise floor.
        if (std::abs(f) <= 1e-14 * (1.0 + power_term)) break;
        if (f > 0)
            hi = t;
        else
            lo = t;
        const double df = 1.0 + beta * (p - 1.0) * tp2;
        double next = t - f / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 4e-16 * t) {
            t = next;
            break;
        }
        t = next;
    }
    return a * t;
}

// Scalar solve on the multiplier: ||u(lam)||_p = 1 with u(lam) the
// coordinatewise shrink of |x|. Newton on lam with a maintained bisection
// bracket; a warm multiplier from a previous nearby call is used as the
// starting point. Terminates at | ||u||_p - 1 | <= 1e-12.
Vec project_ball_multiplier(const Vec& a, double p, double* hint) {
    Vec u(a.size());
    // One pass: u(lam), phi = ||u||_p - 1 and dphi/dlam.
    auto eval = [&](double lam, double& dphi) {
        double np = 0.0, slope = 0.0;
        for (Index i = 0; i < a.size(); ++i) {
            const double ui = shrink_coordinate(a[i], p, lam);
            u[i] = ui;
            if (ui == 0.0) continue;
            const double p2 = std::pow(ui, p - 2.0);
            const double p1 = p2 * ui;
            np += p1 * ui;
            slope -= p * p1 * p1 / (1.0 + p * (p - 1.0) * lam * p2);
        }
        const double norm = std::pow(np, 1.0 / p);
        dphi = norm > 0.0 ? std::pow(norm, 1.0 - p) * slope : 0.0;
        return norm - 1.0;
    };

    double lo = 0.0, hi = kInf;  // phi(lo) > 0, phi(hi) < 0
    double lam = (hint && *hint > 0.0 && std::isfinite(*hint)) ? *hint : 1.0;
    double dphi = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double phi = eval(lam, dphi);
        if (std::abs(phi) <= 1e-12) {
            if (hint) *hint = lam;
            return u;
        }
        if (phi > 0.0)
            lo = lam;
        else
            hi = lam;
        double next = dphi < 0.0 ? lam - phi / dphi : -1.0;
        if (!(next > lo) || !(next < hi)) next = hi == kInf ? 8.0 * lam : 0.5 * (lo + hi);
        if (hi != kInf && hi - lo <= 1e-16 * hi) break;
        lam = next;
        if (!(lam > 0.0) || lam > 1e120)
            throw std::runtime_error("project_lp_ball: multiplier search failed");
    }
    if (hint) *hint = lam;
    return u;
}

// One Newton solve of the KKT system
//   F_i = u_i - a_i + p*lam*u_i^{p-1},  F_last = sum u_i^p - 1
// on the positive coordinates of a. Returns false if the iterate leaves the
// domain or fails to reach tol.
bool project_ball_newton(const Vec& a, double p, const NewtonConfig& cfg, Vec& u_out) {
    std::vector<Index> pos;
    pos.reserve(a.size());
    for (Index i = 0; i < a.size(); ++i)
        if (a[i] > 0.0) pos.push_back(i);
    const auto n = static_cast<Index>(pos.size());
    if (n == 0) {
        u_out = Vec::Zero(a.size());
        return true;
    }

    Vec av(n);
    for (Index j = 0; j < n; ++j) av[j] = a[pos[j]];

    const double anorm = lp_norm(av, p);
    Vec u = av / anorm;

    // lam0 = argmin of the linear-in-lam residual components, least squares.
    double num = 0.0, den = 0.0;
    for (Index j = 0; j < n; ++j) {
        const double b = p * std::pow(u[j], p - 1.0);
        num -= (u[j] - av[j]) * b;
        den += b * b;
    }
    double lam = den > 0 ? num / den : 0.0;
    if (!(lam > 0.0)) lam = 1e-12;

    Vec fu(n), b(n), d(n), du(n);
    for (int it = 0; it < cfg.max_iters; ++it) {
        double fc = -1.0;
        for (Index j = 0; j < n; ++j) {
            const double up2 = std::pow(u[j], p - 2.0);
            const double up1 = up2 * u[j];
            b[j] = p * up1;
            fu[j] = u[j] - av[j] + lam * b[j];
            d[j] = 1.0 + p * (p - 1.0) * lam * up2;
            fc += up1 * u[j];
        }
        const double res = std::sqrt(fu.squaredNorm() + fc * fc);
        if (!std::isfinite(res)) return false;
        if (res <= cfg.tol) {
            u_out = Vec::Zero(a.size());
            for (Index j = 0; j < n; ++j) u_out[pos[j]] = u[j];
            return true;
        }
        // Arrow-structured Newton step via the Schur complement on lam.
        double bdb = 0.0, bdf = 0.0;
        for (Index j = 0; j < n; ++j) {
            bdb += b[j] * b[j] / d[j];
            bdf += b[j] * fu[j] / d[j];
        }
        if (!(bdb > 0.0)) return false;
        const double dlam = (fc - bdf) / (-bdb);
        for (Index j = 0; j < n; ++j) du[j] = (-fu[j] - b[j] * dlam) / d[j];

        // Damped step: stay strictly inside {u > 0, lam >= 0}.
        double step = 1.0;
        if (dlam < 0.0) step = std::min(step, -0.95 * lam / dlam);
        for (Index j = 0; j < n; ++j)
            if (du[j] < 0.0) step = std::min(step, -0.95 * u[j] / du[j]);
        if (!(step > 1e-14)) return false;
        lam += step * dlam;
        u += step * du;
        if (!std::isfinite(lam) || !u.allFinite()) return false;
    }
    return false;
}

}  // namespace

Vec prox_weighted_l1(const Vec& x, const WeightVector& w, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_weighted_l1: gamma must be positive");
    if (x.size() != w.size()) throw std::invalid_argument("prox_weighted_l1: size mismatch");
    Vec out;
    kernels::soft_threshold(x, gamma * w.weights, out);
    return out;
}

Vec project_lp_ball(const Vec& x, double p, const NewtonConfig& cfg) {
    if (!(p >= 2.0)) throw std::invalid_argument("project_lp_ball: p must be >= 2");
    if (p == kInf) return x.cwiseMax(-1.0).cwiseMin(1.0);
    const double nrm = lp_norm(x, p);
    if (nrm <= 1.0) return x;
    if (p == 2.0) return x / nrm;

    const Vec a = x.cwiseAbs();
    Vec u;
    if (!project_ball_newton(a, p, cfg, u)) {
        if (!cfg.bisection_fallback)
            throw std::runtime_error("project_lp_ball: Newton did not converge");
        u = project_ball_multiplier(a, p, nullptr);
    }
    Vec out(x.size());
    for (Index i = 0; i < x.size(); ++i) out[i] = std::copysign(u[i], x[i]);
    return out;
}

Vec project_affine_set(const Vec& x, const SensingMatrix& matrix, const Vec& y) {
    if (x.size() != matrix.cols() || y.size() != matrix.rows())
        throw std::invalid_argument("project_affine_set: size mismatch");
    return x + matrix.least_norm_solve(y - matrix.apply(x));
}

Vec prox_composition(const ProxFn& prox_f, const Mat& L, double nu, const Vec& x,
                     bool verify_tight_frame) {
    if (!(nu > 0.0)) throw std::invalid_argument("prox_composition: nu must be positive");
    if (L.cols() != x.size()) throw std::invalid_argument("prox_composition: size mismatch");
    if (verify_tight_frame) {
        const Mat gram = L * L.transpose();
        const double dev = (gram - nu * Mat::Identity(L.rows(), L.rows()))
                               .cwiseAbs()
                               .maxCoeff();
        if (dev > 1e-8 * std::max(1.0, nu))
            throw std::invalid_argument("prox_composition: L L^T != nu Id");
    }
    const Vec lx = L * x;
    return x + (1.0 / nu) * (L.transpose() * (prox_f(lx, nu) - lx));
}

TubeProjector::TubeProjector(const TubeConstraint& tube, TubeProjectionConfig cfg,
                             NewtonConfig ball_cfg)
    : tube_(tube),
      cfg_(cfg),
      ball_cfg_(ball_cfg),
      dual_p_(dual_exponent(tube.p)),
      lambda_(Vec::Zero(tube.matrix->rows())) {
    if (!(cfg_.inner_tol > 0.0))
        throw std::invalid_argument("TubeProjectionConfig: inner_tol must be positive");
}

Vec TubeProjector::project(const Vec& x) {
    const SensingMatrix& m = *tube_.matrix;
    if (x.size() != m.cols()) throw std::invalid_argument("project_tube: size mismatch");
    const Vec r0 = m.apply(x) - tube_.y;
    last_inner_iters_ = 0;
    if (lp_norm(r0, tube_.p) <= tube_.epsilon) return x;
    if (cfg_.method == TubeMethod::tight_frame) return project_tight_frame(x, r0);
    return project_iterative_dual(x, r0);
}

// Ball projection tuned for the repeated inner calls: the multiplier is
// warm-started across iterations, and the full Newton attempt is dropped
// once it has failed a few times on this problem's geometry.
Vec TubeProjector::ball_project(const Vec& v) {
    const double p = tube_.p;
    if (p == 2.0 || p == kInf) return project_lp_ball(v, p, ball_cfg_);
    if (lp_norm(v, p) <= 1.0) return v;
    const Vec a = v.cwiseAbs();
    Vec u;
    bool ok = false;
    if (newton_failures_ < 3) {
        ok = project_ball_newton(a, p, ball_cfg_, u);
        newton_failures_ = ok ? 0 : newton_failures_ + 1;
    }
    if (!ok) u = project_ball_multiplier(a, p, &ball_hint_);
    Vec out(v.size());
    for (Index i = 0; i < v.size(); ++i) out[i] = std::copysign(u[i], v[i]);
    return out;
}

// Prop-style single application of the composition rule with
// nu = ||Phi Phi^T||; exact only when the row Gram is a multiple of Id.
Vec TubeProjector::project_tight_frame(const Vec& x, const Vec& r0) const {
    const SensingMatrix& m = *tube_.matrix;
    const double nu = m.op_norm_sq();
    if (!(nu > 0.0)) throw std::runtime_error("project_tube: zero operator norm");
    const Vec scaled = r0 / tube_.epsilon;
    const Vec proj = project_lp_ball(scaled, tube_.p, ball_cfg_);
    return x + (tube_.epsilon / nu) * m.apply_transpose(proj - scaled);
}

// Accelerated gradient projection on the dual of
//   min ||u - x||_2^2 / 2  s.t.  ||Phi u - y||_p <= eps,
// i.e. minimize  h(l) = l^T G l / 2 - l^T r0 + eps ||l||_{p*},
// with the nonsmooth prox evaluated through the lp-ball projection (Moreau).
// The primal iterate is u = x - Phi^T l.
Vec TubeProjector::project_iterative_dual(const Vec& x, const Vec& r0) {
    const SensingMatrix& m = *tube_.matrix;
    const Mat& gram = m.row_gram();
    const double lip = m.op_norm_sq();
    if (!(lip > 0.0)) throw std::runtime_error("project_tube: zero operator norm");
    const double tau = 1.0 / lip;
    const double shift = tau * tube_.epsilon;
    const double rscale = std::max(1.0, lp_norm(r0, tube_.p));

    Vec lam = lambda_;
    Vec z = lam;
    double t = 1.0;
    bool done = false;
    for (int it = 0; it < cfg_.inner_max_iters; ++it) {
        const Vec grad = gram * z - r0;
        const Vec w = z - tau * grad;
        const Vec lam_next = w - shift * ball_project(w / shift);
        const double step = (lam_next - lam).norm();
        last_inner_iters_ = it + 1;

        const bool small_step = step <= cfg_.inner_tol * std::max(1.0, lam_next.norm());
        if (small_step) {
            const double resid = lp_norm(r0 - gram * lam_next, tube_.p);
            if (resid <= tube_.epsilon * (1.0 + cfg_.inner_tol) ||
                resid <= tube_.epsilon + cfg_.inner_tol * rscale) {
                lam = lam_next;
                done = true;
                break;
            }
        }
        // Gradient-based adaptive restart.
        if ((z - lam_next).dot(lam_next - lam) > 0.0) {
            z = lam_next;
            t = 1.0;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            z = lam_next + ((t - 1.0) / t_next) * (lam_next - lam);
            t = t_next;
        }
        lam = lam_next;
    }
    if (!done) throw std::runtime_error("project_tube: inner iteration did not converge");
    lambda_ = lam;
    return x - m.apply_transpose(lam);
}

Vec project_tube(const Vec& x, const TubeConstraint& tube, const TubeProjectionConfig& cfg) {
    TubeProjector proj(tube, cfg);
    return proj.project(x);
}

}  // namespace wbpdq
