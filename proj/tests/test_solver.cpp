#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "wbpdq/model.hpp"
#include "wbpdq/rng.hpp"
#include "wbpdq/solver.hpp"

using namespace wbpdq;

namespace {

Mat random_matrix(Rng& rng, Index rows, Index cols) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

struct SmallInstance {
    SensingMatrix matrix;
    Vec y;
    Vec truth;
    double epsilon;
};

SmallInstance make_small_bpdq(Rng& rng, Index n, Index m, Index k, double noise) {
    Mat phi = random_matrix(rng, m, n);
    Vec x = Vec::Zero(n);
    for (Index i : rng.sample_indices(n, k)) x[i] = rng.normal() + (rng.normal() > 0 ? 1.0 : -1.0);
    Vec e = rng.normal_vector(m);
    e *= noise / e.norm();
    SensingMatrix sm(std::move(phi));
    Vec y = sm.apply(x) + e;
    return {std::move(sm), std::move(y), std::move(x), 1.5 * noise};
}

}  // namespace

TEST_CASE("dr_step: fixed points, indicator of zero, hand-composed threshold") {
    Rng rng(201);
    const Index n = 7;
    const WeightVector ones = make_weights({}, 0.5, n);
    const ProxFn l1 = [&](const Vec& v, double g) { return prox_weighted_l1(v, ones, g); };
    const auto identity = [](const Vec& v) { return v; };
    const auto to_zero = [](const Vec& v) { return Vec::Zero(v.size()); };
    const ProxFn zero_fn = [](const Vec& v, double) { return Vec::Zero(v.size()); };

    // Fixed point: f1 = f2 = indicator of the whole space (prox = identity).
    const ProxFn id_fn = [](const Vec& v, double) { return v; };
    const Vec x = rng.normal_vector(n);
    auto [next, g] = dr_step(x, id_fn, identity, 1.0, 1.0);
    CHECK(g == 0.0);
    CHECK((next - x).norm() == 0.0);

    // Both proxes map to zero: G(x) = 0, so x is unchanged and g = 0.
    auto [next0, g0] = dr_step(x, zero_fn, to_zero, 0.7, 1.0);
    CHECK(g0 == 0.0);
    CHECK((next0 - x).norm() == 0.0);

    // f2 trivial: one step is x + alpha (S_gamma(x) - x).
    const double alpha = 1.3;
    auto [next1, g1] = dr_step(x, l1, identity, alpha, 1.0);
    const Vec expect = x + alpha * (prox_weighted_l1(x, ones, 1.0) - x);
    CHECK((next1 - expect).norm() < 1e-14);
    CHECK(g1 == doctest::Approx((x - prox_weighted_l1(x, ones, 1.0)).norm()));

    CHECK_THROWS_AS(dr_step(x, l1, identity, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dr_step(x, l1, identity, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("solve_bpdq: zero is returned when the origin is feasible") {
    Rng rng(202);
    const Index m = 6, n = 10;
    const SensingMatrix sm(random_matrix(rng, m, n));
    Vec y = rng.normal_vector(m);
    y *= 0.5 / lp_norm(y, 2.0);
    SolverConfig cfg;
    cfg.p = 2.0;
    cfg.epsilon = 1.0;
    const SolveReport rep = solve_bpdq(y, sm, make_weights({}, 0.5, n), cfg);
    CHECK(rep.converged);
    CHECK(rep.estimate.values.norm() == 0.0);
    CHECK(rep.iterations >= 1);
    CHECK(rep.residual_history.size() == static_cast<std::size_t>(rep.iterations));
}

TEST_CASE("solve_bpdq: identity sensing with tiny epsilon pins the estimate to y") {
    Rng rng(203);
    const Index n = 8;
    const SensingMatrix eye(Mat::Identity(n, n));
    const Vec y = rng.normal_vector(n);
    SolverConfig cfg;
    cfg.p = 2.0;
    cfg.epsilon = 1e-9;
    cfg.max_iters = 5000;
    const SolveReport rep = solve_bpdq(y, eye, make_weights({}, 0.5, n), cfg);
    CHECK((rep.estimate.values - y).norm() < 1e-6);
    CHECK(rep.feasibility_gap <= 1e-9 * 1e-6 + 1e-15);
}

TEST_CASE("solve_bpdq: matches the interior-point oracle on small instances") {
    Rng rng(204);
    for (int rep = 0; rep < 5; ++rep) {
        const SmallInstance inst = make_small_bpdq(rng, 20, 10, 2, 0.05);
        const WeightVector w = make_weights(rng.sample_indices(20, 4), 0.5, 20);
        SolverConfig cfg;
        cfg.p = 2.0;
        cfg.epsilon = inst.epsilon;
        cfg.max_iters = 30000;
        cfg.fp_tol = 1e-11;
        const SolveReport report = solve_bpdq(inst.y, inst.matrix, w, cfg);
        const Vec oracle =
            oracles::bpdq_p2_barrier(inst.matrix.entries(), inst.y, w.weights, inst.epsilon);
        CHECK((report.estimate.values - oracle).norm() < 1e-4);
        CHECK(report.converged);
    }
}

TEST_CASE("solve_bpdq: optimality certificate and weighted-l1 minimality") {
    Rng rng(205);
    const SmallInstance inst = make_small_bpdq(rng, 16, 8, 2, 0.03);
    const WeightVector w = make_weights(rng.sample_indices(16, 3), 0.4, 16);
    const double gamma = 0.7;
    SolverConfig cfg;
    cfg.p = 2.0;
    cfg.epsilon = inst.epsilon;
    cfg.max_iters = 40000;
    cfg.fp_tol = 1e-12;
    cfg.gamma = gamma;
    const SolveReport report = solve_bpdq(inst.y, inst.matrix, w, cfg);
    REQUIRE(report.converged);

    const Vec est = report.estimate.values;
    // True signal is feasible by construction, so the minimizer's objective
    // cannot exceed the truth's.
    CHECK(weighted_l1_norm(est, w.weights) <=
          weighted_l1_norm(inst.truth, w.weights) + 1e-6);
    CHECK(report.feasibility_gap <= cfg.epsilon.value() * 1e-6);

    // Recover the fixed point x* with a manual run, then check the
    // certificate: y_est - x* is a gamma-scaled weighted-l1 subgradient at
    // y_est = prox_f2(x*).
    const TubeConstraint tc(inst.matrix, inst.y, inst.epsilon, 2.0);
    TubeProjectionConfig tube;
    tube.inner_tol = 1e-12;
    tube.inner_max_iters = 20000;
    TubeProjector proj(tc, tube);
    const ProxFn f1 = [&](const Vec& v, double g) { return prox_weighted_l1(v, w, g); };
    const auto f2 = [&](const Vec& v) { return proj.project(v); };
    Vec x = Vec::Zero(16);
    for (int k = 0; k < 60000; ++k) {
        auto [nx, g] = dr_step(x, f1, f2, 1.0, gamma);
        x = nx;
        if (g < 1e-13) break;
    }
    const Vec y_est = f2(x);
    for (Index i = 0; i < 16; ++i) {
        const double diff = y_est[i] - x[i];
        CHECK(std::abs(diff) <= gamma * w.weights[i] + 1e-6);
        if (std::abs(y_est[i]) > 1e-7) {
            const double expect = gamma * w.weights[i] * (y_est[i] > 0 ? 1.0 : -1.0);
            CHECK(std::abs(diff - expect) < 1e-6);
        }
    }
    CHECK((y_est - est).norm() < 1e-6);
}

TEST_CASE("solve_bpdq: residual history decreases and gamma leaves the solution unchanged") {
    Rng rng(206);
    const SmallInstance inst = make_small_bpdq(rng, 14, 7, 2, 0.04);
    const WeightVector w = make_weights({}, 0.5, 14);
    SolverConfig cfg;
    cfg.p = 2.0;
    cfg.epsilon = inst.epsilon;
    cfg.max_iters = 30000;
    cfg.fp_tol = 1e-11;
    const SolveReport a = solve_bpdq(inst.y, inst.matrix, w, cfg);
    REQUIRE(a.converged);
    CHECK(a.residual_history.back() < a.residual_history.front());
    double best = kInf;
    for (double r : a.residual_history) {
        best = std::min(best, r);
        CHECK(r >= best);  // min-so-far is nonincreasing by construction
    }

    SolverConfig cfg2 = cfg;
    cfg2.gamma = 2.0 * cfg.gamma;
    const SolveReport b = solve_bpdq(inst.y, inst.matrix, w, cfg2);
    REQUIRE(b.converged);
    CHECK((a.estimate.values - b.estimate.values).norm() < 1e-4);
}

TEST_CASE("solve_bpdq: iterates approach the fixed point monotonically") {
    Rng rng(207);
    const SmallInstance inst = make_small_bpdq(rng, 12, 6, 2, 0.05);
    const WeightVector w = make_weights({}, 0.5, 12);

    // Reference fixed point from a tight run.
    SolverConfig tight;
    tight.p = 2.0;
    tight.epsilon = inst.epsilon;
    tight.max_iters = 60000;
    tight.fp_tol = 1e-13;
    TubeProjectionConfig tube;
    tube.inner_tol = 1e-12;
    tube.inner_max_iters = 20000;

    const TubeConstraint tc(inst.matrix, inst.y, inst.epsilon, 2.0);
    TubeProjector ref_proj(tc, tube);
    Vec x = Vec::Zero(12);
    const ProxFn f1 = [&](const Vec& v, double g) { return prox_weighted_l1(v, w, g); };
    const auto f2 = [&](const Vec& v) { return ref_proj.project(v); };
    std::vector<Vec> iterates;
    for (int k = 0; k < 20000; ++k) {
        auto [nx, g] = dr_step(x, f1, f2, 1.0, 1.0);
        x = nx;
        if (k < 200) iterates.push_back(x);
        if (g < 1e-13) break;
    }
    const Vec xstar = x;
    double prev = kInf;
    for (const auto& xk : iterates) {
        const double d = (xk - xstar).norm();
        CHECK(d <= prev + 1e-10);
        prev = d;
    }
}

TEST_CASE("solve_bp: trivial cases and exact recovery vs the LP oracle") {
    Rng rng(208);

    const Index n = 6;
    const SensingMatrix square(random_matrix(rng, n, n));
    const Vec y0 = Vec::Zero(n);
    SolverConfig cfg;
    cfg.max_iters = 4000;
    const WeightVector ones6 = make_weights({}, 0.5, n);
    const SolveReport zero_rep = solve_bp(y0, square, ones6, cfg);
    CHECK(zero_rep.estimate.values.norm() < 1e-9);

    const Vec target = rng.normal_vector(n);
    const SolveReport inv_rep = solve_bp(target, square, ones6, cfg);
    const Vec direct = square.entries().partialPivLu().solve(target);
    CHECK((inv_rep.estimate.values - direct).norm() < 1e-7);

    // 1-sparse recovery at n = 16, m = 8.
    const Index nn = 16, m = 8;
    const SensingMatrix sm(random_matrix(rng, m, nn));
    Vec truth = Vec::Zero(nn);
    truth[5] = 2.0;
    const Vec y = sm.apply(truth);
    const WeightVector ones = make_weights({}, 0.5, nn);
    SolverConfig cfg2;
    cfg2.max_iters = 20000;
    cfg2.fp_tol = 1e-11;
    const SolveReport rep = solve_bp(y, sm, ones, cfg2);
    CHECK((rep.estimate.values - truth).norm() < 1e-6);
    const Vec oracle = oracles::bp_barrier(sm.entries(), y, ones.weights);
    CHECK((rep.estimate.values - oracle).norm() < 1e-5);
    CHECK((sm.apply(rep.estimate.values) - y).norm() <= 1e-8 * y.norm());

    Mat bad(2, 3);
    bad.row(0) << 1, 1, 1;
    bad.row(1) << 2, 2, 2;
    CHECK_THROWS_AS(solve_bp(Vec::Zero(2), SensingMatrix(bad), make_weights({}, 0.5, 3), cfg),
                    std::runtime_error);
}

TEST_CASE("auto_epsilon: closed form and empirical quantile at m = 256") {
    CHECK(auto_epsilon(2.0, 4, kInf) == doctest::Approx(1.0));
    CHECK(auto_epsilon(1.0, 256, 2.0, 1.0) ==
          doctest::Approx(0.5 * std::sqrt(256.0 / 3.0)));

    // With the default slack, uniform quantization noise lands inside the
    // tube at least 95% of the time.
    Rng rng(209);
    const Index m = 256;
    const double alpha = 1.0;
    for (double p : {2.0, 4.0, 10.0}) {
        const double eps = auto_epsilon(alpha, m, p);
        int ok = 0;
        const int reps = 2000;
        for (int rep = 0; rep < reps; ++rep) {
            Vec noise(m);
            for (Index i = 0; i < m; ++i) noise[i] = alpha * (rng.uniform01() - 0.5);
            if (lp_norm(noise, p) <= eps) ++ok;
        }
        CHECK(ok >= static_cast<int>(0.95 * reps));
    }
}

TEST_CASE("SolverConfig validation") {
    SolverConfig cfg;
    cfg.alpha_min = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.alpha_max = 2.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.p = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
