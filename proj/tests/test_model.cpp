#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wbpdq/model.hpp"
#include "wbpdq/rng.hpp"

using namespace wbpdq;

TEST_CASE("make_weights: pointwise construction") {
    const WeightVector w = make_weights({0, 2}, 0.5, 8);
    Vec expect(8);
    expect << 0.5, 1, 0.5, 1, 1, 1, 1, 1;
    CHECK((w.weights - expect).cwiseAbs().maxCoeff() == 0.0);

    const WeightVector empty = make_weights({}, 0.5, 4);
    CHECK((empty.weights.array() == 1.0).all());

    const WeightVector full = make_weights({0, 1, 2, 3, 4, 5, 6, 7}, 0.5, 8);
    CHECK((full.weights.array() == 0.5).all());
}

TEST_CASE("make_weights: errors and idempotence") {
    CHECK_THROWS_AS(make_weights({8}, 0.5, 8), std::invalid_argument);
    CHECK_THROWS_AS(make_weights({-1}, 0.5, 8), std::invalid_argument);
    CHECK_THROWS_AS(make_weights({0}, 0.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(make_weights({0}, 1.0, 8), std::invalid_argument);

    // Rebuilding from the stored prior support reproduces the weights.
    const WeightVector w = make_weights({1, 5, 6}, 0.25, 9);
    const WeightVector again = make_weights(w.prior_support, w.theta, w.size());
    CHECK((w.weights.array() == again.weights.array()).all());
}

TEST_CASE("quantize: mid-riser examples") {
    const Quantizer q(1.0);
    CHECK(quantize(Vec::Constant(1, 0.3), q)[0] == 0.5);
    CHECK(quantize(Vec::Constant(1, -0.2), q)[0] == -0.5);
    Vec v(2);
    v << 1.7, 2.0;
    const Vec out = quantize(v, q);
    CHECK(out[0] == 1.5);
    CHECK(out[1] == 2.5);

    Vec bad(1);
    bad[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(quantize(bad, q), std::invalid_argument);
    CHECK_THROWS_AS(Quantizer(0.0), std::invalid_argument);
}

TEST_CASE("quantize: lattice and half-bin bound") {
    Rng rng(31);
    for (double alpha : {0.25, 1.0, 3.5}) {
        const Quantizer q(alpha);
        Vec v(2000);
        for (Index i = 0; i < v.size(); ++i) v[i] = 50.0 * rng.normal();
        const Vec out = quantize(v, q);
        CHECK((out - v).cwiseAbs().maxCoeff() <= alpha / 2.0);
        for (Index i = 0; i < v.size(); ++i) {
            const double k = (out[i] - alpha / 2.0) / alpha;
            CHECK(std::abs(k - std::round(k)) < 1e-12 * std::max(1.0, std::abs(k)));
        }
    }
}

TEST_CASE("weighted_s_term_error: examples") {
    Vec x(3);
    x << 3, 1, 2;
    const WeightVector ones = make_weights({}, 0.5, 3);
    CHECK(weighted_s_term_error(Signal(x), ones, 1) == doctest::Approx(3.0));

    const WeightVector w = make_weights({0}, 0.1, 3);
    CHECK(weighted_s_term_error(Signal(x), w, 1) == doctest::Approx(1.3));

    Vec sparse = Vec::Zero(6);
    sparse[1] = 4.0;
    sparse[4] = -2.0;
    CHECK(weighted_s_term_error(Signal(sparse), make_weights({2}, 0.7, 6), 2) ==
          doctest::Approx(0.0));

    CHECK_THROWS_AS(weighted_s_term_error(Signal(x), ones, 0), std::invalid_argument);
    CHECK_THROWS_AS(weighted_s_term_error(Signal(x), ones, 4), std::invalid_argument);
}

TEST_CASE("weighted_s_term_error: monotone in s, matches sort-and-sum for unit weights") {
    Rng rng(32);
    for (int rep = 0; rep < 30; ++rep) {
        const Index n = 12;
        Vec x = rng.normal_vector(n);
        const Signal sig(x);
        const WeightVector ones = make_weights({}, 0.5, n);
        double prev = kInf;
        for (Index s = 1; s <= n; ++s) {
            const double e = weighted_s_term_error(sig, ones, s);
            CHECK(e <= prev + 1e-15);
            prev = e;

            // Classical best s-term l1 oracle: sort |x| descending, sum tail.
            std::vector<double> mags(n);
            for (Index i = 0; i < n; ++i) mags[i] = std::abs(x[i]);
            std::sort(mags.begin(), mags.end(), std::greater<>());
            double tail = 0.0;
            for (Index i = s; i < n; ++i) tail += mags[i];
            CHECK(e == doctest::Approx(tail).epsilon(1e-12));
        }
        CHECK(weighted_s_term_error(sig, ones, n) == doctest::Approx(0.0));
    }
}

TEST_CASE("snr_db: examples and sentinel") {
    Rng rng(33);
    Vec x = rng.normal_vector(16);
    const Signal truth(x);
    CHECK(snr_db(truth, Signal(Vec::Zero(16))) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(snr_db(truth, truth) == kInf);

    Vec scaled = x * (10.0 / x.norm());
    Vec err = rng.normal_vector(16);
    err *= 0.1 / err.norm();
    CHECK(snr_db(Signal(scaled), Signal(scaled + err)) == doctest::Approx(40.0).epsilon(1e-9));

    CHECK_THROWS_AS(snr_db(Signal(Vec::Zero(4)), Signal(Vec::Zero(4))), std::invalid_argument);
}

TEST_CASE("Signal: support invariant enforced") {
    Vec v(4);
    v << 1, 0, 2, 0;
    CHECK_NOTHROW(Signal(v, IndexSet{0, 2}));
    CHECK_THROWS_AS(Signal(v, IndexSet{0}), std::invalid_argument);
    CHECK_THROWS_AS(Signal(v, IndexSet{0, 2, 9}), std::invalid_argument);
}
