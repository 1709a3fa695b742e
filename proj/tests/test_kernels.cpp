#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wbpdq/kernels.hpp"
#include "wbpdq/rng.hpp"
#include "wbpdq/types.hpp"

using namespace wbpdq;
using kernels::Exec;

namespace {

Mat random_matrix(Rng& rng, Index rows, Index cols) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("mul_transpose: serial and parallel agree bitwise") {
    Rng rng(11);
    for (auto [r, c] : {std::pair<Index, Index>{7, 3}, {64, 192}, {256, 100}, {1, 5}}) {
        const Mat m = random_matrix(rng, r, c);
        const Vec v = rng.normal_vector(r);
        Vec a, b;
        kernels::mul_transpose(m, v, a, Exec::serial);
        kernels::mul_transpose(m, v, b, Exec::parallel);
        REQUIRE(a.size() == c);
        CHECK((a.array() == b.array()).all());
        CHECK((a - m.transpose() * v).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("self_gram: serial and parallel agree bitwise and match Eigen") {
    Rng rng(12);
    const Mat m = random_matrix(rng, 40, 25);
    Mat a, b;
    kernels::self_gram(m, a, Exec::serial);
    kernels::self_gram(m, b, Exec::parallel);
    CHECK((a.array() == b.array()).all());
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - m.transpose() * m).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("soft_threshold: serial and parallel agree bitwise") {
    Rng rng(13);
    const Vec x = rng.normal_vector(513);
    Vec t(513);
    for (Index i = 0; i < t.size(); ++i) t[i] = std::abs(rng.normal());
    Vec a, b;
    kernels::soft_threshold(x, t, a, Exec::serial);
    kernels::soft_threshold(x, t, b, Exec::parallel);
    CHECK((a.array() == b.array()).all());
    for (Index i = 0; i < x.size(); ++i) {
        const double expect = std::abs(x[i]) > t[i] ? (std::abs(x[i]) - t[i]) * (x[i] > 0 ? 1 : -1) : 0.0;
        CHECK(a[i] == expect);
    }
}

TEST_CASE("kernel size mismatches throw") {
    Mat m(3, 2);
    m.setZero();
    Vec v(2), out;
    v.setZero();
    CHECK_THROWS_AS(kernels::mul_transpose(m, v, out), std::invalid_argument);
    Vec t(3);
    t.setZero();
    CHECK_THROWS_AS(kernels::soft_threshold(v, t, out), std::invalid_argument);
}
