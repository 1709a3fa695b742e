#include "wbpdq/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace wbpdq::kernels {

namespace {
std::atomic<Exec> g_exec{Exec::parallel};
}

Exec execution() noexcept { return g_exec.load(std::memory_order_relaxed); }
void set_execution(Exec e) noexcept { g_exec.store(e, std::memory_order_relaxed); }

void mul_transpose(const Eigen::MatrixXd& m, const Eigen::VectorXd& v,
                   Eigen::VectorXd& out, Exec e) {
    if (m.rows() != v.size()) throw std::invalid_argument("mul_transpose: size mismatch");
    const Eigen::Index n = m.cols();
    out.resize(n);
    if (e == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index j = 0; j < n; ++j) out[j] = m.col(j).dot(v);
    } else {
        for (Eigen::Index j = 0; j < n; ++j) out[j] = m.col(j).dot(v);
    }
}

void self_gram(const Eigen::MatrixXd& m, Eigen::MatrixXd& g, Exec e) {
    const Eigen::Index n = m.cols();
    g.resize(n, n);
    if (e == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i <= j; ++i) g(i, j) = m.col(i).dot(m.col(j));
    } else {
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i <= j; ++i) g(i, j) = m.col(i).dot(m.col(j));
    }
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i) g(j, i) = g(i, j);
}

void soft_threshold(const Eigen::VectorXd& x, const Eigen::VectorXd& t,
                    Eigen::VectorXd& out, Exec e) {
    if (x.size() != t.size()) throw std::invalid_argument("soft_threshold: size mismatch");
    const Eigen::Index n = x.size();
    out.resize(n);
    auto shrink = [&](Eigen::Index i) {
        const double a = std::abs(x[i]) - t[i];
        out[i] = a > 0 ? std::copysign(a, x[i]) : 0.0;
    };
    if (e == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) shrink(i);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) shrink(i);
    }
}

}  // namespace wbpdq::kernels
