#include "wbpdq/types.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "wbpdq/kernels.hpp"

namespace wbpdq {

Signal::Signal(Vec v, std::optional<IndexSet> supp)
    : values(std::move(v)), support(std::move(supp)) {
    if (values.size() < 1) throw std::invalid_argument("Signal: length must be >= 1");
    if (!values.allFinite()) throw std::invalid_argument("Signal: entries must be finite");
    if (support) {
        std::unordered_set<Index> on(support->begin(), support->end());
        for (Index i : *support)
            if (i < 0 || i >= values.size())
                throw std::invalid_argument("Signal: support index out of range");
        for (Index i = 0; i < values.size(); ++i)
            if (!on.count(i) && values[i] != 0.0)
                throw std::invalid_argument("Signal: nonzero entry outside declared support");
    }
}

Quantizer::Quantizer(double a) : alpha(a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("Quantizer: alpha must be positive and finite");
}

SensingMatrix::SensingMatrix(Mat entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() < 1)
        throw std::invalid_argument("SensingMatrix: empty matrix");
    if (!entries_.allFinite())
        throw std::invalid_argument("SensingMatrix: entries must be finite");
    transpose_ = entries_.transpose();
    kernels::self_gram(transpose_, row_gram_);
    Eigen::SelfAdjointEigenSolver<Mat> es(row_gram_, Eigen::EigenvaluesOnly);
    op_norm_sq_ = es.eigenvalues().maxCoeff();
    gram_llt_.compute(row_gram_);
    llt_ok_ = gram_llt_.info() == Eigen::Success;
    if (llt_ok_) {
        // LLT accepts some semidefinite inputs; demand a usable inverse.
        const Vec probe = Vec::Ones(rows());
        const Vec sol = gram_llt_.solve(probe);
        llt_ok_ = sol.allFinite() &&
                  (row_gram_ * sol - probe).norm() <= 1e-8 * std::sqrt(double(rows()));
    }
}

Vec SensingMatrix::apply(const Vec& x) const {
    Vec out;
    kernels::mul_transpose(transpose_, x, out);
    return out;
}

Vec SensingMatrix::apply_transpose(const Vec& v) const {
    Vec out;
    kernels::mul_transpose(entries_, v, out);
    return out;
}

Vec SensingMatrix::least_norm_solve(const Vec& r) const {
    if (!llt_ok_)
        throw std::runtime_error("SensingMatrix: row Gram factorization failed (rank-deficient rows)");
    return apply_transpose(gram_llt_.solve(r));
}

TubeConstraint::TubeConstraint(const SensingMatrix& m, Vec y_in, double eps, double p_in)
    : matrix(&m), y(std::move(y_in)), epsilon(eps), p(p_in) {
    if (y.size() != m.rows()) throw std::invalid_argument("TubeConstraint: y length != rows");
    if (!(epsilon > 0.0)) throw std::invalid_argument("TubeConstraint: epsilon must be positive");
    if (!(p >= 2.0)) throw std::invalid_argument("TubeConstraint: p must be >= 2");
}

double lp_norm(const Vec& v, double p) {
    if (v.size() == 0) return 0.0;
    if (p == kInf) return v.cwiseAbs().maxCoeff();
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (p == 1.0) return v.cwiseAbs().sum();
    if (p == 2.0) return v.norm();
    // Scale by the max to avoid overflow for large p.
    const double mx = v.cwiseAbs().maxCoeff();
    if (mx == 0.0) return 0.0;
    double acc = 0.0;
    for (Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]) / mx, p);
    return mx * std::pow(acc, 1.0 / p);
}

double dual_exponent(double p) {
    if (p == kInf) return 1.0;
    if (p == 1.0) return kInf;
    if (!(p > 1.0)) throw std::invalid_argument("dual_exponent: p must be in (1, inf]");
    return p / (p - 1.0);
}

double weighted_l1_norm(const Vec& v, const Vec& weights) {
    if (v.size() != weights.size())
        throw std::invalid_argument("weighted_l1_norm: size mismatch");
    return v.cwiseAbs().cwiseProduct(weights).sum();
}

}  // namespace wbpdq
