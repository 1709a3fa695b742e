#pragma once

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace wbpdq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Real signal of length N. The optional support is ground truth carried by
/// experiment instances; when present, every off-support entry must be zero.
struct Signal {
    Vec values;
    std::optional<IndexSet> support;

    Signal() = default;
    explicit Signal(Vec v, std::optional<IndexSet> supp = std::nullopt);

    Index size() const { return values.size(); }
};

/// Two-level weights: theta on the prior support, 1 elsewhere.
struct WeightVector {
    Vec weights;
    double theta = 0.5;
    IndexSet prior_support;

    Index size() const { return weights.size(); }
};

/// Positive bin width of the mid-riser quantizer.
struct Quantizer {
    double alpha;
    explicit Quantizer(double a);
};

/// Dense m x N sensing matrix with the derived quantities every consumer
/// needs cached at construction: the transpose (contiguous row access), the
/// row Gram Phi*Phi^T with its Cholesky factorization, and the squared
/// operator norm. All accessors are read-only afterwards, so a constructed
/// matrix is safe to share across threads.
class SensingMatrix {
public:
    explicit SensingMatrix(Mat entries);

    Index rows() const { return entries_.rows(); }
    Index cols() const { return entries_.cols(); }
    const Mat& entries() const { return entries_; }
    const Mat& transposed() const { return transpose_; }
    const Mat& row_gram() const { return row_gram_; }
    double op_norm_sq() const { return op_norm_sq_; }
    bool compressive() const { return rows() < cols(); }
    bool has_row_factorization() const { return llt_ok_; }

    /// Phi * x
    Vec apply(const Vec& x) const;
    /// Phi^T * v
    Vec apply_transpose(const Vec& v) const;
    /// Phi^T (Phi Phi^T)^{-1} r; throws if Phi is row-rank-deficient.
    Vec least_norm_solve(const Vec& r) const;

private:
    Mat entries_;    // m x N, column-major
    Mat transpose_;  // N x m, columns are the rows of Phi
    Mat row_gram_;   // m x m
    Eigen::LLT<Mat> gram_llt_;
    bool llt_ok_ = false;
    double op_norm_sq_ = 0.0;
};

/// The feasible tube {x : ||y - Phi x||_p <= epsilon}. Non-owning view of the
/// sensing matrix; the caller keeps it alive.
struct TubeConstraint {
    TubeConstraint(const SensingMatrix& m, Vec y_in, double eps, double p_in);

    const SensingMatrix* matrix;
    Vec y;
    double epsilon;
    double p;
};

/// lq norm for q in [1, inf]; q = kInf gives the max norm.
double lp_norm(const Vec& v, double p);

/// Holder conjugate: p/(p-1), with 1 <-> inf.
double dual_exponent(double p);

double weighted_l1_norm(const Vec& v, const Vec& weights);

}  // namespace wbpdq
