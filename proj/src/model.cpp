#include "wbpdq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wbpdq {

WeightVector make_weights(const IndexSet& prior_support, double theta, Index n) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("make_weights: theta must lie strictly in (0, 1)");
    if (n < 1) throw std::invalid_argument("make_weights: n must be >= 1");
    WeightVector w;
    w.weights = Vec::Ones(n);
    w.theta = theta;
    w.prior_support = prior_support;
    std::sort(w.prior_support.begin(), w.prior_support.end());
    w.prior_support.erase(std::unique(w.prior_support.begin(), w.prior_support.end()),
                          w.prior_support.end());
    for (Index i : w.prior_support) {
        if (i < 0 || i >= n) throw std::invalid_argument("make_weights: index out of range");
        w.weights[i] = theta;
    }
    return w;
}

Vec quantize(const Vec& v, const Quantizer& q) {
    if (!v.allFinite()) throw std::invalid_argument("quantize: input must be finite");
    Vec out(v.size());
    for (Index i = 0; i < v.size(); ++i)
        out[i] = q.alpha * std::floor(v[i] / q.alpha) + q.alpha / 2.0;
    return out;
}

double weighted_s_term_error(const Signal& x, const WeightVector& w, Index s) {
    const Index n = x.size();
    if (w.size() != n) throw std::invalid_argument("weighted_s_term_error: size mismatch");
    if (s < 1 || s > n) throw std::invalid_argument("weighted_s_term_error: s out of range");
    Vec score = x.values.cwiseAbs().cwiseProduct(w.weights);
    IndexSet order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::nth_element(order.begin(), order.begin() + s - 1, order.end(),
                     [&](Index a, Index b) {
                         return score[a] > score[b] || (score[a] == score[b] && a < b);
                     });
    double kept = 0.0;
    for (Index j = 0; j < s; ++j) kept += score[order[j]];
    const double total = score.sum();
    return std::max(0.0, total - kept);
}

double snr_db(const Signal& truth, const Signal& estimate) {
    if (truth.size() != estimate.size()) throw std::invalid_argument("snr_db: size mismatch");
    const double nx = truth.values.norm();
    if (nx == 0.0) throw std::invalid_argument("snr_db: truth signal is zero");
    const double err = (truth.values - estimate.values).norm();
    if (err == 0.0) return kInf;
    return 20.0 * std::log10(nx / err);
}

}  // namespace wbpdq
