#pragma once

#include "wbpdq/types.hpp"

namespace wbpdq {

/// Build two-level weights of length n: theta on prior_support (0-based),
/// 1 elsewhere. Requires theta in (0, 1) strictly.
WeightVector make_weights(const IndexSet& prior_support, double theta, Index n);

/// Mid-riser quantization: v_i -> alpha * floor(v_i / alpha) + alpha / 2.
Vec quantize(const Vec& v, const Quantizer& q);

/// Error of the best weighted s-term approximation: the |x_i| w_i mass left
/// outside the s indices with the largest |x_i| w_i (ties broken by lowest
/// index).
double weighted_s_term_error(const Signal& x, const WeightVector& w, Index s);

/// 20 log10(||truth|| / ||truth - estimate||); +inf on exact recovery.
double snr_db(const Signal& truth, const Signal& estimate);

}  // namespace wbpdq
