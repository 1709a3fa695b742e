#include "wbpdq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "wbpdq/model.hpp"
#include "wbpdq/rng.hpp"

namespace wbpdq {

namespace {

// C(n, k), saturating at cap.
Index choose_capped(Index n, Index k, Index cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (Index i = 1; i <= k; ++i) {
        c *= double(n - k + i) / double(i);
        if (c > double(cap)) return cap + 1;
    }
    return static_cast<Index>(std::llround(c));
}

std::vector<IndexSet> enumerate_supports(Index n, Index s) {
    std::vector<IndexSet> out;
    IndexSet cur(s);
    std::iota(cur.begin(), cur.end(), Index{0});
    while (true) {
        out.push_back(cur);
        Index i = s - 1;
        while (i >= 0 && cur[i] == n - s + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (Index j = i + 1; j < s; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

// (mu, delta) from observed extremes: mu (1-delta)^{1/q} = lo,
// mu (1+delta)^{1/q} = hi.
void fit_mu_delta(double lo, double hi, double q, double& mu, double& delta) {
    const double lq = std::pow(lo, q), hq = std::pow(hi, q);
    if (hq + lq == 0.0) {
        mu = 0.0;
        delta = 1.0;
        return;
    }
    delta = (hq - lq) / (hq + lq);
    mu = std::pow(0.5 * (hq + lq), 1.0 / q);
}

IndexSet top_indices(const Vec& score, Index s) {
    IndexSet order(score.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::nth_element(order.begin(), order.begin() + s - 1, order.end(),
                     [&](Index a, Index b) {
                         return score[a] > score[b] || (score[a] == score[b] && a < b);
                     });
    order.resize(s);
    std::sort(order.begin(), order.end());
    return order;
}

double exponent_inv(double v) { return v == kInf ? 0.0 : 1.0 / v; }

}  // namespace

double compute_c_pq(double delta_s, double delta_s2, double delta_ss, double p, double q) {
    for (double d : {delta_s, delta_s2, delta_ss})
        if (!(d >= 0.0 && d < 1.0))
            throw std::invalid_argument("compute_c_pq: deltas must lie in [0, 1)");
    if (!(p >= 2.0) || !(q >= 2.0) || p == kInf || q == kInf)
        throw std::invalid_argument("compute_c_pq: p, q must lie in [2, inf)");
    const double e = 2.0 / q;
    const double a = std::pow(1.0 + delta_s, e) - std::pow(1.0 - delta_ss, e);
    const double b = (p - 1.0) * std::pow(1.0 + delta_s2, e) - std::pow(1.0 - delta_ss, e);
    if (a < 0.0 || b < 0.0)
        throw std::runtime_error("compute_c_pq: negative bracket (a=" + std::to_string(a) +
                                 ", b=" + std::to_string(b) + ")");
    return std::sqrt(a * b);
}

RipEstimate estimate_rip_exact(const SensingMatrix& matrix, Index s, Index enum_budget) {
    const Index n = matrix.cols();
    if (s < 1 || s > n) throw std::invalid_argument("estimate_rip: s out of range");
    if (choose_capped(n, s, enum_budget) > enum_budget)
        throw std::invalid_argument("estimate_rip: enumeration budget exceeded");

    const auto supports = enumerate_supports(n, s);
    const Mat& phi = matrix.entries();
    double lo = kInf, hi = 0.0;
#pragma omp parallel
    {
        double lo_local = kInf, hi_local = 0.0;
#pragma omp for schedule(dynamic, 16) nowait
        for (std::size_t idx = 0; idx < supports.size(); ++idx) {
            const auto& sup = supports[idx];
            Mat sub(phi.rows(), s);
            for (Index j = 0; j < s; ++j) sub.col(j) = phi.col(sup[j]);
            Eigen::SelfAdjointEigenSolver<Mat> es(sub.transpose() * sub,
                                                  Eigen::EigenvaluesOnly);
            lo_local = std::min(lo_local, std::sqrt(std::max(0.0, es.eigenvalues().minCoeff())));
            hi_local = std::max(hi_local, std::sqrt(es.eigenvalues().maxCoeff()));
        }
#pragma omp critical
        {
            lo = std::min(lo, lo_local);
            hi = std::max(hi, hi_local);
        }
    }

    RipEstimate est;
    est.s = s;
    est.p = est.q = 2.0;
    est.method = RipMethod::exact_22;
    est.num_samples = static_cast<Index>(supports.size());
    fit_mu_delta(lo, hi, 2.0, est.mu, est.delta);
    return est;
}

RipEstimate estimate_rip_sampled(const SensingMatrix& matrix, Index s, double p, double q,
                                 Index num_samples, std::uint64_t seed) {
    const Index n = matrix.cols();
    if (s < 1 || s > n) throw std::invalid_argument("estimate_rip: s out of range");
    if (num_samples < 1) throw std::invalid_argument("estimate_rip: need num_samples >= 1");
    if (!(p >= 2.0) || !(q >= 2.0) || q == kInf)
        throw std::invalid_argument("estimate_rip: need p in [2, inf], q in [2, inf)");

    double lo = kInf, hi = 0.0;
#pragma omp parallel
    {
        double lo_local = kInf, hi_local = 0.0;
#pragma omp for schedule(static) nowait
        for (Index i = 0; i < num_samples; ++i) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
            const IndexSet sup = rng.sample_indices(n, s);
            Vec coeff = rng.normal_vector(s);
            const double nq = lp_norm(coeff, q);
            if (nq == 0.0) continue;
            Vec x = Vec::Zero(n);
            for (Index j = 0; j < s; ++j) x[sup[j]] = coeff[j] / nq;
            const double ratio = lp_norm(matrix.apply(x), p);
            lo_local = std::min(lo_local, ratio);
            hi_local = std::max(hi_local, ratio);
        }
#pragma omp critical
        {
            lo = std::min(lo, lo_local);
            hi = std::max(hi, hi_local);
        }
    }

    RipEstimate est;
    est.s = s;
    est.p = p;
    est.q = q;
    est.method = RipMethod::sampled;
    est.num_samples = num_samples;
    fit_mu_delta(lo, hi, q, est.mu, est.delta);
    return est;
}

RipEstimate estimate_rip(const SensingMatrix& matrix, Index s, double p, double q,
                         Index num_samples, std::uint64_t seed, Index enum_budget) {
    if (p == 2.0 && q == 2.0 &&
        choose_capped(matrix.cols(), s, enum_budget) <= enum_budget)
        return estimate_rip_exact(matrix, s, enum_budget);
    return estimate_rip_sampled(matrix, s, p, q, num_samples, seed);
}

RnspParams rip_implies_rnsp(const RipEstimate& rip2s, double theta, double p, double q) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("rip_implies_rnsp: theta must lie in (0, 1)");
    if (rip2s.s < 2 || rip2s.s % 2 != 0)
        throw std::invalid_argument("rip_implies_rnsp: need an order-2s estimate (even s)");
    if (!(rip2s.delta >= 0.0 && rip2s.delta < 1.0))
        throw UncertifiableError("rip_implies_rnsp: delta not in [0, 1)");
    const double c = compute_c_pq(rip2s.delta, rip2s.delta, rip2s.delta, p, q);
    const double d = std::pow(1.0 - rip2s.delta, 2.0 / q);
    RnspParams out;
    out.rho = c / (theta * theta * d);
    out.gamma_nsp = std::pow(1.0 + rip2s.delta, 1.0 / q) / (rip2s.mu * d);
    out.s = rip2s.s / 2;
    out.p = p;
    out.q = q;
    if (!(out.rho < 1.0))
        throw UncertifiableError("rip_implies_rnsp: rho = " + std::to_string(out.rho) +
                                 " >= 1, no usable certificate");
    return out;
}

RnspVerdict rnsp_check(const SensingMatrix& matrix, const WeightVector& w,
                       const RnspParams& params, Index num_samples, std::uint64_t seed) {
    const Index n = matrix.cols();
    const Index s = params.s;
    if (w.size() != n) throw std::invalid_argument("rnsp_check: weight length mismatch");
    if (s < 1 || s > n) throw std::invalid_argument("rnsp_check: s out of range");
    if (!(params.rho > 0.0) || !(params.gamma_nsp > 0.0))
        throw std::invalid_argument("rnsp_check: params must be positive");

    // Null-space basis for directions the gamma term cannot rescue.
    Eigen::FullPivLU<Mat> lu(matrix.entries());
    const Mat kernel = lu.kernel();
    const bool has_kernel = kernel.cols() > 0 && lu.rank() > 0;

    const double inv_q = exponent_inv(params.q);
    const double scale = params.rho / std::pow(double(s), 1.0 - inv_q);

    const bool enumerate_all = choose_capped(n, s, 2000) <= 2000;
    std::vector<IndexSet> all_supports;
    if (enumerate_all) all_supports = enumerate_supports(n, s);

    Rng rng(seed);
    RnspVerdict verdict;
    for (Index sample = 0; sample < num_samples; ++sample) {
        Vec v;
        switch (sample % 3) {
            case 0:
                v = rng.normal_vector(n);
                break;
            case 1: {
                const Index nnz = 1 + static_cast<Index>(
                                          rng.uniform_int(std::min<Index>(3 * s, n)));
                const IndexSet sup = rng.sample_indices(n, nnz);
                v = Vec::Zero(n);
                for (Index i : sup) v[i] = rng.normal();
                break;
            }
            default:
                if (has_kernel) {
                    v = kernel * rng.normal_vector(kernel.cols());
                    break;
                }
                v = rng.normal_vector(n);
        }
        const double nv = v.norm();
        if (nv == 0.0) continue;
        v /= nv;

        const double gamma_term = params.gamma_nsp * lp_norm(matrix.apply(v), params.p);
        const double total_w = weighted_l1_norm(v, w.weights);
        auto violates = [&](const IndexSet& sup) {
            Vec vs(s);
            double ws = 0.0;
            for (Index j = 0; j < s; ++j) {
                vs[j] = v[sup[j]];
                ws += std::abs(v[sup[j]]) * w.weights[sup[j]];
            }
            const double lhs = lp_norm(vs, params.q);
            const double rhs = scale * (total_w - ws) + gamma_term;
            if (lhs > rhs + 1e-12) {
                verdict.falsified = true;
                verdict.witness_v = v;
                verdict.witness_support = sup;
                verdict.lhs = lhs;
                verdict.rhs = rhs;
                return true;
            }
            return false;
        };

        if (enumerate_all) {
            for (const auto& sup : all_supports)
                if (violates(sup)) return verdict;
        } else {
            if (violates(top_indices(v.cwiseAbs(), s))) return verdict;
            if (violates(top_indices(v.cwiseAbs().cwiseProduct(w.weights), s)))
                return verdict;
        }
    }
    return verdict;
}

Thm1Chain thm1_constant_chain(double delta_2s, double p, double q, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("thm1_constant_chain: theta must lie in (0, 1)");
    Thm1Chain chain;
    chain.c_pq = compute_c_pq(delta_2s, delta_2s, delta_2s, p, q);
    const double d = std::pow(1.0 - delta_2s, 2.0 / q);
    const double e = std::pow(1.0 + delta_2s, 1.0 / q);
    const double t2 = theta * theta;
    const double denom = t2 * d - chain.c_pq;
    chain.valid = denom > 0.0;
    if (!chain.valid) return chain;
    chain.hs_eps_coeff = 2.0 * t2 * e / denom;
    chain.hs_sigma_coeff = 2.0 * chain.c_pq / denom;
    chain.A = 2.0 * e * (1.0 + t2) / denom;
    chain.B = 2.0 * (chain.c_pq + d) / denom;
    return chain;
}

ErrorBoundResult recovery_error_bound(const Thm1Inputs& in) {
    if (in.s < 1) throw std::invalid_argument("recovery_error_bound: s must be >= 1");
    if (!(in.mu > 0.0)) throw std::invalid_argument("recovery_error_bound: mu must be positive");
    if (in.epsilon < 0.0 || in.sigma_s < 0.0)
        throw std::invalid_argument("recovery_error_bound: epsilon, sigma_s must be >= 0");
    const Thm1Chain chain = thm1_constant_chain(in.delta_2s, in.p, in.q, in.theta);
    ErrorBoundResult out;
    out.r = in.q;
    out.valid = chain.valid;
    if (!chain.valid) return out;
    out.A = chain.A;
    out.B = chain.B;
    out.bound_value = chain.A * in.epsilon / in.mu +
                      chain.B * std::pow(double(in.s), 1.0 / in.q - 1.0) * in.sigma_s;
    return out;
}

ErrorBoundResult recovery_error_bound(const Thm2Inputs& in) {
    if (in.s < 1) throw std::invalid_argument("recovery_error_bound: s must be >= 1");
    if (!(in.gamma > 0.0))
        throw std::invalid_argument("recovery_error_bound: gamma must be positive");
    if (!(in.theta > 0.0 && in.theta < 1.0))
        throw std::invalid_argument("recovery_error_bound: theta must lie in (0, 1)");
    const double inv_r = exponent_inv(in.r), inv_q = exponent_inv(in.q);
    if (inv_r < inv_q)
        throw std::invalid_argument("recovery_error_bound: need 1 <= r <= q");
    if (in.epsilon < 0.0 || in.sigma_s < 0.0)
        throw std::invalid_argument("recovery_error_bound: epsilon, sigma_s must be >= 0");

    ErrorBoundResult out;
    out.r = in.r;
    out.valid = in.rho > 0.0 && in.rho < 1.0;
    if (!out.valid) return out;
    const double it2 = 1.0 / (in.theta * in.theta);
    out.A = 2.0 * in.gamma * (in.rho + 2.0 + it2) / (1.0 - in.rho);
    out.B = 2.0 * (in.rho * in.rho + 2.0 * in.rho + it2) / (1.0 - in.rho);
    const double s = double(in.s);
    out.bound_value = out.A * std::pow(s, inv_r - inv_q) * in.epsilon +
                      out.B * std::pow(s, inv_r - 1.0) * in.sigma_s;
    return out;
}

Index gaussian_sample_size(Index s, double q, Index n, double eta, double c) {
    if (s < 1 || s > n) throw std::invalid_argument("gaussian_sample_size: s out of range");
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("gaussian_sample_size: eta must lie in (0, 1)");
    if (!(c > 0.0)) throw std::invalid_argument("gaussian_sample_size: c must be positive");
    if (!(q >= 1.0)) throw std::invalid_argument("gaussian_sample_size: q must be >= 1");
    const double power = q == kInf ? 2.0 : 2.0 - 2.0 / q;
    const double value =
        c * (std::pow(double(s), power) * std::log(std::numbers::e * double(n) / double(s)) +
             std::log(1.0 / eta));
    return static_cast<Index>(std::ceil(value));
}

double weighted_block_norm(const Vec& x, const WeightVector& w, Index s, double q) {
    const Index n = x.size();
    if (w.size() != n) throw std::invalid_argument("weighted_block_norm: size mismatch");
    if (s < 1 || s > n) throw std::invalid_argument("weighted_block_norm: s out of range");
    if (!(q >= 1.0)) throw std::invalid_argument("weighted_block_norm: q must be >= 1");

    const Vec score = x.cwiseAbs().cwiseProduct(w.weights);
    IndexSet order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return score[a] > score[b] || (score[a] == score[b] && a < b);
    });

    double total = 0.0;
    for (Index start = 0; start < n; start += s) {
        const Index len = std::min(s, n - start);
        Vec block(len);
        for (Index j = 0; j < len; ++j) block[j] = std::abs(x[order[start + j]]);
        total += lp_norm(block, q);
    }
    return total;
}

ConeResult cone_membership(const Vec& x, const WeightVector& w, double rho, Index s,
                           double q) {
    const Index n = x.size();
    if (w.size() != n) throw std::invalid_argument("cone_membership: size mismatch");
    if (s < 1 || s > n) throw std::invalid_argument("cone_membership: s out of range");
    if (!(rho > 0.0)) throw std::invalid_argument("cone_membership: rho must be positive");

    const double scale = rho / std::pow(double(s), 1.0 - exponent_inv(q));
    const double total_w = weighted_l1_norm(x, w.weights);
    auto satisfies = [&](const IndexSet& sup) {
        Vec xs(s);
        double ws = 0.0;
        for (Index j = 0; j < s; ++j) {
            xs[j] = x[sup[j]];
            ws += std::abs(x[sup[j]]) * w.weights[sup[j]];
        }
        return lp_norm(xs, q) >= scale * (total_w - ws);
    };

    ConeResult out;
    // The top-|x| support maximizes the left side; try it and the top-|x|w
    // variant first so an s-sparse vector reports its own support.
    for (const auto& sup : {top_indices(x.cwiseAbs(), s),
                            top_indices(x.cwiseAbs().cwiseProduct(w.weights), s)})
        if (satisfies(sup)) {
            out.member = true;
            out.witness = sup;
            return out;
        }
    if (n <= 12) {
        for (const auto& sup : enumerate_supports(n, s))
            if (satisfies(sup)) {
                out.member = true;
                out.witness = sup;
                return out;
            }
    }
    return out;
}

}  // namespace wbpdq
