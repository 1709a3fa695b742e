#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace wbpdq {

/// Deterministic, cross-platform random stream used everywhere randomness is
/// needed: xoshiro256++ seeded through splitmix64. Distribution sampling
/// (uniform doubles, Box-Muller normals, Lemire bounded integers) is
/// implemented here so results do not depend on the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (one spare cached).
    double normal();

    /// Uniform integer in [0, bound), bound >= 1.
    std::uint64_t uniform_int(std::uint64_t bound);

    /// k distinct indices drawn uniformly from [0, n), returned sorted.
    std::vector<Eigen::Index> sample_indices(Eigen::Index n, Eigen::Index k);

    Eigen::VectorXd normal_vector(Eigen::Index n);

private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream derivation for independent substreams: repeated splitmix64 mixing
/// of (base, a, b, c). Identical inputs give identical streams on every
/// platform; this is the documented seed contract for the experiment harness.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace wbpdq
