#pragma once

#include <Eigen/Core>

namespace wbpdq::kernels {

/// Execution policy for the dense kernels. Every parallel kernel assigns each
/// output element to exactly one thread and computes it with the same scalar
/// code as the serial path, so serial and parallel results are bitwise
/// identical for any thread count.
enum class Exec { serial, parallel };

Exec execution() noexcept;
void set_execution(Exec e) noexcept;

/// out = m^T v. Column-major m makes every per-entry dot contiguous; callers
/// that need A*x pass the cached transpose of A.
void mul_transpose(const Eigen::MatrixXd& m, const Eigen::VectorXd& v,
                   Eigen::VectorXd& out, Exec e = execution());

/// g = m^T m (upper triangle computed, then mirrored).
void self_gram(const Eigen::MatrixXd& m, Eigen::MatrixXd& g, Exec e = execution());

/// out_i = sign(x_i) * max(|x_i| - t_i, 0).
void soft_threshold(const Eigen::VectorXd& x, const Eigen::VectorXd& t,
                    Eigen::VectorXd& out, Exec e = execution());

}  // namespace wbpdq::kernels
