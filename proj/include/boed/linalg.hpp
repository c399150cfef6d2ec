#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace boed {

/// Raised when a covariance matrix cannot be factorized even after jitter.
class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Diagonal jitter applied once when a Cholesky factorization fails.
inline constexpr double kCholeskyJitter = 1e-10;

/**
 * Cholesky factorization of a symmetric positive (semi)definite matrix.
 *
 * The plain factorization is attempted first; on failure kCholeskyJitter is
 * added to the diagonal and the attempt is repeated. Jitter events are counted
 * process-wide (see jitter_events()). Throws FactorizationError if the
 * jittered matrix still fails.
 */
Eigen::LLT<Eigen::MatrixXd> factorize_spd(const Eigen::MatrixXd& a);

/// Number of factorizations that needed the diagonal jitter so far.
std::uint64_t jitter_events() noexcept;
void reset_jitter_events() noexcept;

/// Extract a principal submatrix a(idx, idx).
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const std::vector<int>& rows,
                          const std::vector<int>& cols);

/**
 * Run body(i) for i in [0, n) on up to `threads` worker threads (0 means
 * hardware concurrency). Each index is processed exactly once; callers write
 * results into pre-sized slots so the outcome is independent of scheduling.
 * The first exception thrown by any body is rethrown after all workers join.
 */
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace boed
