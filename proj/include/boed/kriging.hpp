#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

namespace boed {

class KrigingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Joint covariance of observations and prediction targets, partitioned as
 * [[obs, cross], [cross^T, pred]]. `nugget` is the measurement-error variance
 * added to `obs` by posterior_mean_spatial.
 */
struct PartitionedCovariance {
    Eigen::MatrixXd obs;    // n x n
    Eigen::MatrixXd pred;   // m x m
    Eigen::MatrixXd cross;  // n x m
    double nugget = 0.0;

    void validate() const;
};

/// Split a joint covariance whose first n_obs sites are observations.
PartitionedCovariance partition(const Eigen::MatrixXd& joint, Eigen::Index n_obs, double nugget);

/**
 * Zero-mean posterior predictive mean cross_k^T (obs_k + nugget I)^{-1} y_k,
 * where k ranges over `kept` (all observations when absent). Throws
 * KrigingError when no observation is kept or the system is singular.
 */
Eigen::VectorXd posterior_mean_spatial(const PartitionedCovariance& pc, const Eigen::VectorXd& y,
                                       const std::optional<std::vector<int>>& kept = std::nullopt);

/**
 * Simple kriging with known beta: Xhat beta + cross^T obs^{-1} (y - X beta).
 * `obs` must already include the nugget. An empty beta means a zero mean.
 */
Eigen::VectorXd posterior_mean_spatiotemporal(const PartitionedCovariance& pc, const Eigen::MatrixXd& X,
                                              const Eigen::MatrixXd& Xhat, const Eigen::VectorXd& beta,
                                              const Eigen::VectorXd& y);

/**
 * Time-correlation factor of the dynamical model: K(t, s) = phi^|t-s| a_min(t,s)
 * with a_1 = 1 and a_{t+1} = phi^2 a_t + 1. The joint space-time covariance is
 * K kron (Sigma + nugget I) in time-major stacking (index t * S + s).
 */
Eigen::MatrixXd temporal_factor(double phi, int T);

/**
 * Space-time covariance implied by the dynamical model over sites where the
 * first n_obs are observation sites, partitioned into observation and
 * prediction blocks (each stacked time-major). `obs` includes the nugget,
 * so the returned `nugget` field is zero.
 */
PartitionedCovariance build_spacetime_cross_covariance(const Eigen::MatrixXd& sigma_all, Eigen::Index n_obs,
                                                       double phi, int T, double nugget);

/**
 * Spatial kriging operator G = Sigma0[targets, sources] Sigma0[sources, sources]^{-1}.
 * When every source site is observed at every time step, the space-time
 * simple-kriging mean factorizes per time step as G applied to each column.
 */
Eigen::MatrixXd kriging_operator(const Eigen::MatrixXd& cov, const std::vector<int>& sources,
                                 const std::vector<int>& targets);

}  // namespace boed
