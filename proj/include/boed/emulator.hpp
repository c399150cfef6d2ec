#pragma once

#include <Eigen/Dense>

namespace boed {

/**
 * One-dimensional GP regression with a squared-exponential kernel and a
 * noise term. Inputs are expected on [0, 1]; outputs are standardized
 * internally. Hyperparameters maximize the profiled marginal likelihood over
 * a log-spaced grid of length-scales and noise ratios followed by a local
 * refinement.
 */
struct EmulatorFit {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    double y_mean = 0.0;
    double y_scale = 1.0;
    double length_scale = 1.0;
    /// Signal variance on the standardized scale.
    double signal = 1.0;
    /// Noise variance on the standardized scale.
    double noise = 0.0;
    double log_likelihood = 0.0;
    /// False when the outputs are constant; predictions are then flat.
    bool informative = false;
    bool ok = false;
    Eigen::VectorXd alpha;

    double predict(double x_new) const;
};

EmulatorFit fit_emulator(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace boed
