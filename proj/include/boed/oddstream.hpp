#pragma once

#include "boed/anomaly.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace boed {

class OddstreamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-series features in extraction order.
enum class Feature {
    mean,
    variance,
    lag1_autocorrelation,
    maximum,
    minimum,
    trend_slope,
    mean_crossings,
    excursion_ratio,
};

const std::vector<Feature>& default_features();
Feature parse_feature(const std::string& name);
std::string feature_name(Feature f);

struct OddstreamOptions {
    double tau_F = 0.95;
    /// Number of simulated density minima used for the Gumbel fit.
    int extremes = 100000;
    /// Samples per simulated batch; 0 means the number of training series.
    int batch = 0;
    std::vector<Feature> features = default_features();
};

/**
 * Feature vector of one series. Returns false when the series is constant
 * (autocorrelation and excursion features are undefined).
 */
bool extract_features(const Eigen::Ref<const Eigen::VectorXd>& series, const std::vector<Feature>& features,
                      Eigen::Ref<Eigen::VectorXd> out);

/// Psi-transform of a density value: sqrt(-2 ln f - 2 ln 2pi) below 1/(2pi), else 0.
double psi_transform(double density);

struct OddstreamModel {
    std::vector<Feature> features;
    Eigen::VectorXd feature_mean;
    Eigen::VectorXd feature_scale;
    /// m x 2 orthonormal loadings.
    Eigen::MatrixXd basis;
    /// N x 2 projected training points.
    Eigen::MatrixXd points;
    Eigen::Vector2d bandwidth;
    double gumbel_location = 0.0;
    double gumbel_scale = 0.0;
    double tau_F = 0.95;
    double psi_threshold = 0.0;
    /// Density threshold; a series is anomalous when its density lies below it.
    double threshold = 0.0;
    int n_series = 0;

    Eigen::Vector2d project(const Eigen::VectorXd& raw_features) const;
    double density(const Eigen::Vector2d& x) const;
};

/**
 * Fit the detector on the columns of y_train (each column one series).
 * Constant columns are skipped; at least three usable series are required.
 */
OddstreamModel oddstream_train(const Eigen::MatrixXd& y_train, const OddstreamOptions& options, std::uint64_t seed);

/**
 * Window verdict per column of window (w x n). Constant series are flagged
 * and counted in *constant_series when given.
 */
AnomalyMask oddstream_detect(const OddstreamModel& model, const Eigen::MatrixXd& window,
                             int* constant_series = nullptr);

}  // namespace boed
