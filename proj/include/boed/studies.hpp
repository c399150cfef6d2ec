#pragma once

#include "boed/covariance.hpp"
#include "boed/network.hpp"
#include "boed/utility.hpp"

#include <memory>
#include <vector>

namespace boed {

/// Shared generative-model settings for both studies.
struct StudyModel {
    CovarianceSpec covariance;
    PriorSpec prior;
    /// Nugget relative to the total partial sill, added to the absolute sigma2_0.
    double tau2 = 0.0;
};

/// Nugget variance for one parameter draw.
double nugget_variance(const ModelParams& params, double tau2);

/// Centres of an nx x ny grid of equal cells covering the rectangle.
std::vector<Point2> grid_cell_centres(const Point2& lower, const Point2& upper, int nx, int ny);

/// Midpoints of `count` segments picked at evenly spaced positions in id order.
std::vector<NetworkLocation> segment_midpoints(const RiverNetwork& net, int count);

/**
 * Replace flagged entries of y (T x n) by their conditional mean given the
 * unflagged entries under the zero-mean space-time model with spatial
 * covariance sigma0 and autoregressive coefficient phi. With no unflagged
 * entries the prior mean 0 is used.
 */
Eigen::MatrixXd impute_flagged(const Eigen::MatrixXd& y, const AnomalyMask& flags, const Eigen::MatrixXd& sigma0,
                               double phi);

/// Planar study: n free points, kriging to fixed prediction points, T = 1.
class SpatialStudy : public UtilityModel {
public:
    SpatialStudy(StudyModel model, std::vector<Point2> prediction);
    std::unique_ptr<Evaluator> bind(const Design& design) const override;
    int series_length() const override { return 1; }
    const std::vector<Point2>& prediction() const { return prediction_; }

private:
    StudyModel model_;
    std::vector<Point2> prediction_;
};

/// Stream-network study: points on paths, T time steps.
class RiverStudy : public UtilityModel {
public:
    RiverStudy(std::shared_ptr<const RiverNetwork> network, std::vector<NetworkPath> paths, StudyModel model, int T,
               std::vector<NetworkLocation> prediction);
    std::unique_ptr<Evaluator> bind(const Design& design) const override;
    int series_length() const override { return T_; }
    std::vector<NetworkLocation> locations(const Design& design) const;
    const RiverNetwork& network() const { return *network_; }
    const std::vector<NetworkPath>& paths() const { return paths_; }
    const std::vector<NetworkLocation>& prediction() const { return prediction_; }

private:
    std::shared_ptr<const RiverNetwork> network_;
    std::vector<NetworkPath> paths_;
    StudyModel model_;
    int T_;
    std::vector<NetworkLocation> prediction_;
};

}  // namespace boed
