#pragma once

#include "boed/network.hpp"
#include "boed/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace boed {

class AnomalyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Anomaly generator settings: onset probability, mean persistence, and the
/// mean / standard deviation of the additive contamination.
struct AnomalyGenParams {
    double p_A = 0.0;
    double lambda_A = 0.0;
    double mu_A = 0.0;
    double sigma_A = 1.0;

    void validate() const;
};

/// T x n indicator matrix (rows are time steps, columns sensors); 1 = anomaly.
using AnomalyMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * Persistent anomaly indicators. For every (t, i) an onset occurs with
 * probability p_A; an onset at t marks t..t+l (truncated at T) with
 * l ~ Poisson(lambda_A). With T = 1 every onset marks exactly one entry.
 * One uniform and one Poisson variate are consumed per entry whether or not
 * an onset happens, so masks drawn with the same seed are nested in p_A.
 */
AnomalyMask generate_mask(const AnomalyGenParams& params, int T, int n, std::uint64_t seed);

/// y + z on masked entries, z ~ N(mu_A, sigma_A^2); other entries are copied bit-exact.
Eigen::MatrixXd contaminate(const Eigen::MatrixXd& y, const AnomalyMask& mask, const AnomalyGenParams& params,
                            std::uint64_t seed);

/// Indices of the k coordinate-nearest other sensors for each sensor.
std::vector<std::vector<int>> nearest_neighbours(const std::vector<Point2>& sites, int k);

/**
 * Spatial k-NN detector. For sensor i, the neighbour mean is the average
 * value at its k coordinate-nearest sensors and sigma_i the sample standard
 * deviation of training column i; i is flagged unless its value lies strictly
 * inside (mean - 3 sigma_i, mean + 3 sigma_i). Returns a 1 x n mask.
 */
AnomalyMask detect_spatial_knn(const Eigen::VectorXd& y_anom, const std::vector<Point2>& sites,
                               const Eigen::MatrixXd& train, int k);
AnomalyMask detect_spatial_knn(const Eigen::VectorXd& y_anom, const std::vector<std::vector<int>>& neighbours,
                               const Eigen::VectorXd& train_sd);

/// Per-column sample standard deviation (divisor rows - 1).
Eigen::VectorXd column_sd(const Eigen::MatrixXd& m);

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + tn + fp + fn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o);
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/**
 * Collapse a T x n mask into ceil(T / w) x n window cells; a cell is 1 if any
 * entry inside it is 1. The last window may be shorter than w.
 */
AnomalyMask reduce_to_windows(const AnomalyMask& mask, int w);

/// Broadcast window verdicts back onto a T x n entry mask.
AnomalyMask expand_windows(const AnomalyMask& windows, int w, int T);

ConfusionMatrix score(const AnomalyMask& truth, const AnomalyMask& predicted);

/**
 * Confusion-matrix summaries. A ratio whose denominator is zero is reported
 * as 0 with the matching *_defined flag cleared.
 */
struct Metrics {
    double specificity = 0.0;
    double sensitivity = 0.0;
    double accuracy = 0.0;
    double mcc = 0.0;
    bool specificity_defined = false;
    bool sensitivity_defined = false;
    bool accuracy_defined = false;
    bool mcc_defined = false;
};

Metrics metrics(const ConfusionMatrix& cm);

/// CSV with header "time,sensor,flag", one row per entry.
void write_mask_csv(std::ostream& out, const AnomalyMask& mask);
/// CSV with header "tp,tn,fp,fn".
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm);

}  // namespace boed
