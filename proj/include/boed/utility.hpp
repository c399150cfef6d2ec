#pragma once

#include "boed/anomaly.hpp"
#include "boed/design.hpp"
#include "boed/oddstream.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace boed {

class UtilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Objective { dual, irmse_only, specificity_only };
Objective parse_objective(const std::string& name);
std::string objective_name(Objective o);

enum class DetectorKind { spatial_knn, oddstream, none };
DetectorKind parse_detector(const std::string& name);
std::string detector_name(DetectorKind d);

struct DetectorConfig {
    DetectorKind kind = DetectorKind::spatial_knn;
    /// Neighbours for the spatial detector.
    int k = 3;
    /// Training replicates for the spatial detector.
    int B_train = 100;
    /// Independent T x n training panels per draw for Oddstream.
    int train_panels = 1;
    OddstreamOptions oddstream;
};

struct UtilityConfig {
    Objective objective = Objective::dual;
    int B = 100;
    AnomalyGenParams anomaly;
    DetectorConfig detector;
    /// Detection window length; 0 means the full series.
    int window = 0;
    /// Worker threads for the draw loop; 0 uses all hardware threads.
    int threads = 1;

    void validate() const;
};

/// Irmse values at or above this are clamped.
inline constexpr double kIrmseCap = 1e12;

/// Inverse root mean squared error; clamped at kIrmseCap (sets *capped).
double irmse(const Eigen::Ref<const Eigen::MatrixXd>& predictions, const Eigen::Ref<const Eigen::MatrixXd>& truth,
             bool* capped = nullptr);

/// One Monte Carlo draw.
struct UtilitySample {
    std::uint64_t seed = 0;
    /// Prediction utility from the cleaned, contaminated and anomaly-free data.
    double irmse_cleaned = 0.0;
    double irmse_anom = 0.0;
    double irmse_clean = 0.0;
    ConfusionMatrix confusion;
    /// Entries (T x n cells) removed or imputed by cleaning.
    int flagged_entries = 0;
    int true_anomalies = 0;
    int capped = 0;
    int constant_series = 0;
};

/// Running mean / sd of one utility variant.
struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

struct UtilityEstimate {
    Objective objective = Objective::dual;
    double value = 0.0;
    double irmse = 0.0;
    double specificity = 1.0;
    double se_irmse = 0.0;
    double se = 0.0;
    Moments cleaned;
    Moments anom;
    Moments clean;
    ConfusionMatrix confusion;
    int B = 0;
    std::uint64_t seed = 0;
    int capped = 0;
    int constant_series = 0;
    std::vector<UtilitySample> samples;
};

/// Draw generator bound to one design.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual UtilitySample draw(const UtilityConfig& config, std::uint64_t seed) const = 0;
};

/// Statistical model plus prediction targets; binds designs to evaluators.
class UtilityModel {
public:
    virtual ~UtilityModel() = default;
    virtual std::unique_ptr<Evaluator> bind(const Design& design) const = 0;
    /// Time points per draw.
    virtual int series_length() const = 0;
};

/**
 * Monte Carlo estimate over config.B draws with seeds derived from seed.
 * The confusion matrix is pooled over draws and its specificity multiplies
 * the mean irmse for the dual objective.
 */
UtilityEstimate estimate_utility(const Design& design, const UtilityConfig& config, const UtilityModel& model,
                                 std::uint64_t seed, bool keep_samples = false);

/// Combine per-draw samples into an estimate.
UtilityEstimate aggregate(const std::vector<UtilitySample>& samples, Objective objective, std::uint64_t seed);

struct DataQuality {
    double pct_removed = 0.0;
    double pct_retained = 0.0;
    bool removed_defined = false;
    bool retained_defined = false;
};

DataQuality data_quality_report(const ConfusionMatrix& cm);
DataQuality data_quality_report(const std::vector<UtilitySample>& samples);

nlohmann::json to_json(const UtilityEstimate& e);

}  // namespace boed
