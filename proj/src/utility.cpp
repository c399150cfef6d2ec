#include "boed/utility.hpp"

#include "boed/linalg.hpp"
#include "boed/rng.hpp"

#include <cmath>
#include <exception>

namespace boed {

Objective parse_objective(const std::string& name) {
    if (name == "dual") return Objective::dual;
    if (name == "irmse-only" || name == "irmse") return Objective::irmse_only;
    if (name == "specificity-only" || name == "specificity" || name == "sp") return Objective::specificity_only;
    throw UtilityError("unknown objective '" + name + "'");
}

std::string objective_name(Objective o) {
    switch (o) {
        case Objective::dual: return "dual";
        case Objective::irmse_only: return "irmse-only";
        case Objective::specificity_only: return "specificity-only";
    }
    return "unknown";
}

DetectorKind parse_detector(const std::string& name) {
    if (name == "spatial-knn" || name == "spatial_knn" || name == "knn") return DetectorKind::spatial_knn;
    if (name == "oddstream") return DetectorKind::oddstream;
    if (name == "none") return DetectorKind::none;
    throw UtilityError("unknown detector '" + name + "'");
}

std::string detector_name(DetectorKind d) {
    switch (d) {
        case DetectorKind::spatial_knn: return "spatial-knn";
        case DetectorKind::oddstream: return "oddstream";
        case DetectorKind::none: return "none";
    }
    return "unknown";
}

void UtilityConfig::validate() const {
    if (B < 1) throw UtilityError("B must be at least 1");
    if (window < 0) throw UtilityError("window must be nonnegative");
    if (threads < 0) throw UtilityError("threads must be nonnegative");
    anomaly.validate();
    if (detector.kind == DetectorKind::spatial_knn) {
        if (detector.k < 1) throw UtilityError("k must be positive");
        if (detector.B_train < 2) throw UtilityError("B_train must be at least 2");
    }
    if (detector.kind == DetectorKind::oddstream && detector.train_panels < 1) {
        throw UtilityError("train_panels must be positive");
    }
}

double irmse(const Eigen::Ref<const Eigen::MatrixXd>& predictions, const Eigen::Ref<const Eigen::MatrixXd>& truth,
             bool* capped) {
    if (predictions.rows() != truth.rows() || predictions.cols() != truth.cols()) {
        throw UtilityError("prediction and truth shapes differ");
    }
    if (predictions.size() == 0) throw UtilityError("irmse needs at least one value");
    const double mse = (predictions - truth).squaredNorm() / static_cast<double>(predictions.size());
    const double value = 1.0 / std::sqrt(mse);
    if (capped) *capped = false;
    if (!(value < kIrmseCap)) {
        if (capped) *capped = true;
        return kIrmseCap;
    }
    return value;
}

namespace {

Moments moments(const std::vector<UtilitySample>& samples, double UtilitySample::*field) {
    Moments m;
    const auto B = static_cast<double>(samples.size());
    for (const auto& s : samples) m.mean += s.*field;
    m.mean /= B;
    if (samples.size() > 1) {
        double ss = 0.0;
        for (const auto& s : samples) ss += (s.*field - m.mean) * (s.*field - m.mean);
        m.sd = std::sqrt(ss / (B - 1.0));
    }
    return m;
}

}  // namespace

UtilityEstimate aggregate(const std::vector<UtilitySample>& samples, Objective objective, std::uint64_t seed) {
    if (samples.empty()) throw UtilityError("no utility samples");
    UtilityEstimate e;
    e.objective = objective;
    e.seed = seed;
    e.B = static_cast<int>(samples.size());
    for (const auto& s : samples) {
        e.confusion += s.confusion;
        e.capped += s.capped;
        e.constant_series += s.constant_series;
    }
    e.cleaned = moments(samples, &UtilitySample::irmse_cleaned);
    e.anom = moments(samples, &UtilitySample::irmse_anom);
    e.clean = moments(samples, &UtilitySample::irmse_clean);
    e.irmse = e.cleaned.mean;
    e.se_irmse = e.cleaned.sd / std::sqrt(static_cast<double>(e.B));

    const Metrics m = metrics(e.confusion);
    const double negatives = static_cast<double>(e.confusion.tn + e.confusion.fp);
    e.specificity = m.specificity;
    const double se_sp = negatives > 0.0 ? std::sqrt(m.specificity * (1.0 - m.specificity) / negatives) : 0.0;

    switch (objective) {
        case Objective::dual:
            e.value = e.irmse * e.specificity;
            e.se = std::hypot(e.specificity * e.se_irmse, e.irmse * se_sp);
            break;
        case Objective::irmse_only:
            e.value = e.irmse;
            e.se = e.se_irmse;
            break;
        case Objective::specificity_only:
            e.value = e.specificity;
            e.se = se_sp;
            break;
    }
    return e;
}

UtilityEstimate estimate_utility(const Design& design, const UtilityConfig& config, const UtilityModel& model,
                                 std::uint64_t seed, bool keep_samples) {
    config.validate();
    const auto evaluator = model.bind(design);
    std::vector<UtilitySample> samples(static_cast<std::size_t>(config.B));
    parallel_for(samples.size(), config.threads, [&](std::size_t b) {
        const std::uint64_t draw_seed = derive_seed(seed, stream::draw, b);
        try {
            samples[b] = evaluator->draw(config, draw_seed);
        } catch (const std::exception& ex) {
            throw UtilityError("draw " + std::to_string(b) + ": " + ex.what());
        }
        samples[b].seed = draw_seed;
    });
    UtilityEstimate e = aggregate(samples, config.objective, seed);
    if (keep_samples) e.samples = std::move(samples);
    return e;
}

DataQuality data_quality_report(const ConfusionMatrix& cm) {
    const Metrics m = metrics(cm);
    DataQuality q;
    q.pct_removed = 100.0 * m.sensitivity;
    q.pct_retained = 100.0 * m.specificity;
    q.removed_defined = m.sensitivity_defined;
    q.retained_defined = m.specificity_defined;
    return q;
}

DataQuality data_quality_report(const std::vector<UtilitySample>& samples) {
    ConfusionMatrix cm;
    for (const auto& s : samples) cm += s.confusion;
    return data_quality_report(cm);
}

nlohmann::json to_json(const UtilityEstimate& e) {
    const Metrics m = metrics(e.confusion);
    nlohmann::json j;
    j["objective"] = objective_name(e.objective);
    j["value"] = e.value;
    j["se"] = e.se;
    j["components"] = {{"irmse", e.irmse}, {"specificity", e.specificity}};
    j["se_irmse"] = e.se_irmse;
    j["irmse_cleaned"] = {{"mean", e.cleaned.mean}, {"sd", e.cleaned.sd}};
    j["irmse_anom"] = {{"mean", e.anom.mean}, {"sd", e.anom.sd}};
    j["irmse_clean"] = {{"mean", e.clean.mean}, {"sd", e.clean.sd}};
    j["confusion"] = {{"tp", e.confusion.tp}, {"tn", e.confusion.tn}, {"fp", e.confusion.fp}, {"fn", e.confusion.fn}};
    j["metrics"] = {{"specificity", m.specificity_defined ? nlohmann::json(m.specificity) : nlohmann::json()},
                    {"sensitivity", m.sensitivity_defined ? nlohmann::json(m.sensitivity) : nlohmann::json()},
                    {"accuracy", m.accuracy_defined ? nlohmann::json(m.accuracy) : nlohmann::json()},
                    {"mcc", m.mcc_defined ? nlohmann::json(m.mcc) : nlohmann::json()}};
    j["B"] = e.B;
    j["seed"] = e.seed;
    j["capped"] = e.capped;
    j["constant_series"] = e.constant_series;
    return j;
}

}  // namespace boed
