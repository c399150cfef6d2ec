#include "boed/oddstream.hpp"

#include "boed/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace boed {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286061;

}  // namespace

const std::vector<Feature>& default_features() {
    static const std::vector<Feature> all = {
        Feature::mean,        Feature::variance,       Feature::lag1_autocorrelation, Feature::maximum,
        Feature::minimum,     Feature::trend_slope,    Feature::mean_crossings,       Feature::excursion_ratio,
    };
    return all;
}

Feature parse_feature(const std::string& name) {
    for (Feature f : default_features()) {
        if (feature_name(f) == name) return f;
    }
    throw OddstreamError("unknown feature '" + name + "'");
}

std::string feature_name(Feature f) {
    switch (f) {
        case Feature::mean: return "mean";
        case Feature::variance: return "variance";
        case Feature::lag1_autocorrelation: return "lag1_autocorrelation";
        case Feature::maximum: return "maximum";
        case Feature::minimum: return "minimum";
        case Feature::trend_slope: return "trend_slope";
        case Feature::mean_crossings: return "mean_crossings";
        case Feature::excursion_ratio: return "excursion_ratio";
    }
    return "unknown";
}

bool extract_features(const Eigen::Ref<const Eigen::VectorXd>& x, const std::vector<Feature>& features,
                      Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::Index L = x.size();
    if (L < 3) throw OddstreamError("series must have at least three points");
    const double mean = x.mean();
    const Eigen::ArrayXd dev = x.array() - mean;
    const double ss = dev.square().sum();
    const double var = ss / static_cast<double>(L - 1);
    const bool constant = !(ss > 0.0);
    const double sd = std::sqrt(var);

    for (std::size_t k = 0; k < features.size(); ++k) {
        double v = 0.0;
        switch (features[k]) {
            case Feature::mean: v = mean; break;
            case Feature::variance: v = var; break;
            case Feature::lag1_autocorrelation:
                if (!constant) v = (dev.head(L - 1) * dev.tail(L - 1)).sum() / ss;
                break;
            case Feature::maximum: v = x.maxCoeff(); break;
            case Feature::minimum: v = x.minCoeff(); break;
            case Feature::trend_slope: {
                const double tbar = 0.5 * static_cast<double>(L - 1);
                double num = 0.0;
                double den = 0.0;
                for (Eigen::Index t = 0; t < L; ++t) {
                    const double c = static_cast<double>(t) - tbar;
                    num += c * dev(t);
                    den += c * c;
                }
                v = num / den;
                break;
            }
            case Feature::mean_crossings: {
                int crossings = 0;
                for (Eigen::Index t = 1; t < L; ++t) {
                    if ((dev(t - 1) > 0.0) != (dev(t) > 0.0)) ++crossings;
                }
                v = static_cast<double>(crossings) / static_cast<double>(L - 1);
                break;
            }
            case Feature::excursion_ratio:
                if (!constant) v = (dev.abs() > 3.0 * sd).cast<double>().mean();
                break;
        }
        out(static_cast<Eigen::Index>(k)) = v;
    }
    return !constant;
}

double psi_transform(double density) {
    if (density < 1.0 / kTwoPi) {
        return std::sqrt(std::max(0.0, -2.0 * std::log(density) - 2.0 * std::log(kTwoPi)));
    }
    return 0.0;
}

Eigen::Vector2d OddstreamModel::project(const Eigen::VectorXd& raw) const {
    const Eigen::VectorXd z = (raw - feature_mean).cwiseQuotient(feature_scale);
    return basis.transpose() * z;
}

double OddstreamModel::density(const Eigen::Vector2d& x) const {
    const double norm = 1.0 / (kTwoPi * bandwidth(0) * bandwidth(1));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const double u = (x(0) - points(i, 0)) / bandwidth(0);
        const double v = (x(1) - points(i, 1)) / bandwidth(1);
        sum += std::exp(-0.5 * (u * u + v * v));
    }
    return norm * sum / static_cast<double>(points.rows());
}

OddstreamModel oddstream_train(const Eigen::MatrixXd& y_train, const OddstreamOptions& options, std::uint64_t seed) {
    if (!(options.tau_F > 0.0 && options.tau_F < 1.0)) throw OddstreamError("tau_F must lie in (0, 1)");
    if (options.extremes < 2) throw OddstreamError("at least two extremes are required");
    if (options.features.size() < 2) throw OddstreamError("at least two features are required");
    const auto m = static_cast<Eigen::Index>(options.features.size());

    std::vector<Eigen::VectorXd> rows;
    Eigen::VectorXd f(m);
    for (Eigen::Index j = 0; j < y_train.cols(); ++j) {
        if (extract_features(y_train.col(j), options.features, f)) rows.push_back(f);
    }
    const auto N = static_cast<Eigen::Index>(rows.size());
    if (N < 3) throw OddstreamError("fewer than three non-constant training series");

    Eigen::MatrixXd M(N, m);
    for (Eigen::Index i = 0; i < N; ++i) M.row(i) = rows[static_cast<std::size_t>(i)].transpose();

    OddstreamModel model;
    model.features = options.features;
    model.tau_F = options.tau_F;
    model.n_series = static_cast<int>(N);
    model.feature_mean = M.colwise().mean().transpose();
    model.feature_scale.resize(m);
    bool any_varying = false;
    for (Eigen::Index k = 0; k < m; ++k) {
        const double sd = std::sqrt((M.col(k).array() - model.feature_mean(k)).square().sum() /
                                    static_cast<double>(N - 1));
        if (sd > 0.0) {
            model.feature_scale(k) = sd;
            any_varying = true;
        } else {
            model.feature_scale(k) = 1.0;
        }
    }
    if (!any_varying) throw OddstreamError("all training features have zero variance");

    Eigen::MatrixXd Z = (M.rowwise() - model.feature_mean.transpose()).array().rowwise() /
                        model.feature_scale.transpose().array();
    const Eigen::MatrixXd cov = Z.transpose() * Z / static_cast<double>(N - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    model.basis.resize(m, 2);
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd v = eig.eigenvectors().col(m - 1 - c);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        model.basis.col(c) = v;
    }
    model.points = Z * model.basis;

    const double factor = std::pow(static_cast<double>(N), -1.0 / 6.0);
    for (int c = 0; c < 2; ++c) {
        const double mu = model.points.col(c).mean();
        const double sd = std::sqrt((model.points.col(c).array() - mu).square().sum() / static_cast<double>(N - 1));
        if (!(sd > 0.0)) throw OddstreamError("projected training points are degenerate");
        model.bandwidth(c) = sd * factor;
    }

    const int batch = options.batch > 0 ? options.batch : static_cast<int>(N);
    Rng rng = make_rng(derive_seed(seed, stream::detector));
    std::uniform_int_distribution<Eigen::Index> pick(0, N - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> psi(static_cast<std::size_t>(options.extremes));
    for (auto& value : psi) {
        double min_density = std::numeric_limits<double>::infinity();
        for (int s = 0; s < batch; ++s) {
            const Eigen::Index c = pick(rng);
            const double a = normal(rng);
            const double b = normal(rng);
            const Eigen::Vector2d x(model.points(c, 0) + model.bandwidth(0) * a,
                                    model.points(c, 1) + model.bandwidth(1) * b);
            min_density = std::min(min_density, model.density(x));
        }
        value = psi_transform(min_density);
    }

    double mean = 0.0;
    for (double v : psi) mean += v;
    mean /= static_cast<double>(psi.size());
    double ss = 0.0;
    for (double v : psi) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(psi.size() - 1));
    model.gumbel_scale = std::max(sd * std::sqrt(6.0) / std::numbers::pi, 1e-12);
    model.gumbel_location = mean - kEulerGamma * model.gumbel_scale;
    model.psi_threshold = model.gumbel_location - model.gumbel_scale * std::log(-std::log(options.tau_F));
    model.threshold = std::exp(-0.5 * model.psi_threshold * model.psi_threshold) / kTwoPi;
    return model;
}

AnomalyMask oddstream_detect(const OddstreamModel& model, const Eigen::MatrixXd& window, int* constant_series) {
    const auto m = static_cast<Eigen::Index>(model.features.size());
    AnomalyMask flags = AnomalyMask::Zero(1, window.cols());
    Eigen::VectorXd f(m);
    for (Eigen::Index j = 0; j < window.cols(); ++j) {
        if (!extract_features(window.col(j), model.features, f)) {
            flags(0, j) = 1;
            if (constant_series) ++*constant_series;
            continue;
        }
        flags(0, j) = model.density(model.project(f)) < model.threshold ? 1 : 0;
    }
    return flags;
}

}  // namespace boed
