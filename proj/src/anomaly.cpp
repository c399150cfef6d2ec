#include "boed/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace boed {

void AnomalyGenParams::validate() const {
    if (!(p_A >= 0.0 && p_A <= 1.0)) throw AnomalyError("p_A must lie in [0, 1]");
    if (!(lambda_A >= 0.0)) throw AnomalyError("lambda_A must be nonnegative");
    if (!std::isfinite(mu_A)) throw AnomalyError("mu_A must be finite");
    if (!(sigma_A >= 0.0) || !std::isfinite(sigma_A)) throw AnomalyError("sigma_A must be nonnegative");
}

AnomalyMask generate_mask(const AnomalyGenParams& params, int T, int n, std::uint64_t seed) {
    params.validate();
    if (T < 1 || n < 1) throw AnomalyError("mask dimensions must be positive");
    Rng onset_rng = make_rng(derive_seed(seed, stream::mask_onset));
    Rng length_rng = make_rng(derive_seed(seed, stream::mask_length));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::poisson_distribution<int> poisson(params.lambda_A > 0.0 ? params.lambda_A : 1.0);

    AnomalyMask mask = AnomalyMask::Zero(T, n);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < T; ++t) {
            const bool onset = unif(onset_rng) < params.p_A;
            int l = 0;
            if (T > 1 && params.lambda_A > 0.0) l = poisson(length_rng);
            if (!onset) continue;
            const int end = std::min(T - 1, t + l);
            for (int s = t; s <= end; ++s) mask(s, i) = 1;
        }
    }
    return mask;
}

Eigen::MatrixXd contaminate(const Eigen::MatrixXd& y, const AnomalyMask& mask, const AnomalyGenParams& params,
                            std::uint64_t seed) {
    if (y.rows() != mask.rows() || y.cols() != mask.cols()) {
        throw AnomalyError("data and mask shapes differ");
    }
    Rng rng = make_rng(derive_seed(seed, stream::contamination));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd out = y;
    for (Eigen::Index i = 0; i < y.cols(); ++i) {
        for (Eigen::Index t = 0; t < y.rows(); ++t) {
            const double z = params.mu_A + params.sigma_A * normal(rng);
            if (mask(t, i)) out(t, i) = y(t, i) + z;
        }
    }
    return out;
}

std::vector<std::vector<int>> nearest_neighbours(const std::vector<Point2>& sites, int k) {
    const int n = static_cast<int>(sites.size());
    if (k < 1 || k >= n) throw AnomalyError("k must satisfy 1 <= k < number of sensors");
    std::vector<std::vector<int>> nn(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        auto dist = [&](int j) {
            return std::hypot(sites[i][0] - sites[j][0], sites[i][1] - sites[j][1]);
        };
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist(a) < dist(b); });
        for (int j : order) {
            if (j == i) continue;
            nn[i].push_back(j);
            if (static_cast<int>(nn[i].size()) == k) break;
        }
    }
    return nn;
}

Eigen::VectorXd column_sd(const Eigen::MatrixXd& m) {
    if (m.rows() < 2) throw AnomalyError("standard deviation needs at least two rows");
    Eigen::VectorXd sd(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double mean = m.col(j).mean();
        sd(j) = std::sqrt((m.col(j).array() - mean).square().sum() / static_cast<double>(m.rows() - 1));
    }
    return sd;
}

AnomalyMask detect_spatial_knn(const Eigen::VectorXd& y_anom, const std::vector<std::vector<int>>& neighbours,
                               const Eigen::VectorXd& train_sd) {
    const auto n = y_anom.size();
    if (static_cast<Eigen::Index>(neighbours.size()) != n || train_sd.size() != n) {
        throw AnomalyError("detector inputs have inconsistent sensor counts");
    }
    AnomalyMask flags = AnomalyMask::Zero(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& nb = neighbours[i];
        if (nb.empty()) throw AnomalyError("sensor has no neighbours");
        double mean = 0.0;
        for (int j : nb) mean += y_anom(j);
        mean /= static_cast<double>(nb.size());
        const double lo = mean - 3.0 * train_sd(i);
        const double hi = mean + 3.0 * train_sd(i);
        const double v = y_anom(i);
        flags(0, i) = (lo < v && v < hi) ? 0 : 1;
    }
    return flags;
}

AnomalyMask detect_spatial_knn(const Eigen::VectorXd& y_anom, const std::vector<Point2>& sites,
                               const Eigen::MatrixXd& train, int k) {
    if (static_cast<Eigen::Index>(sites.size()) != y_anom.size() || train.cols() != y_anom.size()) {
        throw AnomalyError("detector inputs have inconsistent sensor counts");
    }
    if (train.rows() < 2) throw AnomalyError("training data needs at least two rows");
    return detect_spatial_knn(y_anom, nearest_neighbours(sites, k), column_sd(train));
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
}

AnomalyMask reduce_to_windows(const AnomalyMask& mask, int w) {
    if (w < 1) throw AnomalyError("window length must be positive");
    const Eigen::Index T = mask.rows();
    const Eigen::Index windows = (T + w - 1) / w;
    AnomalyMask out = AnomalyMask::Zero(windows, mask.cols());
    for (Eigen::Index i = 0; i < mask.cols(); ++i) {
        for (Eigen::Index t = 0; t < T; ++t) {
            if (mask(t, i)) out(t / w, i) = 1;
        }
    }
    return out;
}

AnomalyMask expand_windows(const AnomalyMask& windows, int w, int T) {
    if (w < 1) throw AnomalyError("window length must be positive");
    if (windows.rows() != (T + w - 1) / w) throw AnomalyError("window count does not match T and w");
    AnomalyMask out(T, windows.cols());
    for (Eigen::Index i = 0; i < windows.cols(); ++i) {
        for (int t = 0; t < T; ++t) out(t, i) = windows(t / w, i);
    }
    return out;
}

ConfusionMatrix score(const AnomalyMask& truth, const AnomalyMask& predicted) {
    if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols()) {
        throw AnomalyError("mask shapes differ");
    }
    ConfusionMatrix cm;
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
        for (Eigen::Index i = 0; i < truth.rows(); ++i) {
            const bool t = truth(i, j) != 0;
            const bool p = predicted(i, j) != 0;
            if (t && p) ++cm.tp;
            else if (!t && !p) ++cm.tn;
            else if (p) ++cm.fp;
            else ++cm.fn;
        }
    }
    return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
    Metrics m;
    const auto tp = static_cast<double>(cm.tp);
    const auto tn = static_cast<double>(cm.tn);
    const auto fp = static_cast<double>(cm.fp);
    const auto fn = static_cast<double>(cm.fn);
    if (cm.tn + cm.fp > 0) {
        m.specificity = tn / (tn + fp);
        m.specificity_defined = true;
    }
    if (cm.tp + cm.fn > 0) {
        m.sensitivity = tp / (tp + fn);
        m.sensitivity_defined = true;
    }
    if (cm.total() > 0) {
        m.accuracy = (tn + tp) / static_cast<double>(cm.total());
        m.accuracy_defined = true;
    }
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom > 0.0) {
        m.mcc = (tp * tn - fp * fn) / std::sqrt(denom);
        m.mcc_defined = true;
    }
    return m;
}

void write_mask_csv(std::ostream& out, const AnomalyMask& mask) {
    out << "time,sensor,flag\n";
    for (Eigen::Index t = 0; t < mask.rows(); ++t) {
        for (Eigen::Index i = 0; i < mask.cols(); ++i) {
            out << t << ',' << i << ',' << static_cast<int>(mask(t, i)) << '\n';
        }
    }
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
    out << "tp,tn,fp,fn\n" << cm.tp << ',' << cm.tn << ',' << cm.fp << ',' << cm.fn << '\n';
}

}  // namespace boed
