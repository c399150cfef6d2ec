#include "boed/studies.hpp"

#include "boed/kriging.hpp"
#include "boed/linalg.hpp"
#include "boed/rng.hpp"

#include <numeric>

namespace boed {

double nugget_variance(const ModelParams& params, double tau2) {
    const auto& s = params.spatial;
    return tau2 * (s.sigma2_e + s.sigma2_u + s.sigma2_d) + s.sigma2_0;
}

std::vector<Point2> grid_cell_centres(const Point2& lower, const Point2& upper, int nx, int ny) {
    if (nx < 1 || ny < 1) throw UtilityError("grid dimensions must be positive");
    if (!(upper[0] > lower[0] && upper[1] > lower[1])) throw UtilityError("grid rectangle is empty");
    std::vector<Point2> pts;
    const double dx = (upper[0] - lower[0]) / nx;
    const double dy = (upper[1] - lower[1]) / ny;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) pts.push_back({lower[0] + (i + 0.5) * dx, lower[1] + (j + 0.5) * dy});
    }
    return pts;
}

std::vector<NetworkLocation> segment_midpoints(const RiverNetwork& net, int count) {
    const int S = static_cast<int>(net.size());
    if (count < 1 || count > S) throw UtilityError("prediction count must lie in [1, number of segments]");
    std::vector<int> ids;
    for (const auto& s : net.segments()) ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    std::vector<NetworkLocation> out;
    for (int q = 0; q < count; ++q) {
        const int pos = static_cast<int>((static_cast<long long>(q) * S) / count + S / (2 * count));
        const int id = ids[static_cast<std::size_t>(std::min(pos, S - 1))];
        out.push_back({id, 0.5 * net.segment(id).length});
    }
    return out;
}

Eigen::MatrixXd impute_flagged(const Eigen::MatrixXd& y, const AnomalyMask& flags, const Eigen::MatrixXd& sigma0,
                               double phi) {
    const Eigen::Index T = y.rows();
    const Eigen::Index n = y.cols();
    if (flags.rows() != T || flags.cols() != n) throw UtilityError("flag and data shapes differ");
    if (sigma0.rows() != n || sigma0.cols() != n) throw UtilityError("covariance does not match sensor count");
    if (flags.count() == 0) return y;

    Eigen::MatrixXd out = y;
    bool whole_columns = true;
    for (Eigen::Index i = 0; i < n && whole_columns; ++i) {
        const auto c = flags.col(i).cast<int>().sum();
        whole_columns = (c == 0 || c == T);
    }

    if (whole_columns) {
        std::vector<int> kept;
        std::vector<int> flagged;
        for (Eigen::Index i = 0; i < n; ++i) (flags(0, i) ? flagged : kept).push_back(static_cast<int>(i));
        if (kept.empty()) {
            out.setZero();
            return out;
        }
        const Eigen::MatrixXd H = kriging_operator(sigma0, kept, flagged);
        Eigen::MatrixXd yk(T, static_cast<Eigen::Index>(kept.size()));
        for (std::size_t a = 0; a < kept.size(); ++a) yk.col(static_cast<Eigen::Index>(a)) = y.col(kept[a]);
        const Eigen::MatrixXd yf = yk * H.transpose();
        for (std::size_t a = 0; a < flagged.size(); ++a) out.col(flagged[a]) = yf.col(static_cast<Eigen::Index>(a));
        return out;
    }

    // Entry-level conditioning over the full space-time covariance.
    const Eigen::MatrixXd K = temporal_factor(phi, static_cast<int>(T));
    const Eigen::Index N = T * n;
    Eigen::MatrixXd joint(N, N);
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index s = 0; s < T; ++s) joint.block(t * n, s * n, n, n) = K(t, s) * sigma0;
    }
    std::vector<int> kept;
    std::vector<int> flagged;
    for (Eigen::Index t = 0; t < T; ++t) {
        for (Eigen::Index i = 0; i < n; ++i) (flags(t, i) ? flagged : kept).push_back(static_cast<int>(t * n + i));
    }
    if (kept.empty()) {
        out.setZero();
        return out;
    }
    const Eigen::MatrixXd H = kriging_operator(joint, kept, flagged);
    Eigen::VectorXd yk(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t a = 0; a < kept.size(); ++a) yk(static_cast<Eigen::Index>(a)) = y(kept[a] / n, kept[a] % n);
    const Eigen::VectorXd yf = H * yk;
    for (std::size_t a = 0; a < flagged.size(); ++a) {
        out(flagged[a] / n, flagged[a] % n) = yf(static_cast<Eigen::Index>(a));
    }
    return out;
}

namespace {

/// Draw generator over n design sites followed by m prediction sites.
class SiteEvaluator : public Evaluator {
public:
    SiteEvaluator(const StudyModel& model, SiteGeometry geometry, std::vector<Point2> design_points, Eigen::Index n,
                  int T)
        : model_(model), geom_(std::move(geometry)), points_(std::move(design_points)), n_(n), T_(T) {}

    UtilitySample draw(const UtilityConfig& config, std::uint64_t seed) const override;

private:
    const StudyModel& model_;
    SiteGeometry geom_;
    std::vector<Point2> points_;
    Eigen::Index n_;
    int T_;
};

UtilitySample SiteEvaluator::draw(const UtilityConfig& config, std::uint64_t seed) const {
    const Eigen::Index n = n_;
    const Eigen::Index m = geom_.size() - n;
    const int T = T_;
    const int w = config.window == 0 ? T : config.window;
    if (w > T) throw UtilityError("window length exceeds series length");

    Rng prng = make_rng(derive_seed(seed, stream::params));
    ModelParams theta = draw_params(model_.prior, prng);
    if (T == 1) theta.phi = 0.0;
    Eigen::MatrixXd sigma0 = build_sigma(model_.covariance, theta.spatial, geom_);
    sigma0.diagonal().array() += nugget_variance(theta, model_.tau2);
    const Eigen::MatrixXd L = factorize_spd(sigma0).matrixL();
    const MvnSampler joint = MvnSampler::from_lower(L);
    const MvnSampler obs_only = MvnSampler::from_lower(L.topLeftCorner(n, n));

    // Rows are time steps, columns sites.
    Rng drng = make_rng(derive_seed(seed, stream::data));
    Eigen::MatrixXd all;
    if (T == 1) {
        all = joint.draw(drng).transpose();
    } else {
        all = simulate_spatiotemporal(theta, joint, T, {}, drng).transpose();
    }
    const Eigen::MatrixXd y = all.leftCols(n);
    const Eigen::MatrixXd truth = all.rightCols(m);

    const AnomalyMask truth_mask = generate_mask(config.anomaly, T, static_cast<int>(n), seed);
    const Eigen::MatrixXd y_anom = contaminate(y, truth_mask, config.anomaly, seed);

    UtilitySample out;
    const Eigen::Index windows = (T + w - 1) / w;
    AnomalyMask verdict = AnomalyMask::Zero(windows, n);
    Rng trng = make_rng(derive_seed(seed, stream::training));
    switch (config.detector.kind) {
        case DetectorKind::none: break;
        case DetectorKind::spatial_knn: {
            if (T != 1) throw UtilityError("the spatial k-NN detector needs T = 1");
            Eigen::MatrixXd train(config.detector.B_train, n);
            Eigen::VectorXd row(n);
            for (int r = 0; r < config.detector.B_train; ++r) {
                obs_only.draw_into(trng, row);
                train.row(r) = row.transpose();
            }
            verdict = detect_spatial_knn(y_anom.row(0).transpose(), nearest_neighbours(points_, config.detector.k),
                                         column_sd(train));
            break;
        }
        case DetectorKind::oddstream: {
            const int panels = config.detector.train_panels;
            Eigen::MatrixXd train(T, n * panels);
            for (int p = 0; p < panels; ++p) {
                train.middleCols(p * n, n) = simulate_spatiotemporal(theta, obs_only, T, {}, trng).transpose();
            }
            const OddstreamModel od = oddstream_train(train, config.detector.oddstream,
                                                      derive_seed(seed, stream::detector));
            for (Eigen::Index j = 0; j < windows; ++j) {
                const Eigen::Index start = j * w;
                const Eigen::Index len = std::min<Eigen::Index>(w, T - start);
                verdict.row(j) = oddstream_detect(od, y_anom.middleRows(start, len), &out.constant_series);
            }
            break;
        }
    }
    const AnomalyMask flags = expand_windows(verdict, w, T);
    out.confusion = score(reduce_to_windows(truth_mask, w), verdict);
    out.flagged_entries = static_cast<int>(flags.count());
    out.true_anomalies = static_cast<int>(truth_mask.count());

    std::vector<int> obs(static_cast<std::size_t>(n));
    std::iota(obs.begin(), obs.end(), 0);
    std::vector<int> pred(static_cast<std::size_t>(m));
    std::iota(pred.begin(), pred.end(), static_cast<int>(n));
    const Eigen::MatrixXd G = kriging_operator(sigma0, obs, pred);

    Eigen::MatrixXd cleaned_pred;
    if (T == 1) {
        std::vector<int> kept;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!flags(0, i)) kept.push_back(static_cast<int>(i));
        }
        if (kept.empty()) {
            cleaned_pred = Eigen::MatrixXd::Zero(1, m);
        } else {
            const Eigen::MatrixXd Gk = kriging_operator(sigma0, kept, pred);
            Eigen::VectorXd yk(static_cast<Eigen::Index>(kept.size()));
            for (std::size_t a = 0; a < kept.size(); ++a) yk(static_cast<Eigen::Index>(a)) = y_anom(0, kept[a]);
            cleaned_pred = (Gk * yk).transpose();
        }
    } else {
        const Eigen::MatrixXd y_clean = impute_flagged(y_anom, flags, sigma0.topLeftCorner(n, n), theta.phi);
        cleaned_pred = y_clean * G.transpose();
    }

    bool capped = false;
    out.irmse_cleaned = irmse(cleaned_pred, truth, &capped);
    out.capped += capped;
    out.irmse_anom = irmse(y_anom * G.transpose(), truth, &capped);
    out.capped += capped;
    out.irmse_clean = irmse(y * G.transpose(), truth, &capped);
    out.capped += capped;
    return out;
}

void check_model(const StudyModel& model) {
    model.prior.validate();
    if (model.covariance.components.empty()) throw UtilityError("covariance has no components");
    if (model.prior.beta.size() != 0) throw UtilityError("regression coefficients are not supported; use a zero mean");
    if (!(model.tau2 >= 0.0)) throw UtilityError("tau2 must be nonnegative");
}

}  // namespace

SpatialStudy::SpatialStudy(StudyModel model, std::vector<Point2> prediction)
    : model_(std::move(model)), prediction_(std::move(prediction)) {
    check_model(model_);
    if (model_.covariance.needs_network()) throw UtilityError("planar study cannot use stream components");
    if (prediction_.empty()) throw UtilityError("prediction set is empty");
}

std::unique_ptr<Evaluator> SpatialStudy::bind(const Design& design) const {
    if (design.dims() != 2) throw UtilityError("planar designs need two coordinates per point");
    if (design.points() < 1) throw UtilityError("design has no points");
    std::vector<Point2> pts;
    for (Eigen::Index i = 0; i < design.points(); ++i) pts.push_back({design.coords(i, 0), design.coords(i, 1)});
    std::vector<Point2> all = pts;
    all.insert(all.end(), prediction_.begin(), prediction_.end());
    return std::make_unique<SiteEvaluator>(model_, geometry_from_points(all), std::move(pts), design.points(), 1);
}

RiverStudy::RiverStudy(std::shared_ptr<const RiverNetwork> network, std::vector<NetworkPath> paths, StudyModel model,
                       int T, std::vector<NetworkLocation> prediction)
    : network_(std::move(network)),
      paths_(std::move(paths)),
      model_(std::move(model)),
      T_(T),
      prediction_(std::move(prediction)) {
    check_model(model_);
    if (!network_) throw UtilityError("river study needs a network");
    if (T_ < 1) throw UtilityError("T must be positive");
    if (paths_.empty()) throw UtilityError("river study needs at least one path");
    if (prediction_.empty()) throw UtilityError("prediction set is empty");
    for (const auto& p : prediction_) network_->check(p);
}

std::vector<NetworkLocation> RiverStudy::locations(const Design& design) const {
    if (design.dims() != 1) throw UtilityError("network designs need one coordinate per point");
    if (static_cast<Eigen::Index>(design.path.size()) != design.points()) {
        throw UtilityError("network design needs one path per point");
    }
    std::vector<NetworkLocation> locs;
    for (Eigen::Index i = 0; i < design.points(); ++i) {
        const int p = design.path[static_cast<std::size_t>(i)];
        if (p < 0 || p >= static_cast<int>(paths_.size())) throw UtilityError("design path index out of range");
        locs.push_back(locate_on_path(*network_, paths_[static_cast<std::size_t>(p)], design.coords(i, 0)));
    }
    return locs;
}

std::unique_ptr<Evaluator> RiverStudy::bind(const Design& design) const {
    std::vector<NetworkLocation> sites = locations(design);
    std::vector<Point2> pts;
    for (const auto& s : sites) pts.push_back(network_->coords().empty() ? Point2{0.0, 0.0} : network_->embed(s));
    sites.insert(sites.end(), prediction_.begin(), prediction_.end());
    return std::make_unique<SiteEvaluator>(model_, geometry_from_network(*network_, sites), std::move(pts),
                                           design.points(), T_);
}

}  // namespace boed
