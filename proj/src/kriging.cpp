#include "boed/kriging.hpp"

#include "boed/linalg.hpp"

#include <cmath>

namespace boed {

void PartitionedCovariance::validate() const {
    if (obs.rows() != obs.cols()) throw KrigingError("observation covariance is not square");
    if (pred.rows() != pred.cols()) throw KrigingError("prediction covariance is not square");
    if (cross.rows() != obs.rows() || cross.cols() != pred.rows()) {
        throw KrigingError("cross-covariance dimensions do not match");
    }
}

PartitionedCovariance partition(const Eigen::MatrixXd& joint, Eigen::Index n_obs, double nugget) {
    const Eigen::Index m = joint.rows() - n_obs;
    if (n_obs < 0 || m < 0 || joint.rows() != joint.cols()) throw KrigingError("bad partition");
    PartitionedCovariance pc;
    pc.obs = joint.topLeftCorner(n_obs, n_obs);
    pc.pred = joint.bottomRightCorner(m, m);
    pc.cross = joint.topRightCorner(n_obs, m);
    pc.nugget = nugget;
    return pc;
}

namespace {

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    try {
        return factorize_spd(a).solve(b);
    } catch (const FactorizationError& e) {
        throw KrigingError(std::string("singular kriging system: ") + e.what());
    }
}

}  // namespace

Eigen::VectorXd posterior_mean_spatial(const PartitionedCovariance& pc, const Eigen::VectorXd& y,
                                       const std::optional<std::vector<int>>& kept) {
    pc.validate();
    if (y.size() != pc.obs.rows()) throw KrigingError("observation vector length does not match covariance");
    if (!kept) {
        Eigen::MatrixXd c = pc.obs;
        c.diagonal().array() += pc.nugget;
        return pc.cross.transpose() * solve_spd(c, y);
    }
    if (kept->empty()) throw KrigingError("all observations were removed");
    const auto k = static_cast<Eigen::Index>(kept->size());
    Eigen::MatrixXd c(k, k);
    Eigen::MatrixXd s(k, pc.cross.cols());
    Eigen::VectorXd yk(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const int i = (*kept)[a];
        if (i < 0 || i >= y.size()) throw KrigingError("kept index out of range");
        yk(a) = y(i);
        s.row(a) = pc.cross.row(i);
        for (Eigen::Index b = 0; b < k; ++b) c(a, b) = pc.obs(i, (*kept)[b]);
    }
    c.diagonal().array() += pc.nugget;
    return s.transpose() * solve_spd(c, yk);
}

Eigen::VectorXd posterior_mean_spatiotemporal(const PartitionedCovariance& pc, const Eigen::MatrixXd& X,
                                              const Eigen::MatrixXd& Xhat, const Eigen::VectorXd& beta,
                                              const Eigen::VectorXd& y) {
    pc.validate();
    if (y.size() != pc.obs.rows()) throw KrigingError("observation vector length does not match covariance");
    Eigen::VectorXd resid = y;
    Eigen::VectorXd base = Eigen::VectorXd::Zero(pc.pred.rows());
    if (beta.size() > 0) {
        if (X.rows() != y.size() || X.cols() != beta.size() || Xhat.rows() != pc.pred.rows() ||
            Xhat.cols() != beta.size()) {
            throw KrigingError("covariate matrices do not match beta and the covariance blocks");
        }
        resid -= X * beta;
        base = Xhat * beta;
    }
    return base + pc.cross.transpose() * solve_spd(pc.obs, resid);
}

Eigen::MatrixXd temporal_factor(double phi, int T) {
    if (T < 1) throw KrigingError("T must be positive");
    if (!(std::abs(phi) < 1.0)) throw KrigingError("|phi| must be < 1");
    Eigen::VectorXd a(T);
    a(0) = 1.0;
    for (int t = 1; t < T; ++t) a(t) = phi * phi * a(t - 1) + 1.0;
    Eigen::MatrixXd k(T, T);
    for (int t = 0; t < T; ++t) {
        for (int s = 0; s <= t; ++s) {
            k(t, s) = k(s, t) = std::pow(phi, t - s) * a(s);
        }
    }
    return k;
}

PartitionedCovariance build_spacetime_cross_covariance(const Eigen::MatrixXd& sigma_all, Eigen::Index n_obs,
                                                       double phi, int T, double nugget) {
    const Eigen::Index S = sigma_all.rows();
    const Eigen::Index m = S - n_obs;
    if (sigma_all.cols() != S || n_obs < 0 || m < 0) throw KrigingError("bad site partition");
    Eigen::MatrixXd sigma0 = sigma_all;
    sigma0.diagonal().array() += nugget;
    const Eigen::MatrixXd k = temporal_factor(phi, T);
    const Eigen::MatrixXd oo = sigma0.topLeftCorner(n_obs, n_obs);
    const Eigen::MatrixXd pp = sigma0.bottomRightCorner(m, m);
    const Eigen::MatrixXd op = sigma0.topRightCorner(n_obs, m);

    PartitionedCovariance pc;
    pc.obs.resize(n_obs * T, n_obs * T);
    pc.pred.resize(m * T, m * T);
    pc.cross.resize(n_obs * T, m * T);
    for (int t = 0; t < T; ++t) {
        for (int s = 0; s < T; ++s) {
            pc.obs.block(t * n_obs, s * n_obs, n_obs, n_obs) = k(t, s) * oo;
            pc.pred.block(t * m, s * m, m, m) = k(t, s) * pp;
            pc.cross.block(t * n_obs, s * m, n_obs, m) = k(t, s) * op;
        }
    }
    pc.nugget = 0.0;
    return pc;
}

Eigen::MatrixXd kriging_operator(const Eigen::MatrixXd& cov, const std::vector<int>& sources,
                                 const std::vector<int>& targets) {
    if (sources.empty()) throw KrigingError("kriging operator needs at least one source site");
    const Eigen::MatrixXd css = submatrix(cov, sources, sources);
    const Eigen::MatrixXd cts = submatrix(cov, targets, sources);
    try {
        // G^T = C_ss^{-1} C_st
        return factorize_spd(css).solve(cts.transpose()).transpose();
    } catch (const FactorizationError& e) {
        throw KrigingError(std::string("singular kriging system: ") + e.what());
    }
}

}  // namespace boed
