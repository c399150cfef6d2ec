#include "boed/covariance.hpp"

#include <algorithm>
#include <cmath>

namespace boed {

double kernel_euclidean(double h, double sigma2, double range, EuclideanFamily family) {
    if (!(range > 0.0)) throw CovarianceError("Euclidean range must be positive");
    const double r = h / range;
    switch (family) {
        case EuclideanFamily::exponential:
            return sigma2 * std::exp(-3.0 * r);
        case EuclideanFamily::gaussian:
            return sigma2 * std::exp(-3.0 * r * r);
        case EuclideanFamily::spherical:
            return r <= 1.0 ? sigma2 * (1.0 - 1.5 * r + 0.5 * r * r * r) : 0.0;
    }
    return 0.0;
}

double kernel_tailup(double h, bool connected, double weight, double sigma2, double range) {
    if (!(range > 0.0)) throw CovarianceError("tail-up range must be positive");
    if (!connected) return 0.0;
    return weight * sigma2 * std::exp(-3.0 * h / range);
}

double kernel_taildown(double h, double sigma2, double range) {
    if (!(range > 0.0)) throw CovarianceError("tail-down range must be positive");
    return sigma2 * std::exp(-3.0 * h / range);
}

bool CovarianceSpec::has(Component c) const {
    return std::find(components.begin(), components.end(), c) != components.end();
}

bool CovarianceSpec::needs_euclidean() const {
    return has(Component::euclidean_exponential) || has(Component::euclidean_gaussian) ||
           has(Component::euclidean_spherical);
}

Component parse_component(const std::string& name) {
    if (name == "euclidean-exponential") return Component::euclidean_exponential;
    if (name == "euclidean-gaussian") return Component::euclidean_gaussian;
    if (name == "euclidean-spherical") return Component::euclidean_spherical;
    if (name == "tail-up") return Component::tail_up;
    if (name == "tail-down") return Component::tail_down;
    throw CovarianceError("unknown covariance component '" + name + "'");
}

std::string component_name(Component c) {
    switch (c) {
        case Component::euclidean_exponential: return "euclidean-exponential";
        case Component::euclidean_gaussian: return "euclidean-gaussian";
        case Component::euclidean_spherical: return "euclidean-spherical";
        case Component::tail_up: return "tail-up";
        case Component::tail_down: return "tail-down";
    }
    return "?";
}

SiteGeometry geometry_from_points(const std::vector<Point2>& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    SiteGeometry g;
    g.euclidean.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g.euclidean(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = std::hypot(points[i][0] - points[j][0], points[i][1] - points[j][1]);
            g.euclidean(i, j) = d;
            g.euclidean(j, i) = d;
        }
    }
    return g;
}

SiteGeometry geometry_from_network(const RiverNetwork& net, const std::vector<NetworkLocation>& sites) {
    const auto n = static_cast<Eigen::Index>(sites.size());
    std::vector<Point2> pts;
    pts.reserve(sites.size());
    const bool embedded = !net.coords().empty();
    for (const auto& s : sites) {
        net.check(s);
        pts.push_back(embedded ? net.embed(s) : Point2{0.0, 0.0});
    }
    SiteGeometry g = geometry_from_points(pts);
    g.stream.resize(n, n);
    g.connected.resize(n, n);
    g.weight.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double h = stream_distance(net, sites[i], sites[j]);
            const bool c = flow_connected(net, sites[i], sites[j]);
            const double w = tailup_weight(net, sites[i], sites[j]);
            g.stream(i, j) = g.stream(j, i) = h;
            g.connected(i, j) = g.connected(j, i) = c;
            g.weight(i, j) = g.weight(j, i) = w;
        }
    }
    return g;
}

Eigen::MatrixXd build_sigma(const CovarianceSpec& spec, const SpatialParams& p, const SiteGeometry& geom) {
    if (spec.components.empty()) throw CovarianceError("covariance spec has no active component");
    const Eigen::Index n = geom.size();
    if (geom.euclidean.cols() != n) throw CovarianceError("geometry matrices are not square");
    if (spec.needs_network()) {
        if (!geom.on_network()) throw CovarianceError("stream components need network geometry");
        if (geom.stream.rows() != n || geom.weight.rows() != n || geom.connected.rows() != n) {
            throw CovarianceError("stream geometry does not match the number of sites");
        }
    }
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
    for (Component c : spec.components) {
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = j; i < n; ++i) {
                double v = 0.0;
                switch (c) {
                    case Component::euclidean_exponential:
                        v = kernel_euclidean(geom.euclidean(i, j), p.sigma2_e, p.rho_e, EuclideanFamily::exponential);
                        break;
                    case Component::euclidean_gaussian:
                        v = kernel_euclidean(geom.euclidean(i, j), p.sigma2_e, p.rho_e, EuclideanFamily::gaussian);
                        break;
                    case Component::euclidean_spherical:
                        v = kernel_euclidean(geom.euclidean(i, j), p.sigma2_e, p.rho_e, EuclideanFamily::spherical);
                        break;
                    case Component::tail_up:
                        v = kernel_tailup(geom.stream(i, j), geom.connected(i, j), geom.weight(i, j), p.sigma2_u,
                                          p.alpha_u);
                        break;
                    case Component::tail_down:
                        v = kernel_taildown(geom.stream(i, j), p.sigma2_d, p.alpha_d);
                        break;
                }
                sigma(i, j) += v;
                if (i != j) sigma(j, i) += v;
            }
        }
    }
    return sigma;
}

void Distribution::validate(const std::string& name) const {
    const bool finite = std::isfinite(a) && std::isfinite(b);
    switch (kind) {
        case Kind::point:
            if (!std::isfinite(a)) throw CovarianceError("prior '" + name + "': point mass must be finite");
            break;
        case Kind::uniform:
            if (!finite || !(a <= b)) throw CovarianceError("prior '" + name + "': uniform bounds must be finite and ordered");
            break;
        case Kind::gamma:
            if (!finite || !(a > 0.0) || !(b > 0.0)) {
                throw CovarianceError("prior '" + name + "': gamma shape and rate must be positive");
            }
            break;
    }
}

double Distribution::sample(Rng& rng) const {
    double x = a;
    switch (kind) {
        case Kind::point:
            break;
        case Kind::uniform:
            x = a + (b - a) * uniform01(rng);
            break;
        case Kind::gamma:
            x = std::gamma_distribution<double>(a, 1.0 / b)(rng);
            break;
    }
    return reciprocal ? 1.0 / x : x;
}

const std::vector<std::string>& prior_parameter_names() {
    static const std::vector<std::string> names{"sigma2_e", "rho_e",    "sigma2_u", "alpha_u",
                                                "sigma2_d", "alpha_d", "sigma2_0", "phi"};
    return names;
}

void PriorSpec::validate() const {
    const auto& names = prior_parameter_names();
    for (const auto& [name, dist] : params) {
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            throw CovarianceError("unknown prior parameter '" + name + "'");
        }
        dist.validate(name);
    }
}

ModelParams draw_params(const PriorSpec& prior, Rng& rng) {
    ModelParams m;
    auto draw = [&](const char* name, double& target) {
        auto it = prior.params.find(name);
        if (it != prior.params.end()) target = it->second.sample(rng);
    };
    draw("sigma2_e", m.spatial.sigma2_e);
    draw("rho_e", m.spatial.rho_e);
    draw("sigma2_u", m.spatial.sigma2_u);
    draw("alpha_u", m.spatial.alpha_u);
    draw("sigma2_d", m.spatial.sigma2_d);
    draw("alpha_d", m.spatial.alpha_d);
    draw("sigma2_0", m.spatial.sigma2_0);
    draw("phi", m.phi);
    m.beta = prior.beta;
    return m;
}

ModelParams draw_params(const PriorSpec& prior, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return draw_params(prior, rng);
}

MvnSampler::MvnSampler(const Eigen::MatrixXd& covariance) {
    if (covariance.size() == 0) return;
    if (covariance.isZero(0.0)) {
        lower_ = Eigen::MatrixXd::Zero(covariance.rows(), covariance.cols());
        return;
    }
    lower_ = factorize_spd(covariance).matrixL();
}

MvnSampler MvnSampler::from_lower(Eigen::MatrixXd lower) {
    if (lower.rows() != lower.cols()) throw CovarianceError("Cholesky factor must be square");
    MvnSampler s;
    s.lower_ = std::move(lower);
    return s;
}

void MvnSampler::draw_into(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(lower_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    out.noalias() = lower_.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd MvnSampler::draw(Rng& rng) const {
    Eigen::VectorXd out(lower_.rows());
    draw_into(rng, out);
    return out;
}

namespace {

Eigen::VectorXd mean_block(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta, Eigen::Index row0,
                           Eigen::Index rows) {
    if (beta.size() == 0) return Eigen::VectorXd::Zero(rows);
    if (X.cols() != beta.size() || X.rows() < row0 + rows) {
        throw CovarianceError("design matrix X does not match beta / site count");
    }
    return X.middleRows(row0, rows) * beta;
}

}  // namespace

Eigen::VectorXd simulate_spatial(const ModelParams& params, const Eigen::MatrixXd& sigma, double tau2,
                                 std::uint64_t seed, const Eigen::MatrixXd& X) {
    if (sigma.rows() != sigma.cols()) throw CovarianceError("sigma must be square");
    if (tau2 < 0.0) throw CovarianceError("tau2 must be nonnegative");
    Eigen::MatrixXd cov = sigma;
    cov.diagonal().array() += tau2;
    MvnSampler sampler(cov);
    Rng rng = make_rng(seed);
    Eigen::VectorXd y = sampler.draw(rng);
    y += mean_block(X, params.beta, 0, sigma.rows());
    return y;
}

Eigen::MatrixXd simulate_spatiotemporal(const ModelParams& params, const MvnSampler& innovation, int T,
                                        const Eigen::MatrixXd& X, Rng& rng) {
    if (T < 1) throw CovarianceError("T must be positive");
    if (!(std::abs(params.phi) < 1.0)) throw CovarianceError("|phi| must be < 1");
    const Eigen::Index S = innovation.dim();
    Eigen::MatrixXd y(S, T);
    Eigen::VectorXd eps(S);
    Eigen::VectorXd prev_mean = mean_block(X, params.beta, 0, S);
    innovation.draw_into(rng, eps);
    y.col(0) = prev_mean + eps;
    for (int t = 1; t < T; ++t) {
        Eigen::VectorXd m = mean_block(X, params.beta, static_cast<Eigen::Index>(t) * S, S);
        innovation.draw_into(rng, eps);
        y.col(t) = m + params.phi * (y.col(t - 1) - prev_mean) + eps;
        prev_mean = std::move(m);
    }
    return y;
}

Eigen::MatrixXd simulate_spatiotemporal(const ModelParams& params, const Eigen::MatrixXd& sigma, int T,
                                        const Eigen::MatrixXd& X, std::uint64_t seed) {
    if (sigma.rows() != sigma.cols()) throw CovarianceError("sigma must be square");
    Eigen::MatrixXd cov = sigma;
    cov.diagonal().array() += params.spatial.sigma2_0;
    MvnSampler innovation(cov);
    Rng rng = make_rng(seed);
    return simulate_spatiotemporal(params, innovation, T, X, rng);
}

}  // namespace boed
