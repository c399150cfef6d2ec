#pragma once

#include "boed/linalg.hpp"
#include "boed/network.hpp"
#include "boed/rng.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace boed {

class CovarianceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class EuclideanFamily { exponential, gaussian, spherical };

/// Euclidean covariance at lag h. Throws CovarianceError for range <= 0.
double kernel_euclidean(double h, double sigma2, double range, EuclideanFamily family);

/// Exponential tail-up covariance; zero for flow-unconnected pairs.
double kernel_tailup(double h, bool connected, double weight, double sigma2, double range);

/// Exponential tail-down covariance; defined for every pair.
double kernel_taildown(double h, double sigma2, double range);

/// Spatial covariance parameters. Ranges only matter for active components.
struct SpatialParams {
    double sigma2_e = 0.0;
    double rho_e = 1.0;
    double sigma2_u = 0.0;
    double alpha_u = 1.0;
    double sigma2_d = 0.0;
    double alpha_d = 1.0;
    double sigma2_0 = 0.0;
};

/// One prior draw: spatial parameters, regression coefficients and AR(1) coefficient.
struct ModelParams {
    SpatialParams spatial;
    Eigen::VectorXd beta;
    double phi = 0.0;
};

enum class Component { euclidean_exponential, euclidean_gaussian, euclidean_spherical, tail_up, tail_down };

struct CovarianceSpec {
    std::vector<Component> components;
    bool nugget = true;

    bool has(Component c) const;
    bool needs_network() const { return has(Component::tail_up) || has(Component::tail_down); }
    bool needs_euclidean() const;
};

Component parse_component(const std::string& name);
std::string component_name(Component c);

/**
 * Pairwise geometry of a site set. Euclidean distances are always present;
 * stream distances, flow connectivity and tail-up weights are filled only for
 * sites on a network.
 */
struct SiteGeometry {
    Eigen::MatrixXd euclidean;
    Eigen::MatrixXd stream;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> connected;
    Eigen::MatrixXd weight;

    Eigen::Index size() const { return euclidean.rows(); }
    bool on_network() const { return stream.size() > 0; }
};

SiteGeometry geometry_from_points(const std::vector<Point2>& points);
SiteGeometry geometry_from_network(const RiverNetwork& net, const std::vector<NetworkLocation>& sites);

/// Sigma = C_Euc + W o C_TU + C_TD over the sites (nugget excluded).
Eigen::MatrixXd build_sigma(const CovarianceSpec& spec, const SpatialParams& params, const SiteGeometry& geom);

/// A scalar prior: point mass, Uniform(a, b), or Gamma(shape a, rate b).
/// With `reciprocal` set the sample is 1/X (e.g. a Gamma prior on a precision).
struct Distribution {
    enum class Kind { point, uniform, gamma };
    Kind kind = Kind::point;
    double a = 0.0;
    double b = 0.0;
    bool reciprocal = false;

    static Distribution point(double v) { return {Kind::point, v, 0.0, false}; }
    static Distribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi, false}; }
    static Distribution gamma(double shape, double rate) { return {Kind::gamma, shape, rate, false}; }
    static Distribution inverse_gamma(double shape, double rate) { return {Kind::gamma, shape, rate, true}; }

    void validate(const std::string& name) const;
    double sample(Rng& rng) const;
};

/**
 * Prior over ModelParams. Keys are parameter names: sigma2_e, rho_e,
 * sigma2_u, alpha_u, sigma2_d, alpha_d, sigma2_0, phi. Missing keys keep the
 * ModelParams defaults. beta is a point mass.
 */
struct PriorSpec {
    std::map<std::string, Distribution> params;
    Eigen::VectorXd beta;

    void validate() const;
};

/// Parameter names in the order they are drawn.
const std::vector<std::string>& prior_parameter_names();

ModelParams draw_params(const PriorSpec& prior, Rng& rng);
ModelParams draw_params(const PriorSpec& prior, std::uint64_t seed);

/// Multivariate normal sampler holding a Cholesky factor for repeated draws.
class MvnSampler {
public:
    explicit MvnSampler(const Eigen::MatrixXd& covariance);
    /// Wrap an existing lower Cholesky factor.
    static MvnSampler from_lower(Eigen::MatrixXd lower);
    Eigen::VectorXd draw(Rng& rng) const;
    /// Fill `out` with L z for standard normal z drawn from rng.
    void draw_into(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) const;
    Eigen::Index dim() const { return lower_.rows(); }
    const Eigen::MatrixXd& lower() const { return lower_; }

private:
    MvnSampler() = default;
    Eigen::MatrixXd lower_;
};

/// y ~ N(X beta, sigma + tau2 I). X may be empty (zero mean) when beta is empty.
Eigen::VectorXd simulate_spatial(const ModelParams& params, const Eigen::MatrixXd& sigma, double tau2,
                                 std::uint64_t seed, const Eigen::MatrixXd& X = {});

/**
 * Dynamical spatio-temporal model, returned as an S x T matrix (column t is
 * time t). y_1 ~ N(X_1 beta, Sigma + sigma2_0 I); y_t ~ N(mu_t, Sigma +
 * sigma2_0 I) with mu_t = X_t beta + phi (y_{t-1} - X_{t-1} beta). X is
 * (S*T) x p stacked time-major (row t*S + s); it may be empty when beta is.
 */
Eigen::MatrixXd simulate_spatiotemporal(const ModelParams& params, const Eigen::MatrixXd& sigma, int T,
                                        const Eigen::MatrixXd& X, std::uint64_t seed);
Eigen::MatrixXd simulate_spatiotemporal(const ModelParams& params, const MvnSampler& innovation, int T,
                                        const Eigen::MatrixXd& X, Rng& rng);

}  // namespace boed
