#include "boed/covariance.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace boed;

TEST(Kernels, UnitValues) {
    for (auto f : {EuclideanFamily::exponential, EuclideanFamily::gaussian, EuclideanFamily::spherical}) {
        EXPECT_DOUBLE_EQ(kernel_euclidean(0.0, 2.5, 1.3, f), 2.5);
    }
    EXPECT_NEAR(kernel_euclidean(1.7, 1.0, 1.7, EuclideanFamily::exponential), std::exp(-3.0), 1e-15);
    EXPECT_NEAR(kernel_euclidean(1.7, 1.0, 1.7, EuclideanFamily::gaussian), std::exp(-3.0), 1e-15);
    EXPECT_DOUBLE_EQ(kernel_euclidean(2.0, 1.0, 1.0, EuclideanFamily::spherical), 0.0);
    EXPECT_NEAR(kernel_euclidean(0.5, 1.0, 1.0, EuclideanFamily::spherical), 1.0 - 0.75 + 0.0625, 1e-15);

    EXPECT_DOUBLE_EQ(kernel_tailup(0.0, true, 1.0, 1.2, 2.0), 1.2);
    EXPECT_DOUBLE_EQ(kernel_tailup(0.3, false, 1.0, 1.2, 2.0), 0.0);
    EXPECT_NEAR(kernel_tailup(2.2, true, 0.5, 1.0, 2.2), 0.5 * std::exp(-3.0), 1e-15);

    EXPECT_DOUBLE_EQ(kernel_taildown(0.0, 0.8, 2.0), 0.8);
    EXPECT_NEAR(kernel_taildown(2.0, 1.0, 2.0), std::exp(-3.0), 1e-15);
    double prev = kernel_taildown(0.0, 1.0, 1.0);
    for (double h = 0.5; h < 50.0; h += 0.5) {
        const double v = kernel_taildown(h, 1.0, 1.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_LT(prev, 1e-60);
}

TEST(Kernels, RejectNonPositiveRange) {
    EXPECT_THROW(kernel_euclidean(1.0, 1.0, 0.0, EuclideanFamily::exponential), CovarianceError);
    EXPECT_THROW(kernel_tailup(1.0, true, 1.0, 1.0, -1.0), CovarianceError);
    EXPECT_THROW(kernel_taildown(1.0, 1.0, 0.0), CovarianceError);
}

TEST(Components, NamesRoundTrip) {
    for (auto c : {Component::euclidean_exponential, Component::euclidean_gaussian, Component::euclidean_spherical,
                   Component::tail_up, Component::tail_down}) {
        EXPECT_EQ(parse_component(component_name(c)), c);
    }
    EXPECT_THROW(parse_component("matern"), CovarianceError);
}

namespace {

RiverNetwork y_network() {
    return RiverNetwork({{0, 0, 1, 1.0, 2.0}, {1, 1, 2, 1.0, 1.0}, {2, 1, 3, 2.0, 1.0}}, 0);
}

}  // namespace

TEST(BuildSigma, SingleSite) {
    CovarianceSpec spec{{Component::euclidean_exponential}};
    SpatialParams p;
    p.sigma2_e = 1.7;
    p.rho_e = 1.2;
    const Eigen::MatrixXd s = build_sigma(spec, p, geometry_from_points({{0.3, 0.4}}));
    ASSERT_EQ(s.rows(), 1);
    EXPECT_DOUBLE_EQ(s(0, 0), 1.7);
}

TEST(BuildSigma, TailUpUnconnectedZero) {
    const RiverNetwork net = y_network();
    CovarianceSpec spec{{Component::tail_up}};
    SpatialParams p;
    p.sigma2_u = 1.3;
    p.alpha_u = 2.0;
    const Eigen::MatrixXd s = build_sigma(spec, p, geometry_from_network(net, {{1, 0.5}, {2, 0.5}}));
    EXPECT_DOUBLE_EQ(s(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(s(0, 0), 1.3);
}

TEST(BuildSigma, YNetworkHandComputation) {
    const RiverNetwork net = y_network();
    CovarianceSpec spec{{Component::tail_up, Component::tail_down}};
    SpatialParams p;
    p.sigma2_u = 1.5;
    p.alpha_u = 2.0;
    p.sigma2_d = 0.5;
    p.alpha_d = 3.0;
    // a on tributary 1, b on tributary 2, c on the stem.
    const std::vector<NetworkLocation> sites = {{1, 0.5}, {2, 1.0}, {0, 0.25}};
    const Eigen::MatrixXd s = build_sigma(spec, p, geometry_from_network(net, sites));
    // a-b: unconnected, stream distance 1.5 + 2.0 - 2 * 1.0 = 1.5.
    EXPECT_NEAR(s(0, 1), 0.5 * std::exp(-3.0 * 1.5 / 3.0), 1e-14);
    // a-c: connected, distance 1.25, weight sqrt(1/2).
    EXPECT_NEAR(s(0, 2), std::sqrt(0.5) * 1.5 * std::exp(-3.0 * 1.25 / 2.0) + 0.5 * std::exp(-3.0 * 1.25 / 3.0),
                1e-14);
    // b-c: connected, distance 1.75.
    EXPECT_NEAR(s(1, 2), std::sqrt(0.5) * 1.5 * std::exp(-3.0 * 1.75 / 2.0) + 0.5 * std::exp(-3.0 * 1.75 / 3.0),
                1e-14);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(s(i, i), 2.0);
    EXPECT_TRUE(s.isApprox(s.transpose(), 0.0));
}

TEST(Priors, PointMassAndUniformMoments) {
    PriorSpec prior;
    prior.params["sigma2_e"] = Distribution::point(2.0);
    prior.params["rho_e"] = Distribution::uniform(1.0, 1.5);
    Rng rng = make_rng(42);
    double sum = 0.0;
    const int N = 10000;
    for (int i = 0; i < N; ++i) {
        const ModelParams m = draw_params(prior, rng);
        EXPECT_EQ(m.spatial.sigma2_e, 2.0);
        EXPECT_GE(m.spatial.rho_e, 1.0);
        EXPECT_LE(m.spatial.rho_e, 1.5);
        sum += m.spatial.rho_e;
    }
    EXPECT_NEAR(sum / N, 1.25, 0.01);
}

TEST(Priors, InverseGammaPrecisionMean) {
    // Precision ~ Gamma(shape 3/2, rate 1/2) has mean 3.
    PriorSpec prior;
    prior.params["sigma2_e"] = Distribution::inverse_gamma(1.5, 0.5);
    Rng rng = make_rng(7);
    double sum = 0.0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) sum += 1.0 / draw_params(prior, rng).spatial.sigma2_e;
    EXPECT_NEAR(sum / N, 3.0, 0.05);
}

TEST(Priors, RejectUnknownOrInvalid) {
    PriorSpec prior;
    prior.params["kappa"] = Distribution::point(1.0);
    EXPECT_THROW(prior.validate(), CovarianceError);
    PriorSpec bad;
    bad.params["rho_e"] = Distribution::uniform(2.0, 1.0);
    EXPECT_THROW(bad.validate(), CovarianceError);
}

TEST(Simulation, ZeroCovarianceGivesZero) {
    const Eigen::VectorXd y = simulate_spatial(ModelParams{}, Eigen::MatrixXd::Zero(4, 4), 0.0, 3);
    EXPECT_TRUE(y.isZero(0.0));
}

TEST(Simulation, Deterministic) {
    const Eigen::MatrixXd sigma = build_sigma({{Component::euclidean_exponential}}, {1.0, 0.5},
                                              geometry_from_points({{0, 0}, {0.2, 0.1}, {0.9, 0.4}}));
    EXPECT_EQ(simulate_spatial(ModelParams{}, sigma, 1e-4, 9), simulate_spatial(ModelParams{}, sigma, 1e-4, 9));
    ModelParams p;
    p.phi = 0.6;
    EXPECT_EQ(simulate_spatiotemporal(p, sigma, 5, {}, 4), simulate_spatiotemporal(p, sigma, 5, {}, 4));
}

TEST(Simulation, SpatialCovarianceMonteCarlo) {
    const Eigen::MatrixXd sigma = build_sigma({{Component::euclidean_exponential}}, {1.0, 0.8},
                                              geometry_from_points({{0, 0}, {0.3, 0.0}, {0.0, 0.6}}));
    const int N = 40000;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < N; ++i) {
        const Eigen::VectorXd y = simulate_spatial(ModelParams{}, sigma, 0.1, derive_seed(5, 0, i));
        acc += y * y.transpose();
    }
    acc /= N;
    Eigen::MatrixXd expected = sigma;
    expected.diagonal().array() += 0.1;
    EXPECT_LT((acc - expected).cwiseAbs().maxCoeff(), 0.04);
}

TEST(Simulation, IndependentColumnsWhenPhiZero) {
    const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
    ModelParams p;
    const int N = 20000;
    double lag = 0.0;
    for (int i = 0; i < N; ++i) {
        const Eigen::MatrixXd y = simulate_spatiotemporal(p, sigma, 2, {}, derive_seed(8, 0, i));
        lag += y(0, 0) * y(0, 1);
    }
    EXPECT_NEAR(lag / N, 0.0, 0.05);
}

TEST(Simulation, RejectsExplosivePhi) {
    ModelParams p;
    p.phi = 1.0;
    EXPECT_THROW(simulate_spatiotemporal(p, Eigen::MatrixXd::Identity(2, 2), 3, {}, 1), CovarianceError);
}
