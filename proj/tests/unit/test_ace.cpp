#include "boed/ace.hpp"
#include "boed/emulator.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace boed;

namespace {

// Separable concave objective with a known maximizer.
Eigen::MatrixXd optimum(int n, int k) {
    Eigen::MatrixXd c(n, k);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) c(i, j) = 0.15 + 0.7 * ((i * k + j) % 5) / 4.0;
    }
    return c;
}

UtilityFunction separable(const Eigen::MatrixXd& c) {
    return [c](const Design& d, int, std::uint64_t) {
        return Evaluation{-(d.coords - c).squaredNorm(), 0.0};
    };
}

}  // namespace

TEST(Emulator, ReproducesTrainingValues) {
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(15, 0.0, 1.0);
    Eigen::VectorXd y = (6.0 * x.array()).sin();
    const EmulatorFit fit = fit_emulator(x, y);
    ASSERT_TRUE(fit.ok);
    const double tol = 3.0 * std::sqrt(fit.noise) * fit.y_scale + 1e-6;
    for (int q = 0; q < x.size(); ++q) EXPECT_NEAR(fit.predict(x(q)), y(q), tol);
    EXPECT_GT(fit.length_scale, 0.0);
}

TEST(Emulator, ConstantOutputsAreFlat) {
    const EmulatorFit fit = fit_emulator(Eigen::VectorXd::LinSpaced(6, 0, 1), Eigen::VectorXd::Constant(6, 2.0));
    EXPECT_TRUE(fit.ok);
    EXPECT_FALSE(fit.informative);
    EXPECT_EQ(fit.predict(0.3), 2.0);
}

TEST(EmulateCoordinate, QuadraticPeakAtMidpoint) {
    const DesignSpace space = DesignSpace::planar(1, {{2.0, 6.0}, {0.0, 1.0}});
    Design d;
    d.coords = Eigen::RowVector2d(2.3, 0.5);
    const UtilityFunction f = [](const Design& x, int, std::uint64_t) {
        const double v = x.coords(0, 0) - 4.0;
        return Evaluation{-v * v, 0.0};
    };
    const CoordinateProposal p = emulate_coordinate(d, 0, 0, space, f, 20, 1, 3);
    EXPECT_NEAR(p.value, 4.0, 0.02 * 4.0);
    EXPECT_FALSE(p.fallback);
    EXPECT_EQ(p.value, emulate_coordinate(d, 0, 0, space, f, 20, 1, 3).value);
}

TEST(EmulateCoordinate, FlatUtilityKeepsCurrent) {
    const DesignSpace space = DesignSpace::planar(1, {{0.0, 1.0}, {0.0, 1.0}});
    Design d;
    d.coords = Eigen::RowVector2d(0.37, 0.5);
    const UtilityFunction f = [](const Design&, int, std::uint64_t) { return Evaluation{1.5, 0.0}; };
    EXPECT_EQ(emulate_coordinate(d, 0, 0, space, f, 8, 1, 3).value, 0.37);
}

TEST(EmulateCoordinate, NoisyEvaluationsUseCommonSeed) {
    const DesignSpace space = DesignSpace::planar(1, {{0.0, 1.0}});
    Design d;
    d.coords = Eigen::MatrixXd::Constant(1, 1, 0.1);
    std::vector<std::uint64_t> seeds;
    const UtilityFunction f = [&](const Design& x, int, std::uint64_t s) {
        seeds.push_back(s);
        return Evaluation{-std::pow(x.coords(0, 0) - 0.7, 2) + 1e-3 * static_cast<double>(s % 7), 0.0};
    };
    emulate_coordinate(d, 0, 0, space, f, 10, 1, 42);
    ASSERT_EQ(seeds.size(), 10u);
    for (auto s : seeds) EXPECT_EQ(s, seeds.front());
}

TEST(Acceptance, ProbabilityCases) {
    EXPECT_DOUBLE_EQ(acceptance_probability({1.0, 0.1}, {1.0, 0.1}), 0.5);
    const double se = 0.1;
    const double sep = 10.0 * std::sqrt(2.0) * se;
    EXPECT_GT(acceptance_probability({1.0, se}, {1.0 + sep, se}), 0.999);
    EXPECT_LT(acceptance_probability({1.0 + sep, se}, {1.0, se}), 0.001);
    EXPECT_EQ(acceptance_probability({1.0, 0.0}, {2.0, 0.0}), 1.0);
    EXPECT_EQ(acceptance_probability({2.0, 0.0}, {1.0, 0.0}), 0.0);
    EXPECT_NEAR(acceptance_probability({0.0, 0.3}, {0.3, 0.4}), 0.5 * std::erfc(-0.3 / (0.5 * std::sqrt(2.0))), 1e-15);
}

TEST(Acceptance, IdenticalDesignsFairCoin) {
    Design d;
    d.coords = Eigen::MatrixXd::Constant(1, 1, 0.5);
    const UtilityFunction f = [](const Design&, int, std::uint64_t s) {
        return Evaluation{static_cast<double>(s % 1000) / 1000.0, 0.05};
    };
    int accepted = 0;
    for (std::uint64_t s = 0; s < 4000; ++s) {
        const AcceptanceResult r = acceptance_test(d, d, f, 50, s);
        EXPECT_DOUBLE_EQ(r.p_star, 0.5);
        accepted += r.accepted;
    }
    EXPECT_NEAR(accepted / 4000.0, 0.5, 0.03);
}

TEST(Optimize, SeparableStubConvergesWithinThreeSweeps) {
    const Eigen::MatrixXd c = optimum(4, 2);
    const DesignSpace space = DesignSpace::planar(4, {{0.0, 1.0}, {0.0, 1.0}});
    AceOptions o;
    o.N1 = 3;
    o.K = 1;
    o.Q = 20;
    o.B1 = 1;
    o.B2 = 1;
    const AceResult r = optimize(space, separable(c), o, 11);
    EXPECT_LT((r.best.coords - c).cwiseAbs().maxCoeff(), 0.02);
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& row : r.starts[0].trace) {
        if (std::isnan(row.utility)) continue;
        EXPECT_GE(row.utility, prev);
        prev = row.utility;
    }
    EXPECT_LE(r.starts[0].trace.size(), static_cast<std::size_t>(o.N1 * 4 * 2));
}

TEST(Optimize, ZeroSweepsReturnsBestStart) {
    const Eigen::MatrixXd c = optimum(3, 2);
    const DesignSpace space = DesignSpace::planar(3, {{0.0, 1.0}, {0.0, 1.0}});
    AceOptions o;
    o.N1 = 0;
    o.K = 4;
    o.B1 = 1;
    o.B2 = 1;
    const UtilityFunction f = separable(c);
    const AceResult r = optimize(space, f, o, 5);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : r.starts) {
        EXPECT_EQ(s.final_design, s.initial);
        best = std::max(best, f(s.initial, 1, 0).value);
    }
    EXPECT_EQ(r.best_evaluation.value, best);
}

TEST(Optimize, StartAtOptimumWins) {
    const Eigen::MatrixXd c = optimum(3, 2);
    const DesignSpace space = DesignSpace::planar(3, {{0.0, 1.0}, {0.0, 1.0}});
    AceOptions o;
    o.N1 = 0;
    o.K = 2;
    o.B1 = 1;
    o.B2 = 1;
    Design at;
    at.coords = c;
    o.initial_designs = {Design{}, at};
    o.initial_designs[0].coords = Eigen::MatrixXd::Constant(3, 2, 0.01);
    const AceResult r = optimize(space, separable(c), o, 5);
    EXPECT_EQ(r.best_start, 1);
    EXPECT_EQ(r.best, at);
}

TEST(Optimize, NetworkDesignsStayOnAssignedPaths) {
    std::vector<NetworkPath> paths = {{{1, 0}, 2.0}, {{2, 0}, 3.5}, {{3, 0}, 1.0}};
    const DesignSpace space = DesignSpace::network(4, paths);
    // Reward distance upstream, so coordinates push toward their path ends.
    const UtilityFunction f = [](const Design& d, int, std::uint64_t) {
        return Evaluation{d.coords.sum(), 0.0};
    };
    AceOptions o;
    o.N1 = 2;
    o.K = 2;
    o.Q = 8;
    o.B1 = 1;
    o.B2 = 1;
    o.grid = 200;
    const AceResult r = optimize(space, f, o, 3);
    for (const auto& s : r.starts) {
        EXPECT_EQ(s.final_design.path, s.initial.path);
        EXPECT_TRUE(space.contains(s.final_design));
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(s.final_design.coords(i, 0), paths[s.final_design.path[i]].length, 0.02 * 3.5);
        }
    }
}

TEST(Optimize, FailedStartIsIsolated) {
    const DesignSpace space = DesignSpace::planar(1, {{0.0, 1.0}});
    const UtilityFunction f = [](const Design& d, int, std::uint64_t) {
        if (d.coords(0, 0) == 0.2) throw std::runtime_error("bad design");
        return Evaluation{-std::pow(d.coords(0, 0) - 0.6, 2), 0.0};
    };
    AceOptions o;
    o.N1 = 1;
    o.K = 2;
    o.Q = 5;
    o.B1 = 1;
    o.B2 = 1;
    o.initial_designs = {Design{Eigen::MatrixXd::Constant(1, 1, 0.2), {}},
                         Design{Eigen::MatrixXd::Constant(1, 1, 0.8), {}}};
    const AceResult r = optimize(space, f, o, 1);
    EXPECT_TRUE(r.starts[0].failed);
    EXPECT_FALSE(r.starts[1].failed);
    EXPECT_EQ(r.best_start, 1);
}

TEST(Trace, CsvFormat) {
    AceResult r;
    r.starts.resize(1);
    TraceRow row;
    row.proposal = 0.5;
    row.p_star = std::numeric_limits<double>::quiet_NaN();
    row.utility = 2.0;
    r.starts[0].trace.push_back(row);
    std::ostringstream out;
    write_trace_csv(out, r);
    EXPECT_EQ(out.str(), "start,sweep,coordinate,proposal,p_star,accepted,utility\n0,0,0,0.5,NA,0,2\n");
}
