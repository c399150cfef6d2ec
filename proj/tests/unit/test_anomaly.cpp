#include "boed/anomaly.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace boed;

TEST(Mask, TrivialCases) {
    EXPECT_EQ(generate_mask({0.0, 1.25, 5.0, 1.0}, 50, 14, 3).count(), 0);
    const AnomalyMask all = generate_mask({1.0, 0.0, 5.0, 1.0}, 1, 9, 3);
    EXPECT_EQ(all.count(), 9);
    const AnomalyMask single = generate_mask({1.0, 3.0, 5.0, 1.0}, 1, 4, 3);
    EXPECT_EQ(single.rows(), 1);
    EXPECT_EQ(single.count(), 4);
}

TEST(Mask, DeterministicAndNestedInFrequency) {
    const AnomalyGenParams lo{0.01, 1.25, 5.0, 1.0};
    const AnomalyGenParams hi{0.05, 1.25, 5.0, 1.0};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const AnomalyMask a = generate_mask(lo, 30, 8, seed);
        EXPECT_EQ(a, generate_mask(lo, 30, 8, seed));
        const AnomalyMask b = generate_mask(hi, 30, 8, seed);
        EXPECT_TRUE(((a.array() == 1) <= (b.array() == 1)).all());
    }
}

TEST(Mask, RunsFollowPoissonLengths) {
    // With T large, the mean run length of isolated runs is about 1 + lambda.
    const AnomalyGenParams p{0.002, 2.0, 5.0, 1.0};
    long long ones = 0;
    long long onsets = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        const AnomalyMask m = generate_mask(p, 400, 5, seed);
        for (int i = 0; i < 5; ++i) {
            for (int t = 0; t < 400; ++t) {
                if (m(t, i)) {
                    ++ones;
                    if (t == 0 || !m(t - 1, i)) ++onsets;
                }
            }
        }
    }
    EXPECT_NEAR(static_cast<double>(ones) / onsets, 3.0, 0.15);
}

TEST(Mask, SingleEntryOnsetFrequency) {
    const AnomalyGenParams p{0.1, 0.0, 5.0, 1.0};
    long long total = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) total += generate_mask(p, 1, 6, seed).count();
    EXPECT_NEAR(total / 12000.0, 0.1, 0.01);
}

TEST(Mask, RejectsInvalidParameters) {
    EXPECT_THROW(generate_mask({1.5, 0.0, 0.0, 1.0}, 1, 1, 0), AnomalyError);
    EXPECT_THROW(generate_mask({0.1, -1.0, 0.0, 1.0}, 1, 1, 0), AnomalyError);
    EXPECT_THROW(generate_mask({0.1, 1.0, 0.0, 1.0}, 0, 1, 0), AnomalyError);
}

TEST(Contaminate, UnmaskedEntriesBitExact) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Random(20, 6);
    const AnomalyGenParams p{0.1, 1.0, 5.0, std::sqrt(10.0)};
    const AnomalyMask m = generate_mask(p, 20, 6, 4);
    const Eigen::MatrixXd z = contaminate(y, m, p, 4);
    for (int t = 0; t < 20; ++t) {
        for (int i = 0; i < 6; ++i) {
            if (!m(t, i)) {
                EXPECT_EQ(z(t, i), y(t, i));
            } else {
                EXPECT_NE(z(t, i), y(t, i));
            }
        }
    }
    EXPECT_EQ(contaminate(y, AnomalyMask::Zero(20, 6), p, 1), y);
}

TEST(Contaminate, DegenerateNoiseShiftsByMean) {
    const Eigen::MatrixXd y = Eigen::MatrixXd::Random(3, 4);
    const Eigen::MatrixXd z = contaminate(y, AnomalyMask::Ones(3, 4), {1.0, 0.0, 5.0, 0.0}, 2);
    EXPECT_TRUE((z - y).isApprox(Eigen::MatrixXd::Constant(3, 4, 5.0)));
}

TEST(Contaminate, ResidualMoments) {
    const AnomalyGenParams p{1.0, 0.0, 5.0, std::sqrt(10.0)};
    const Eigen::MatrixXd y = Eigen::MatrixXd::Zero(1, 100);
    double s = 0.0;
    double ss = 0.0;
    const int N = 100000;
    for (int rep = 0; rep < 1000; ++rep) {
        const Eigen::MatrixXd z = contaminate(y, AnomalyMask::Ones(1, 100), p, rep);
        s += z.sum();
        ss += z.squaredNorm();
    }
    const double mean = s / N;
    const double var = ss / N - mean * mean;
    EXPECT_NEAR(mean, 5.0, 0.1);
    EXPECT_NEAR(var, 10.0, 0.2);
}

TEST(Contaminate, ShapeMismatch) {
    EXPECT_THROW(contaminate(Eigen::MatrixXd::Zero(2, 3), AnomalyMask::Zero(3, 2), {}, 0), AnomalyError);
}

namespace {

const std::vector<Point2> kSquare = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};

}  // namespace

TEST(SpatialKnn, EqualValuesNotFlagged) {
    const Eigen::MatrixXd train = Eigen::MatrixXd::Random(50, 4);
    const AnomalyMask f = detect_spatial_knn(Eigen::VectorXd::Constant(4, 2.0), kSquare, train, 3);
    EXPECT_EQ(f.count(), 0);
}

TEST(SpatialKnn, DisplacedSensorFlagged) {
    Eigen::MatrixXd train(2, 4);
    train << 0, 0, 0, 0, 1, 1, 1, 1;  // sd = sqrt(0.5) in every column
    const double sd = std::sqrt(0.5);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
    y(3) = 10.0 * sd;
    const AnomalyMask f = detect_spatial_knn(y, kSquare, train, 2);
    EXPECT_EQ(f(0, 3), 1);
    EXPECT_EQ(f(0, 0), 0);
}

TEST(SpatialKnn, BoundaryIsFlagged) {
    const std::vector<std::vector<int>> nb = {{1}, {0}};
    const Eigen::Vector2d sd(1.0, 1.0);
    EXPECT_EQ(detect_spatial_knn(Eigen::Vector2d(3.0, 0.0), nb, sd)(0, 0), 1);
    EXPECT_EQ(detect_spatial_knn(Eigen::Vector2d(2.999, 0.0), nb, sd)(0, 0), 0);
}

TEST(SpatialKnn, NeighboursAreCoordinateNearest) {
    const std::vector<Point2> pts = {{0, 0}, {0.1, 0}, {5, 5}, {0, 0.2}};
    const auto nb = nearest_neighbours(pts, 2);
    EXPECT_EQ(nb[0], (std::vector<int>{1, 3}));
    EXPECT_EQ(nb[2], (std::vector<int>{3, 1}));
    EXPECT_THROW(nearest_neighbours(pts, 4), AnomalyError);
}

TEST(Score, TrivialAndBruteForce) {
    AnomalyMask t(2, 5);
    t << 1, 0, 1, 0, 0, 0, 0, 1, 1, 0;
    const ConfusionMatrix same = score(t, t);
    EXPECT_EQ(same.fp, 0);
    EXPECT_EQ(same.fn, 0);
    const ConfusionMatrix allpos = score(AnomalyMask::Zero(2, 5), AnomalyMask::Ones(2, 5));
    EXPECT_EQ(allpos, (ConfusionMatrix{0, 0, 10, 0}));

    Eigen::MatrixXd r1 = Eigen::MatrixXd::Random(6, 6);
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Random(6, 6);
    AnomalyMask a = (r1.array() > 0).cast<std::uint8_t>();
    AnomalyMask b = (r2.array() > 0.3).cast<std::uint8_t>();
    ConfusionMatrix brute;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            if (a(i, j) && b(i, j)) brute.tp++;
            if (!a(i, j) && !b(i, j)) brute.tn++;
            if (!a(i, j) && b(i, j)) brute.fp++;
            if (a(i, j) && !b(i, j)) brute.fn++;
        }
    }
    EXPECT_EQ(score(a, b), brute);
    EXPECT_EQ(score(a, b).total(), 36);
    EXPECT_THROW(score(a, AnomalyMask::Zero(5, 6)), AnomalyError);
}

TEST(Windows, ReduceAndExpand) {
    AnomalyMask m = AnomalyMask::Zero(7, 2);
    m(4, 1) = 1;
    m(6, 0) = 1;
    const AnomalyMask w = reduce_to_windows(m, 3);
    ASSERT_EQ(w.rows(), 3);
    EXPECT_EQ(w(1, 1), 1);
    EXPECT_EQ(w(2, 0), 1);
    EXPECT_EQ(w.count(), 2);
    const AnomalyMask e = expand_windows(w, 3, 7);
    EXPECT_EQ(e.count(), 4);
    EXPECT_EQ(e(3, 1), 1);
    EXPECT_EQ(reduce_to_windows(m, 7).count(), 2);
}

TEST(Metrics, PerfectClassifier) {
    const Metrics m = metrics({5, 5, 0, 0});
    EXPECT_EQ(m.mcc, 1.0);
    EXPECT_EQ(m.specificity, 1.0);
    EXPECT_EQ(m.sensitivity, 1.0);
    EXPECT_EQ(m.accuracy, 1.0);
}

TEST(Metrics, DegenerateSensitivity) {
    const Metrics m = metrics({0, 90, 10, 0});
    EXPECT_DOUBLE_EQ(m.specificity, 0.9);
    EXPECT_EQ(m.sensitivity, 0.0);
    EXPECT_FALSE(m.sensitivity_defined);
    EXPECT_TRUE(m.specificity_defined);
    EXPECT_FALSE(m.mcc_defined);
}

TEST(Metrics, HandMcc) {
    const Metrics m = metrics({3, 90, 4, 3});
    EXPECT_NEAR(m.mcc, 258.0 / std::sqrt(7.0 * 6.0 * 94.0 * 93.0), 1e-15);
    EXPECT_NEAR(m.mcc, 0.4258, 5e-5);
}

TEST(Metrics, LabelSwapNegatesMcc) {
    const Metrics a = metrics({12, 40, 7, 9});
    // Swapping predicted labels: TP<->FN, TN<->FP.
    const Metrics b = metrics({9, 7, 40, 12});
    EXPECT_NEAR(a.mcc, -b.mcc, 1e-15);
    EXPECT_NEAR(a.specificity + 7.0 / 47.0, 1.0, 1e-15);
}

TEST(Export, CsvHeaders) {
    std::ostringstream a;
    AnomalyMask m = AnomalyMask::Zero(1, 2);
    m(0, 1) = 1;
    write_mask_csv(a, m);
    EXPECT_EQ(a.str(), "time,sensor,flag\n0,0,0\n0,1,1\n");
    std::ostringstream b;
    write_confusion_csv(b, {1, 2, 3, 4});
    EXPECT_EQ(b.str(), "tp,tn,fp,fn\n1,2,3,4\n");
}
