#include <algorithm>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "rbon/kmeans.hpp"

using namespace rbon;

namespace {

Eigen::MatrixXd blobs(int per_blob, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.4);
    const double cx[3] = {0.0, 4.0, 0.0}, cy[3] = {0.0, 0.0, 4.0};
    Eigen::MatrixXd P(3 * per_blob, 2);
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < per_blob; ++i) {
            P(b * per_blob + i, 0) = cx[b] + n(rng);
            P(b * per_blob + i, 1) = cy[b] + n(rng);
        }
    return P;
}

double best_two_partition(const Eigen::MatrixXd& P)
{
    const int n = static_cast<int>(P.rows());
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << (n - 1)); ++mask) {
        Eigen::VectorXd s[2] = {Eigen::VectorXd::Zero(P.cols()), Eigen::VectorXd::Zero(P.cols())};
        int count[2] = {0, 0};
        for (int i = 0; i < n; ++i) {
            const int g = (mask >> i) & 1u;
            s[g] += P.row(i).transpose();
            ++count[g];
        }
        double w = 0.0;
        for (int i = 0; i < n; ++i) {
            const int g = (mask >> i) & 1u;
            w += (P.row(i).transpose() - s[g] / count[g]).squaredNorm();
        }
        best = std::min(best, w);
    }
    return best;
}

} // namespace

TEST(KMeans, WithinClusterSumHandValue)
{
    Eigen::MatrixXd P(4, 1);
    P << 0, 2, 10, 12;
    Eigen::MatrixXd C(2, 1);
    C << 1, 11;
    EXPECT_DOUBLE_EQ(within_cluster_ss(P, C, {0, 0, 1, 1}), 4.0);
}

TEST(KMeans, TwoObviousClusters)
{
    Eigen::MatrixXd P(6, 1);
    P << 0, 1, 2, 100, 101, 102;
    ClusterConfig cfg;
    cfg.k = 2;
    cfg.seed = 5;
    const ClusterResult r = kmeans(P, cfg);
    ASSERT_EQ(r.centers.rows(), 2);
    Eigen::VectorXd c = r.centers.col(0);
    std::sort(c.begin(), c.end());
    EXPECT_NEAR(c(0), 1.0, 1e-12);
    EXPECT_NEAR(c(1), 101.0, 1e-12);
    EXPECT_NEAR(r.wcss, 4.0, 1e-12);
}

TEST(KMeans, MatchesExhaustiveTwoPartitionOptimum)
{
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0.0, 1.0);
        Eigen::MatrixXd P(11, 2);
        for (Eigen::Index i = 0; i < P.rows(); ++i)
            P.row(i) << n(rng) + (i < 5 ? 3.0 : 0.0), n(rng);
        ClusterConfig cfg;
        cfg.k = 2;
        cfg.seed = seed;
        const ClusterResult r = kmeans(P, cfg);
        EXPECT_NEAR(r.wcss, best_two_partition(P), 1e-9) << "seed " << seed;
    }
}

TEST(KMeans, LloydObjectiveIsMonotone)
{
    const Eigen::MatrixXd P = blobs(40, 7);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ClusterConfig cfg;
        cfg.k = 5;
        cfg.seed = seed;
        const LloydRun run = lloyd(P, kmeanspp_seed(P, cfg.k, seed), cfg);
        ASSERT_FALSE(run.wcss_history.empty());
        for (std::size_t i = 1; i < run.wcss_history.size(); ++i)
            EXPECT_LE(run.wcss_history[i], run.wcss_history[i - 1] * (1 + 1e-12)) << "seed " << seed;
        EXPECT_NEAR(run.wcss, within_cluster_ss(P, run.centers, run.assignments), 1e-9);
    }
}

TEST(KMeans, KeepsBestRestart)
{
    const Eigen::MatrixXd P = blobs(30, 8);
    ClusterConfig cfg;
    cfg.k = 6;
    cfg.restarts = 12;
    cfg.seed = 3;
    const ClusterResult r = kmeans(P, cfg);
    ASSERT_EQ(r.restart_wcss.size(), 12u);
    EXPECT_DOUBLE_EQ(r.wcss, *std::min_element(r.restart_wcss.begin(), r.restart_wcss.end()));
    EXPECT_DOUBLE_EQ(r.restart_wcss[static_cast<std::size_t>(r.best_restart)], r.wcss);
    EXPECT_NEAR(r.wcss, within_cluster_ss(P, r.centers, r.assignments), 1e-9);
}

TEST(KMeans, DeterministicUnderFixedSeed)
{
    const Eigen::MatrixXd P = blobs(25, 9);
    ClusterConfig cfg;
    cfg.k = 4;
    cfg.seed = 42;
    const ClusterResult a = kmeans(P, cfg);
    const ClusterResult b = kmeans(P, cfg);
    EXPECT_EQ(a.centers, b.centers);
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_EQ(a.restart_wcss, b.restart_wcss);
}

TEST(KMeans, SeedingPicksDistinctDataPoints)
{
    const Eigen::MatrixXd P = blobs(10, 10);
    const Eigen::MatrixXd C = kmeanspp_seed(P, 5, 1);
    ASSERT_EQ(C.rows(), 5);
    for (Eigen::Index c = 0; c < C.rows(); ++c) {
        bool found = false;
        for (Eigen::Index i = 0; i < P.rows(); ++i)
            found = found || (P.row(i) == C.row(c));
        EXPECT_TRUE(found);
        for (Eigen::Index d = 0; d < c; ++d)
            EXPECT_GT((C.row(c) - C.row(d)).norm(), 0.0);
    }
}

TEST(KMeans, FewerDistinctPointsThanClusters)
{
    Eigen::MatrixXd P(6, 2);
    P << 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 1, 1;
    ClusterConfig cfg;
    cfg.k = 4;
    const ClusterResult r = kmeans(P, cfg);
    EXPECT_EQ(r.centers.rows(), 2);
    EXPECT_NEAR(r.wcss, 0.0, 1e-15);
}

TEST(KMeans, RejectsBadConfig)
{
    const Eigen::MatrixXd P = blobs(5, 11);
    ClusterConfig cfg;
    cfg.k = 0;
    EXPECT_ANY_THROW(kmeans(P, cfg));
    cfg.k = 2;
    EXPECT_ANY_THROW(kmeans(Eigen::MatrixXd(0, 2), cfg));
}

TEST(Spreads, NearestCenterDistanceTimesOverlap)
{
    Eigen::MatrixXd C(3, 1);
    C << 0, 1, 3;
    const Eigen::VectorXd s = compute_spreads(C, 2.0, C);
    EXPECT_DOUBLE_EQ(s(0), 2.0);
    EXPECT_DOUBLE_EQ(s(1), 2.0);
    EXPECT_DOUBLE_EQ(s(2), 4.0);
}

TEST(Spreads, SingleCenterFallsBackToDiameter)
{
    Eigen::MatrixXd C(1, 2);
    C << 0.5, 0.5;
    Eigen::MatrixXd P(3, 2);
    P << 0, 0, 3, 4, 1, 1;
    const Eigen::VectorXd s = compute_spreads(C, 3.0, P);
    EXPECT_DOUBLE_EQ(data_diameter(P), 5.0);
    EXPECT_DOUBLE_EQ(s(0), 7.5);
}
