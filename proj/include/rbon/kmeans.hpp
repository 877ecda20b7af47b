#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace rbon {

struct ClusterConfig {
    int k = 1;
    int restarts = 10;
    int max_iterations = 300;
    double convergence_tol = 1e-9; ///< on the largest center displacement
    std::uint64_t seed = 0;
};

/// Outcome of one Lloyd iteration sequence from a single seeding.
struct LloydRun {
    Eigen::MatrixXd centers;              ///< one center per row
    std::vector<Eigen::Index> assignments;
    double wcss = 0.0;
    std::vector<double> wcss_history;     ///< objective after each iteration
    int iterations = 0;
};

struct ClusterResult {
    Eigen::MatrixXd centers;              ///< one center per row, at most k rows
    std::vector<Eigen::Index> assignments;
    double wcss = 0.0;
    int best_restart = 0;
    std::vector<double> restart_wcss;     ///< final objective of every restart, in restart order
};

/// Sum of squared distances from each point to its assigned center.
double within_cluster_ss(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                         const std::vector<Eigen::Index>& assignments);

/// k-means++ seeding. May return fewer than k rows when the points have
/// fewer than k distinct locations.
Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& points, int k, std::uint64_t seed);

/// Lloyd's algorithm from the given initial centers. Empty clusters are
/// re-seeded at the point farthest from its current center; clusters that
/// stay empty (too few distinct points) are dropped from the result.
LloydRun lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd initial_centers, const ClusterConfig& config);

/// Best-of-restarts Lloyd clustering with k-means++ seeding. Rows of
/// `points` are observations. Deterministic for a fixed config.seed.
ClusterResult kmeans(const Eigen::MatrixXd& points, const ClusterConfig& config);

/// Largest pairwise Euclidean distance between rows.
double data_diameter(const Eigen::MatrixXd& points);

inline constexpr double kMinSpread = 1e-8;

/// Gaussian widths from inter-center distances:
/// sigma_i = overlap * (distance from center i to its nearest distinct center).
/// With a single center, or when all centers coincide, every width falls back
/// to overlap * diameter(points) / 2. Widths are clamped below at kMinSpread.
Eigen::VectorXd compute_spreads(const Eigen::MatrixXd& centers, double overlap, const Eigen::MatrixXd& points);

} // namespace rbon
