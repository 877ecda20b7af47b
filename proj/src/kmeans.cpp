#include "rbon/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "rbon/errors.hpp"

namespace rbon {

namespace {

std::mt19937_64 restart_rng(std::uint64_t seed, int restart)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x6b6d6e73u};
    return std::mt19937_64(seq);
}

void check_points(const Eigen::MatrixXd& points)
{
    if (points.rows() < 2)
        throw PreconditionError("kmeans: at least two points are required, got " + std::to_string(points.rows()));
    if (points.cols() < 1)
        throw DimensionError("kmeans: points have zero dimension");
    if (!points.allFinite())
        throw NonFiniteError("kmeans: non-finite coordinates");
}

} // namespace

double within_cluster_ss(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                         const std::vector<Eigen::Index>& assignments)
{
    double s = 0.0;
    for (Eigen::Index p = 0; p < points.rows(); ++p)
        s += (points.row(p) - centers.row(assignments[static_cast<std::size_t>(p)])).squaredNorm();
    return s;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& points, int k, std::uint64_t seed)
{
    auto rng = restart_rng(seed, 0);
    const Eigen::Index n = points.rows();
    std::vector<Eigen::Index> chosen;
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    chosen.push_back(first(rng));
    std::vector<double> mind(static_cast<std::size_t>(n));
    for (Eigen::Index p = 0; p < n; ++p)
        mind[static_cast<std::size_t>(p)] = (points.row(p) - points.row(chosen[0])).squaredNorm();
    while (static_cast<int>(chosen.size()) < k) {
        double total = 0.0;
        for (double d : mind)
            total += d;
        if (!(total > 0.0))
            break;
        std::discrete_distribution<Eigen::Index> pick(mind.begin(), mind.end());
        const Eigen::Index next = pick(rng);
        chosen.push_back(next);
        for (Eigen::Index p = 0; p < n; ++p)
            mind[static_cast<std::size_t>(p)] =
                std::min(mind[static_cast<std::size_t>(p)], (points.row(p) - points.row(next)).squaredNorm());
    }
    Eigen::MatrixXd c(static_cast<Eigen::Index>(chosen.size()), points.cols());
    for (std::size_t i = 0; i < chosen.size(); ++i)
        c.row(static_cast<Eigen::Index>(i)) = points.row(chosen[i]);
    return c;
}

LloydRun lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centers, const ClusterConfig& config)
{
    const Eigen::Index n = points.rows();
    const Eigen::Index dim = points.cols();
    if (centers.cols() != dim)
        throw DimensionError("lloyd: center dimension differs from point dimension");
    if (centers.rows() < 1)
        throw PreconditionError("lloyd: no initial centers");

    LloydRun run;
    std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), 0);
    std::vector<double> dist2(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> alive(static_cast<std::size_t>(centers.rows()), true);

    for (int it = 0; it < config.max_iterations; ++it) {
        const Eigen::Index kc = centers.rows();
        std::vector<Eigen::Index> count(static_cast<std::size_t>(kc), 0);
        for (Eigen::Index p = 0; p < n; ++p) {
            double d2 = 0.0;
            Eigen::Index best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (Eigen::Index c = 0; c < kc; ++c) {
                if (!alive[static_cast<std::size_t>(c)])
                    continue;
                d2 = (points.row(p) - centers.row(c)).squaredNorm();
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = c;
                }
            }
            assign[static_cast<std::size_t>(p)] = best;
            dist2[static_cast<std::size_t>(p)] = best_d2;
            ++count[static_cast<std::size_t>(best)];
        }

        // Re-seed empty clusters at the worst-served point of a multi-member cluster.
        for (Eigen::Index c = 0; c < kc; ++c) {
            if (!alive[static_cast<std::size_t>(c)] || count[static_cast<std::size_t>(c)] > 0)
                continue;
            Eigen::Index far = -1;
            double far_d2 = 0.0;
            for (Eigen::Index p = 0; p < n; ++p) {
                const auto owner = assign[static_cast<std::size_t>(p)];
                if (count[static_cast<std::size_t>(owner)] > 1 && dist2[static_cast<std::size_t>(p)] > far_d2) {
                    far_d2 = dist2[static_cast<std::size_t>(p)];
                    far = p;
                }
            }
            if (far < 0) {
                alive[static_cast<std::size_t>(c)] = false;
                continue;
            }
            --count[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
            assign[static_cast<std::size_t>(far)] = c;
            dist2[static_cast<std::size_t>(far)] = 0.0;
            count[static_cast<std::size_t>(c)] = 1;
            centers.row(c) = points.row(far);
        }

        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(kc, dim);
        for (Eigen::Index p = 0; p < n; ++p)
            next.row(assign[static_cast<std::size_t>(p)]) += points.row(p);
        double moved = 0.0;
        for (Eigen::Index c = 0; c < kc; ++c) {
            if (!alive[static_cast<std::size_t>(c)]) {
                next.row(c) = centers.row(c);
                continue;
            }
            next.row(c) /= static_cast<double>(count[static_cast<std::size_t>(c)]);
            moved = std::max(moved, (next.row(c) - centers.row(c)).norm());
        }
        centers = std::move(next);
        run.wcss_history.push_back(within_cluster_ss(points, centers, assign));
        run.iterations = it + 1;
        if (moved <= config.convergence_tol)
            break;
    }

    // Compact away dead clusters, remapping assignments.
    std::vector<Eigen::Index> remap(static_cast<std::size_t>(centers.rows()), -1);
    Eigen::Index live = 0;
    for (Eigen::Index c = 0; c < centers.rows(); ++c)
        if (alive[static_cast<std::size_t>(c)])
            remap[static_cast<std::size_t>(c)] = live++;
    run.centers.resize(live, dim);
    for (Eigen::Index c = 0; c < centers.rows(); ++c)
        if (alive[static_cast<std::size_t>(c)])
            run.centers.row(remap[static_cast<std::size_t>(c)]) = centers.row(c);
    run.assignments.resize(static_cast<std::size_t>(n));
    for (Eigen::Index p = 0; p < n; ++p)
        run.assignments[static_cast<std::size_t>(p)] = remap[static_cast<std::size_t>(assign[static_cast<std::size_t>(p)])];
    run.wcss = within_cluster_ss(points, run.centers, run.assignments);
    return run;
}

ClusterResult kmeans(const Eigen::MatrixXd& points, const ClusterConfig& config)
{
    check_points(points);
    if (config.k < 1)
        throw PreconditionError("kmeans: k must be at least 1");
    if (config.restarts < 1)
        throw PreconditionError("kmeans: restarts must be at least 1");
    if (config.max_iterations < 1)
        throw PreconditionError("kmeans: max_iterations must be at least 1");

    ClusterResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < config.restarts; ++r) {
        auto rng = restart_rng(config.seed, r);
        const std::uint64_t seed_r = rng();
        LloydRun run = lloyd(points, kmeanspp_seed(points, config.k, seed_r), config);
        best.restart_wcss.push_back(run.wcss);
        if (run.wcss < best.wcss) {
            best.wcss = run.wcss;
            best.centers = std::move(run.centers);
            best.assignments = std::move(run.assignments);
            best.best_restart = r;
        }
    }
    return best;
}

double data_diameter(const Eigen::MatrixXd& points)
{
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = i + 1; j < points.rows(); ++j)
            d2 = std::max(d2, (points.row(i) - points.row(j)).squaredNorm());
    return std::sqrt(d2);
}

Eigen::VectorXd compute_spreads(const Eigen::MatrixXd& centers, double overlap, const Eigen::MatrixXd& points)
{
    if (centers.rows() < 1)
        throw PreconditionError("compute_spreads: no centers");
    if (!(overlap > 0.0))
        throw PreconditionError("compute_spreads: overlap must be positive");

    const Eigen::Index k = centers.rows();
    Eigen::VectorXd nearest_distinct = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            if (i == j)
                continue;
            const double d = (centers.row(i) - centers.row(j)).norm();
            if (d > 0.0)
                nearest_distinct(i) = std::min(nearest_distinct(i), d);
        }

    Eigen::VectorXd sigma(k);
    if (!std::isfinite(nearest_distinct.minCoeff())) {
        // One center, or every center coincides.
        const double fallback = overlap * 0.5 * data_diameter(points);
        sigma.setConstant(std::max(fallback, kMinSpread));
        return sigma;
    }
    for (Eigen::Index i = 0; i < k; ++i)
        sigma(i) = std::max(overlap * nearest_distinct(i), kMinSpread);
    return sigma;
}

} // namespace rbon
