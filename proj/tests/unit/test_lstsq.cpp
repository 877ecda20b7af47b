#include <random>

#include <gtest/gtest.h>

#include "rbon/lstsq.hpp"

using namespace rbon;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXd A(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            A(i, j) = n(rng);
    return A;
}

// Row j*L + l of the result is B.row(j) (x) T.row(l), branch-major.
Eigen::MatrixXd pooled_design(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T)
{
    const Eigen::Index M = B.cols(), N = T.cols();
    Eigen::MatrixXd D(B.rows() * T.rows(), M * N);
    for (Eigen::Index j = 0; j < B.rows(); ++j)
        for (Eigen::Index l = 0; l < T.rows(); ++l)
            for (Eigen::Index i = 0; i < M; ++i)
                for (Eigen::Index k = 0; k < N; ++k)
                    D(j * T.rows() + l, i * N + k) = B(j, i) * T(l, k);
    return D;
}

Eigen::VectorXd flatten_row_major(const Eigen::MatrixXd& X)
{
    Eigen::VectorXd v(X.size());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index k = 0; k < X.cols(); ++k)
            v(i * X.cols() + k) = X(i, k);
    return v;
}

} // namespace

TEST(MinNormLstsq, FullRankMatchesNormalEquations)
{
    const Eigen::MatrixXd A = random_matrix(4, 12, 1); // 4 unknowns, 12 equations
    const Eigen::VectorXd b = random_matrix(12, 1, 2);
    const Eigen::VectorXd x = min_norm_lstsq(A, b);
    const Eigen::VectorXd oracle = (A * A.transpose()).ldlt().solve(A * b);
    EXPECT_LE((x - oracle).norm(), 1e-10 * oracle.norm());
}

TEST(MinNormLstsq, ExactSystemSolvedExactly)
{
    Eigen::MatrixXd A(2, 2);
    A << 2, 0, 1, 3;
    Eigen::VectorXd b(2);
    b << 4, 9;
    // A^T x = b: 2 x0 + x1 = 4, 3 x1 = 9
    const Eigen::VectorXd x = min_norm_lstsq(A, b);
    EXPECT_NEAR(x(0), 0.5, 1e-12);
    EXPECT_NEAR(x(1), 3.0, 1e-12);
}

TEST(MinNormLstsq, UnderdeterminedHandExample)
{
    // One equation x0 + x1 = 2: the minimum-norm solution is (1, 1).
    Eigen::MatrixXd A(2, 1);
    A << 1, 1;
    Eigen::VectorXd b(1);
    b << 2;
    const Eigen::VectorXd x = min_norm_lstsq(A, b);
    EXPECT_NEAR(x(0), 1.0, 1e-12);
    EXPECT_NEAR(x(1), 1.0, 1e-12);
}

TEST(MinNormLstsq, RankDeficientIsMinimumNorm)
{
    // 8 unknowns, 20 equations, rank 3.
    const Eigen::MatrixXd A = random_matrix(8, 3, 3) * random_matrix(3, 20, 4);
    const Eigen::VectorXd b = random_matrix(20, 1, 5);
    const Eigen::VectorXd x = min_norm_lstsq(A, b);

    const Eigen::VectorXd residual = A.transpose() * x - b;
    EXPECT_LE((A * residual).norm(), 1e-9 * A.norm() * b.norm());

    const Eigen::VectorXd oracle = A.transpose().completeOrthogonalDecomposition().solve(b);
    EXPECT_LE((x - oracle).norm(), 1e-9 * oracle.norm());

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU);
    for (Eigen::Index c = 3; c < 8; ++c) {
        const Eigen::VectorXd null_dir = svd.matrixU().col(c);
        EXPECT_NEAR(null_dir.dot(x), 0.0, 1e-9 * x.norm());
        EXPECT_GT((x + 0.1 * null_dir).norm(), x.norm());
    }
}

TEST(MinNormLstsq, ZeroMatrixGivesZero)
{
    const Eigen::VectorXd x = min_norm_lstsq(Eigen::MatrixXd::Zero(3, 5), Eigen::VectorXd::Ones(5));
    EXPECT_EQ(x.size(), 3);
    EXPECT_EQ(x.norm(), 0.0);
}

TEST(SeparableLstsq, MatchesExplicitPooledAssembly)
{
    const Eigen::MatrixXd B = random_matrix(9, 4, 10).cwiseAbs();
    const Eigen::MatrixXd T = random_matrix(7, 3, 11).cwiseAbs();
    const Eigen::MatrixXd V = random_matrix(9, 7, 12);
    const Eigen::MatrixXd X = min_norm_separable_lstsq(B, T, V);
    ASSERT_EQ(X.rows(), 4);
    ASSERT_EQ(X.cols(), 3);

    const Eigen::MatrixXd D = pooled_design(B, T);
    Eigen::VectorXd v(V.size());
    for (Eigen::Index j = 0; j < V.rows(); ++j)
        for (Eigen::Index l = 0; l < V.cols(); ++l)
            v(j * V.cols() + l) = V(j, l);
    const Eigen::VectorXd oracle = min_norm_lstsq(D.transpose(), v);
    EXPECT_LE((flatten_row_major(X) - oracle).norm(), 1e-9 * oracle.norm());
}

TEST(SeparableLstsq, RankDeficientFactorsStayMinimumNorm)
{
    Eigen::MatrixXd B = random_matrix(6, 4, 20).cwiseAbs();
    B.col(3) = B.col(0) + B.col(1);
    Eigen::MatrixXd T = random_matrix(5, 3, 21).cwiseAbs();
    T.col(2) = 2.0 * T.col(1);
    const Eigen::MatrixXd V = random_matrix(6, 5, 22);
    const Eigen::VectorXd x = flatten_row_major(min_norm_separable_lstsq(B, T, V));

    const Eigen::MatrixXd D = pooled_design(B, T);
    Eigen::VectorXd v(V.size());
    for (Eigen::Index j = 0; j < V.rows(); ++j)
        for (Eigen::Index l = 0; l < V.cols(); ++l)
            v(j * V.cols() + l) = V(j, l);
    const Eigen::VectorXd oracle = D.completeOrthogonalDecomposition().solve(v);
    EXPECT_LE((x - oracle).norm(), 1e-9 * oracle.norm());
    EXPECT_LE((D.transpose() * (D * x - v)).norm(), 1e-9 * D.norm() * v.norm());
}

TEST(PerQueryAverage, MatchesExplicitPerQuerySolves)
{
    const Eigen::MatrixXd B = random_matrix(10, 3, 30).cwiseAbs();
    const Eigen::MatrixXd T = random_matrix(6, 4, 31).cwiseAbs();
    const Eigen::MatrixXd V = random_matrix(10, 6, 32);
    const Eigen::VectorXd got = flatten_row_major(per_query_averaged_lstsq(B, T, V));

    std::vector<Eigen::VectorXd> per_query;
    for (Eigen::Index l = 0; l < T.rows(); ++l) {
        Eigen::MatrixXd Phi(B.cols() * T.cols(), B.rows());
        for (Eigen::Index j = 0; j < B.rows(); ++j)
            for (Eigen::Index i = 0; i < B.cols(); ++i)
                for (Eigen::Index k = 0; k < T.cols(); ++k)
                    Phi(i * T.cols() + k, j) = B(j, i) * T(l, k);
        per_query.push_back(min_norm_lstsq(Phi, V.col(l)));
    }
    Eigen::VectorXd oracle = Eigen::VectorXd::Zero(got.size());
    for (const auto& x : per_query)
        oracle += x;
    oracle /= static_cast<double>(per_query.size());
    EXPECT_LE((got - oracle).norm(), 1e-9 * oracle.norm());
}

TEST(AverageWeights, ComponentWiseMean)
{
    Eigen::VectorXd a(3), b(3);
    a << 1, 2, 3;
    b << 3, 4, 5;
    const Eigen::VectorXd m = average_weights({a, b});
    EXPECT_DOUBLE_EQ(m(0), 2.0);
    EXPECT_DOUBLE_EQ(m(1), 3.0);
    EXPECT_DOUBLE_EQ(m(2), 4.0);
}

TEST(Calibration, RecoversAffineMap)
{
    Eigen::VectorXd raw(5);
    raw << -1, 0, 1, 2, 5;
    const Eigen::VectorXd targets = (2.5 * raw.array() - 0.75).matrix();
    const Calibration c = fit_calibration(raw, targets);
    EXPECT_NEAR(c.scale, 2.5, 1e-12);
    EXPECT_NEAR(c.offset, -0.75, 1e-12);
    EXPECT_NEAR(c(4.0), 9.25, 1e-12);
}

TEST(Calibration, ConstantRawPinsScale)
{
    const Eigen::VectorXd raw = Eigen::VectorXd::Constant(4, 3.0);
    Eigen::VectorXd targets(4);
    targets << 1, 2, 3, 4;
    const Calibration c = fit_calibration(raw, targets);
    EXPECT_DOUBLE_EQ(c.scale, 1.0);
    EXPECT_NEAR(c(3.0), 2.5, 1e-12);
}
