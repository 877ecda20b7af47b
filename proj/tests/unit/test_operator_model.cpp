#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rbon/errors.hpp"
#include "rbon/operator_model.hpp"

using namespace rbon;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, unsigned seed, double scale = 1.0)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, scale);
    Eigen::MatrixXd A(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            A(i, j) = n(rng);
    return A;
}

Eigen::VectorXd random_positive(Eigen::Index n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = u(rng);
    return v;
}

double phi(double d2, double sigma)
{
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

// Independent double sum over branch unit i and trunk unit k.
double double_sum(const Eigen::MatrixXd& bc, const Eigen::VectorXd& bs, const Eigen::MatrixXd& tc,
                  const Eigen::VectorXd& ts, const Eigen::MatrixXd& Xi, const Eigen::VectorXd& u,
                  const Eigen::VectorXd& y, bool normalized)
{
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < bc.rows(); ++i) {
        double du = 0.0;
        for (Eigen::Index s = 0; s < u.size(); ++s)
            du += (u(s) - bc(i, s)) * (u(s) - bc(i, s));
        for (Eigen::Index k = 0; k < tc.rows(); ++k) {
            double dy = 0.0;
            for (Eigen::Index s = 0; s < y.size(); ++s)
                dy += (y(s) - tc(k, s)) * (y(s) - tc(k, s));
            const double f = phi(du, bs(i)) * phi(dy, ts(k));
            num += Xi(i, k) * f;
            den += f;
        }
    }
    return normalized ? num / den : num;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& Xi)
{
    Eigen::VectorXd w(Xi.size());
    for (Eigen::Index i = 0; i < Xi.rows(); ++i)
        for (Eigen::Index k = 0; k < Xi.cols(); ++k)
            w(i * Xi.cols() + k) = Xi(i, k);
    return w;
}

TrainingSet linear_family(int J, int m, int L)
{
    TrainingSet d;
    d.inputs.resize(J, m);
    d.queries.resize(L, 1);
    d.targets.resize(J, L);
    for (int l = 0; l < L; ++l)
        d.queries(l, 0) = static_cast<double>(l) / (L - 1);
    for (int j = 0; j < J; ++j) {
        const double a = 1.0 + 0.25 * j;
        for (int s = 0; s < m; ++s)
            d.inputs(j, s) = a * std::sin(std::numbers::pi * (s + 0.5) / m);
        for (int l = 0; l < L; ++l)
            d.targets(j, l) = a * std::exp(-d.queries(l, 0));
    }
    return d;
}

} // namespace

TEST(FeatureProduct, BranchMajorKronecker)
{
    Eigen::VectorXd b(2), t(3);
    b << 2, 3;
    t << 1, 10, 100;
    const Eigen::VectorXd f = feature_product(b, t);
    Eigen::VectorXd expect(6);
    expect << 2, 20, 200, 3, 30, 300;
    EXPECT_EQ(f, expect);
    const Eigen::VectorXd n = normalize_features(f);
    EXPECT_NEAR(n.sum(), 1.0, 1e-15);
    EXPECT_THROW(normalize_features(Eigen::VectorXd::Zero(3)), DegenerateFeatureError);
}

TEST(GaussianRbf, HandValues)
{
    Eigen::VectorXd x(2), c(2);
    x << 1, 2;
    c << 1, 0;
    EXPECT_NEAR(gaussian_rbf(x, c, 1.0), std::exp(-2.0), 1e-15);
    EXPECT_DOUBLE_EQ(gaussian_rbf(x, x, 0.3), 1.0);
    EXPECT_THROW(gaussian_rbf(x, c, 0.0), PreconditionError);
    EXPECT_THROW(gaussian_rbf(x, Eigen::VectorXd::Zero(3), 1.0), DimensionError);

    VectorX<cdouble> z(1), w(1);
    z << cdouble(3, 4);
    w << cdouble(0, 0);
    EXPECT_NEAR(gaussian_rbf(z, w, 1.0), std::exp(-12.5), 1e-15);
}

TEST(StructuralOracle, RbonPredictionEqualsDoubleSum)
{
    const int M = 4, N = 3, m = 6, d = 2;
    const Eigen::MatrixXd bc = random_matrix(M, m, 1), tc = random_matrix(N, d, 2);
    const Eigen::VectorXd bs = random_positive(M, 3) * 2.0, ts = random_positive(N, 4);
    const Eigen::MatrixXd Xi = random_matrix(M, N, 5);
    const TrainedModel model(Variant::RBON, RbfLayer<double>(bc, bs), RbfLayer<double>(tc, ts), flatten(Xi),
                             Calibration{}, m);
    for (unsigned s = 0; s < 20; ++s) {
        const Eigen::VectorXd u = random_matrix(m, 1, 100 + s, 0.7);
        const Eigen::VectorXd y = random_matrix(d, 1, 200 + s);
        const double oracle = double_sum(bc, bs, tc, ts, Xi, u, y, false);
        EXPECT_NEAR(predict(model, u, y), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
        EXPECT_NEAR(predict_raw(model, u, y), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
    }
}

TEST(StructuralOracle, NrbonPredictionEqualsNormalizedDoubleSum)
{
    const int M = 5, N = 4, m = 3, d = 1;
    const Eigen::MatrixXd bc = random_matrix(M, m, 11), tc = random_matrix(N, d, 12);
    const Eigen::VectorXd bs = random_positive(M, 13), ts = random_positive(N, 14);
    const Eigen::MatrixXd Xi = random_matrix(M, N, 15);
    const TrainedModel model(Variant::NRBON, RbfLayer<double>(bc, bs), RbfLayer<double>(tc, ts), flatten(Xi),
                             Calibration{}, m);
    for (unsigned s = 0; s < 20; ++s) {
        const Eigen::VectorXd u = random_matrix(m, 1, 300 + s, 0.8);
        const Eigen::VectorXd y = random_matrix(d, 1, 400 + s);
        const double oracle = double_sum(bc, bs, tc, ts, Xi, u, y, true);
        EXPECT_NEAR(predict(model, u, y), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
    }
}

TEST(StructuralOracle, FrbonUsesModulusDistanceOfSpectrum)
{
    const int M = 3, N = 2, m = 5;
    MatrixX<cdouble> bc(M, m);
    const Eigen::MatrixXd re = random_matrix(M, m, 21, 2.0), im = random_matrix(M, m, 22, 2.0);
    for (int i = 0; i < M; ++i)
        for (int s = 0; s < m; ++s)
            bc(i, s) = cdouble(re(i, s), im(i, s));
    const Eigen::VectorXd bs = random_positive(M, 23) * 3.0, ts = random_positive(N, 24);
    const Eigen::MatrixXd tc = random_matrix(N, 1, 25);
    const Eigen::MatrixXd Xi = random_matrix(M, N, 26);
    const TrainedModel model(Variant::F_RBON, RbfLayer<cdouble>(bc, bs), RbfLayer<double>(tc, ts), flatten(Xi),
                             Calibration{2.0, -1.0}, m);
    for (unsigned s = 0; s < 10; ++s) {
        const Eigen::VectorXd u = random_matrix(m, 1, 500 + s);
        const Eigen::VectorXd y = random_matrix(1, 1, 600 + s);
        double oracle = 0.0;
        for (int i = 0; i < M; ++i) {
            double du = 0.0;
            for (int k = 0; k < m; ++k) {
                cdouble X = 0.0;
                for (int n = 0; n < m; ++n)
                    X += u(n) * std::polar(1.0, -2.0 * std::numbers::pi * k * n / m);
                du += std::norm(X - bc(i, k));
            }
            for (int k = 0; k < N; ++k)
                oracle += Xi(i, k) * phi(du, bs(i)) * phi((y(0) - tc(k, 0)) * (y(0) - tc(k, 0)), ts(k));
        }
        oracle = 2.0 * oracle - 1.0;
        EXPECT_NEAR(predict(model, u, y), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
    }
}

TEST(Prediction, FieldIsBitIdenticalAndBatchAgrees)
{
    const TrainingSet d = linear_family(12, 8, 9);
    ModelConfig cfg;
    cfg.branch_units = 4;
    cfg.trunk_units = 5;
    cfg.seed = 3;
    for (Variant v : {Variant::RBON, Variant::NRBON, Variant::F_RBON}) {
        cfg.variant = v;
        const TrainedModel model = train(d, cfg);
        const Eigen::MatrixXd batch = predict_batch(model, d.inputs, d.queries);
        for (Eigen::Index j = 0; j < d.functions(); ++j) {
            const Eigen::VectorXd field = predict_field(model, d.inputs.row(j).transpose(), d.queries);
            for (Eigen::Index l = 0; l < d.query_count(); ++l) {
                const double p = predict(model, d.inputs.row(j).transpose(), d.queries.row(l).transpose());
                EXPECT_EQ(field(l), p);
                EXPECT_NEAR(batch(j, l), p, 1e-12 * std::max(1.0, std::abs(p)));
            }
        }
    }
}

TEST(Training, LinearFamilyIsFitClosely)
{
    const TrainingSet d = linear_family(20, 10, 15);
    ModelConfig cfg;
    cfg.branch_units = 10;
    cfg.trunk_units = 10;
    cfg.branch_overlap = 3.0;
    cfg.trunk_overlap = 3.0;
    cfg.seed = 1;
    const TrainedModel model = train(d, cfg);
    EXPECT_LT(model.report().mean_relative_l2, 1e-3);
    EXPECT_EQ(model.branch_units(), 10);
    EXPECT_EQ(model.trunk_units(), 10);
    EXPECT_EQ(model.weights().size(), 100);
    EXPECT_EQ(model.weight_matrix()(2, 3), model.weights()(2 * 10 + 3));
}

TEST(Training, DeterministicForFixedSeed)
{
    const TrainingSet d = linear_family(15, 6, 7);
    ModelConfig cfg;
    cfg.branch_units = 5;
    cfg.trunk_units = 4;
    cfg.seed = 77;
    const TrainedModel a = train(d, cfg), b = train(d, cfg);
    EXPECT_EQ(a.weights(), b.weights());
    EXPECT_EQ(std::get<RbfLayer<double>>(a.branch()).centers, std::get<RbfLayer<double>>(b.branch()).centers);
    EXPECT_EQ(a.trunk().centers, b.trunk().centers);
}

TEST(Training, FrbonBranchIsComplex)
{
    const TrainingSet d = linear_family(10, 8, 5);
    ModelConfig cfg;
    cfg.variant = Variant::F_RBON;
    cfg.branch_units = 3;
    cfg.trunk_units = 3;
    const TrainedModel model = train(d, cfg);
    ASSERT_TRUE(std::holds_alternative<RbfLayer<cdouble>>(model.branch()));
    const auto& layer = std::get<RbfLayer<cdouble>>(model.branch());
    EXPECT_EQ(layer.input_dim(), 8);
    EXPECT_GT(layer.centers.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Training, ManualCentersAreUsedVerbatim)
{
    const TrainingSet d = linear_family(10, 4, 6);
    ModelConfig cfg;
    cfg.branch_units = 2;
    cfg.trunk_units = 2;
    Eigen::MatrixXd bc(2, 4), tc(2, 1);
    bc << d.inputs.row(0), d.inputs.row(9);
    tc << 0.2, 0.8;
    cfg.manual_branch_centers = bc;
    cfg.manual_trunk_centers = tc;
    const TrainedModel model = train(d, cfg);
    EXPECT_EQ(Eigen::MatrixXd(std::get<RbfLayer<double>>(model.branch()).centers), bc);
    EXPECT_EQ(Eigen::MatrixXd(model.trunk().centers), tc);
    EXPECT_EQ(fit_trunk_centers(d, cfg), tc);
}

TEST(Training, FittedCentersMatchTrainedModel)
{
    const TrainingSet d = linear_family(14, 6, 8);
    ModelConfig cfg;
    cfg.branch_units = 4;
    cfg.trunk_units = 3;
    cfg.seed = 9;
    const TrainedModel model = train(d, cfg);
    EXPECT_EQ(fit_branch_centers(d, cfg), Eigen::MatrixXd(std::get<RbfLayer<double>>(model.branch()).centers));
    EXPECT_EQ(fit_trunk_centers(d, cfg), Eigen::MatrixXd(model.trunk().centers));
}

TEST(Training, SizeCapAndPreconditions)
{
    const TrainingSet d = linear_family(30, 4, 20);
    ModelConfig cfg;
    cfg.branch_units = 16;
    EXPECT_THROW(train(d, cfg), PreconditionError);
    cfg.branch_units = 15;
    cfg.trunk_units = 16;
    EXPECT_THROW(train(d, cfg), PreconditionError);
    cfg.enforce_size_cap = false;
    EXPECT_NO_THROW(train(d, cfg));

    ModelConfig small;
    small.branch_units = 2;
    small.trunk_units = 2;
    TrainingSet one = d;
    one.inputs = d.inputs.topRows(1);
    one.targets = d.targets.topRows(1);
    EXPECT_THROW(train(one, small), PreconditionError);

    TrainingSet bad = d;
    bad.targets(0, 0) = std::nan("");
    EXPECT_ANY_THROW(train(bad, small));

    TrainingSet mismatch = d;
    mismatch.targets = d.targets.leftCols(3);
    EXPECT_THROW(train(mismatch, small), DimensionError);
}

TEST(Prediction, RejectsWrongInputLength)
{
    const TrainingSet d = linear_family(8, 5, 4);
    ModelConfig cfg;
    cfg.branch_units = 2;
    cfg.trunk_units = 2;
    const TrainedModel model = train(d, cfg);
    EXPECT_THROW(predict(model, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(1)), DimensionError);
    EXPECT_THROW(predict(model, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(2)), DimensionError);
}

TEST(Prediction, NrbonFarFromEveryCenterIsDegenerate)
{
    const TrainingSet d = linear_family(8, 5, 4);
    ModelConfig cfg;
    cfg.variant = Variant::NRBON;
    cfg.branch_units = 2;
    cfg.trunk_units = 2;
    const TrainedModel model = train(d, cfg);
    const Eigen::VectorXd far = Eigen::VectorXd::Constant(5, 1e6);
    EXPECT_THROW(predict(model, far, d.queries.row(0).transpose()), DegenerateFeatureError);
}

TEST(Variants, NamesRoundTrip)
{
    for (Variant v : {Variant::RBON, Variant::NRBON, Variant::F_RBON})
        EXPECT_EQ(parse_variant(to_string(v)), v);
    EXPECT_THROW(parse_variant("deeponet"), PreconditionError);
    EXPECT_EQ(parse_weight_solver(to_string(WeightSolver::PerQueryAverage)), WeightSolver::PerQueryAverage);
}
