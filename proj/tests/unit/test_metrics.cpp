#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "rbon/errors.hpp"
#include "rbon/metrics.hpp"

using namespace rbon;

TEST(L2RelativeError, HandExamples)
{
    Eigen::VectorXd v(3);
    v << 1, -2, 2;
    EXPECT_EQ(l2_relative_error(v, v), 0.0);
    EXPECT_EQ(l2_relative_error(v, Eigen::VectorXd::Zero(3)), 1.0);

    Eigen::VectorXd e1(2), e2(2);
    e1 << 1, 0;
    e2 << 0, 1;
    EXPECT_DOUBLE_EQ(l2_relative_error(e1, e2), std::sqrt(2.0));

    Eigen::VectorXd w(3);
    w << 1, -2, 3;
    EXPECT_DOUBLE_EQ(l2_relative_error(v, w), 1.0 / 3.0);
}

TEST(L2RelativeError, Errors)
{
    EXPECT_THROW(l2_relative_error(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)), PreconditionError);
    EXPECT_THROW(l2_relative_error(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)), DimensionError);
}

TEST(L2RelativeError, ScaleCovariantAndBounded)
{
    Eigen::VectorXd v(4), w(4);
    v << 0.3, -1.2, 2.0, 0.7;
    w << 0.1, -1.0, 2.4, 0.9;
    const double e = l2_relative_error(v, w);
    for (double lambda : {-3.0, 1e-3, 7.5})
        EXPECT_NEAR(l2_relative_error(lambda * v, lambda * w), e, 1e-15);
    EXPECT_LE(e, 1.0 + w.norm() / v.norm());
}

TEST(MeanAndMoe, HandExamples)
{
    const ErrorSummary s = mean_and_moe({1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(s.mean_error, 2.0);
    EXPECT_EQ(s.n, 3u);
    EXPECT_NEAR(s.margin_of_error, 1.959964 / std::sqrt(3.0), 1e-6);
    EXPECT_NEAR(s.margin_of_error, 1.13159, 5e-6);

    const ErrorSummary c = mean_and_moe({0.25, 0.25, 0.25, 0.25});
    EXPECT_DOUBLE_EQ(c.mean_error, 0.25);
    EXPECT_EQ(c.margin_of_error, 0.0);

    EXPECT_THROW(mean_and_moe({1.0}), PreconditionError);
    EXPECT_THROW(mean_and_moe({}), PreconditionError);
}

TEST(MeanAndMoe, PermutationInvariantAndReplication)
{
    const ErrorSummary a = mean_and_moe({0.1, 0.4, 0.2, 0.9});
    const ErrorSummary b = mean_and_moe({0.9, 0.2, 0.1, 0.4});
    EXPECT_DOUBLE_EQ(a.mean_error, b.mean_error);
    EXPECT_NEAR(a.margin_of_error, b.margin_of_error, 1e-15);

    // Replicating a list k times: s^2 scales by k(n-1)/(kn-1) and sqrt(n) by sqrt(k).
    const ErrorSummary r = mean_and_moe({0.1, 0.4, 0.2, 0.9, 0.1, 0.4, 0.2, 0.9, 0.1, 0.4, 0.2, 0.9});
    const double expected = a.margin_of_error * std::sqrt(3.0 * 3.0 / 11.0) / std::sqrt(3.0);
    EXPECT_NEAR(r.margin_of_error, expected, 1e-14);
}

TEST(MeanAndMoe, OtherConfidenceLevels)
{
    const ErrorSummary s = mean_and_moe({1.0, 2.0, 3.0}, 0.99);
    EXPECT_NEAR(s.margin_of_error, 2.5758293 / std::sqrt(3.0), 1e-6);
    EXPECT_THROW(mean_and_moe({1.0, 2.0}, 1.0), PreconditionError);
}

TEST(NormalQuantile, KnownValues)
{
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-14);
    EXPECT_NEAR(normal_quantile(0.995), 2.5758293035489, 1e-10);
    EXPECT_NEAR(normal_quantile(0.025), -1.959963984540054, 1e-12);
}

TEST(Formatting, TableCellStyle)
{
    EXPECT_EQ(format_sci(9.4e-4), "9.4E-4");
    EXPECT_EQ(format_sci(4.9e-5), "4.9E-5");
    EXPECT_EQ(format_sci(0.26), "2.6E-1");
    EXPECT_EQ(format_sci(1.0), "1.0E0");
    ErrorSummary s;
    s.mean_error = 9.4e-4;
    s.margin_of_error = 4.9e-5;
    EXPECT_EQ(format_mean_moe(s), "9.4E-4(4.9E-5)");
}
