#include "rbon/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "rbon/errors.hpp"

namespace rbon {

double l2_relative_error(const Eigen::Ref<const Eigen::VectorXd>& v_true,
                         const Eigen::Ref<const Eigen::VectorXd>& v_pred)
{
    if (v_true.size() != v_pred.size())
        throw DimensionError("l2_relative_error: lengths differ (" + std::to_string(v_true.size()) + " vs " +
                             std::to_string(v_pred.size()) + ")");
    const double den = v_true.norm();
    if (!(den > 0.0))
        throw PreconditionError("l2_relative_error: truth vector has zero norm");
    return (v_true - v_pred).norm() / den;
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw PreconditionError("normal_quantile: p must lie in (0, 1)");
    // Newton on Phi(x) - p = 0 with Phi(x) = erfc(-x / sqrt 2) / 2, started
    // from a logistic approximation.
    double x = std::log(p / (1.0 - p)) / 1.702;
    for (int it = 0; it < 60; ++it) {
        const double cdf = 0.5 * std::erfc(-x / std::numbers::sqrt2);
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        const double step = (cdf - p) / pdf;
        x -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(x)))
            break;
    }
    return x;
}

ErrorSummary mean_and_moe(const std::vector<double>& errors, double confidence)
{
    if (errors.size() < 2)
        throw PreconditionError("mean_and_moe: need at least 2 values");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw PreconditionError("mean_and_moe: confidence must lie in (0, 1)");
    const double n = static_cast<double>(errors.size());
    double mean = 0.0;
    for (double e : errors)
        mean += e;
    mean /= n;
    double ss = 0.0;
    for (double e : errors)
        ss += (e - mean) * (e - mean);
    const double s = std::sqrt(ss / (n - 1.0));
    ErrorSummary out;
    out.mean_error = mean;
    out.margin_of_error = normal_quantile(0.5 * (1.0 + confidence)) * s / std::sqrt(n);
    out.n = static_cast<int>(errors.size());
    out.per_function_errors = errors;
    return out;
}

std::string format_sci(double v)
{
    if (!std::isfinite(v))
        return std::isnan(v) ? "NaN" : (v > 0 ? "Inf" : "-Inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1E", v);
    // "9.4E-04" -> "9.4E-4"
    std::string s(buf);
    const auto e = s.find('E');
    std::string mant = s.substr(0, e), expo = s.substr(e + 1);
    const char sign = expo[0];
    expo = expo.substr(1);
    while (expo.size() > 1 && expo[0] == '0')
        expo.erase(0, 1);
    return mant + "E" + (sign == '-' ? "-" : "") + expo;
}

std::string format_mean_moe(const ErrorSummary& s)
{
    return format_sci(s.mean_error) + "(" + format_sci(s.margin_of_error) + ")";
}

} // namespace rbon
