#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rbon {

/// ||v_true - v_pred||_2 / ||v_true||_2. Throws PreconditionError for a
/// zero-norm truth vector and DimensionError for mismatched lengths.
double l2_relative_error(const Eigen::Ref<const Eigen::VectorXd>& v_true,
                         const Eigen::Ref<const Eigen::VectorXd>& v_pred);

/// Standard-normal quantile, accurate to ~1e-15.
double normal_quantile(double p);

struct ErrorSummary {
    double mean_error = 0.0;
    double margin_of_error = 0.0;
    int n = 0;
    std::vector<double> per_function_errors;
};

/// mean and z_{(1+confidence)/2} * s / sqrt(n) with s the n-1 sample deviation.
ErrorSummary mean_and_moe(const std::vector<double>& errors, double confidence = 0.95);

/// "9.4E-4(4.9E-5)"
std::string format_mean_moe(const ErrorSummary& s);
std::string format_sci(double v);

} // namespace rbon
