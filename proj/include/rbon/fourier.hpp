#pragma once

#include <Eigen/Dense>

#include "rbon/rbf.hpp"

namespace rbon {

/// Unnormalized forward DFT: X_k = sum_n u_n exp(-2 pi i k n / m).
VectorX<cdouble> to_frequency_domain(const Eigen::VectorXd& u);

/// Inverse of to_frequency_domain (carries the 1/m factor).
VectorX<cdouble> from_frequency_domain(const VectorX<cdouble>& spectrum);

/// Row-wise forward transform of a J x m sample matrix.
MatrixX<cdouble> to_frequency_domain_rows(const Eigen::MatrixXd& U);

} // namespace rbon
