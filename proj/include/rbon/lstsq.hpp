#pragma once

#include <vector>

#include <Eigen/Dense>

namespace rbon {

/// Minimum-norm minimizer of |A^T x - b|_2, i.e. x = (A^T)^+ b.
///
/// A is p x q (one column per equation) and b has q entries. Singular values
/// below max(p, q) * eps * sigma_max are treated as zero.
Eigen::VectorXd min_norm_lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Minimum-Frobenius-norm X (M x N) minimizing
///   sum_{j,l} (B.row(j) * X * T.row(l)^T - V(j, l))^2,
/// the pooled least-squares problem whose design rows are B.row(j) (x) T.row(l).
///
/// Solved through the SVDs of B (J x M) and T (L x N): the pooled design
/// matrix is T (x) B up to row order, whose singular values are the pairwise
/// products sigma_i(B) sigma_k(T). Products below
/// max(J*L, M*N) * eps * sigma_max(B) * sigma_max(T) are discarded, which is
/// exactly the cutoff min_norm_lstsq would apply to the assembled matrix.
Eigen::MatrixXd min_norm_separable_lstsq(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T,
                                         const Eigen::MatrixXd& V);

/// Element-wise mean of the per-query solutions xi_l = (Phi_l^T)^+ v_l with
/// Phi_l = [B.row(j)^T (x) T.row(l)^T]_j, returned as an M x N matrix
/// (branch-major, so the flattened row-major storage is the NM weight vector).
///
/// Uses (B (x) t^T)^+ = B^+ (x) t / |t|^2, so each xi_l costs one
/// matrix-vector product. The rank cutoff on B is max(J, M*N) * eps * sigma_max(B),
/// which matches min_norm_lstsq applied to the explicit Phi_l.
Eigen::MatrixXd per_query_averaged_lstsq(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T,
                                         const Eigen::MatrixXd& V);

/// Component-wise arithmetic mean of equally sized vectors.
Eigen::VectorXd average_weights(const std::vector<Eigen::VectorXd>& weight_vectors);

/// Scalar affine output map y = scale * raw + offset.
struct Calibration {
    double scale = 1.0;
    double offset = 0.0;

    [[nodiscard]] double operator()(double raw) const { return scale * raw + offset; }
};

/// Ordinary least-squares fit of targets ~ scale * raw + offset.
/// When raw has (near) zero variance the scale is pinned to 1.
Calibration fit_calibration(const Eigen::VectorXd& raw, const Eigen::VectorXd& targets);

} // namespace rbon
