#include "rbon/lstsq.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "rbon/errors.hpp"

namespace rbon {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

using Svd = Eigen::JacobiSVD<Eigen::MatrixXd>;

Svd thin_svd(const Eigen::MatrixXd& A)
{
    return Svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

void require_finite(const Eigen::MatrixXd& A, const char* what)
{
    if (!A.allFinite())
        throw NonFiniteError(std::string(what) + ": non-finite entries");
}

} // namespace

Eigen::VectorXd min_norm_lstsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
    require_finite(A, "min_norm_lstsq");
    require_finite(b, "min_norm_lstsq");
    if (A.cols() != b.size())
        throw DimensionError("min_norm_lstsq: A has " + std::to_string(A.cols()) + " columns but b has " +
                             std::to_string(b.size()) + " entries");
    const Eigen::Index p = A.rows();
    const Eigen::Index q = A.cols();
    if (p == 0 || q == 0)
        return Eigen::VectorXd::Zero(p);

    // Solve (A^T) x = b: A^T = U S V^T  =>  x = V S^+ U^T b.
    const Svd svd = thin_svd(A.transpose());
    const Eigen::VectorXd& s = svd.singularValues();
    const double tau = static_cast<double>(std::max(p, q)) * kEps * s(0);
    Eigen::VectorXd coeff = svd.matrixU().transpose() * b;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        coeff(i) = s(i) > tau ? coeff(i) / s(i) : 0.0;
    return svd.matrixV() * coeff;
}

Eigen::MatrixXd min_norm_separable_lstsq(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T, const Eigen::MatrixXd& V)
{
    require_finite(B, "min_norm_separable_lstsq");
    require_finite(T, "min_norm_separable_lstsq");
    require_finite(V, "min_norm_separable_lstsq");
    if (V.rows() != B.rows() || V.cols() != T.rows())
        throw DimensionError("min_norm_separable_lstsq: targets must be " + std::to_string(B.rows()) + " x " +
                             std::to_string(T.rows()));

    const Svd sb = thin_svd(B);
    const Svd st = thin_svd(T);
    const Eigen::VectorXd& db = sb.singularValues();
    const Eigen::VectorXd& dt = st.singularValues();
    if (db.size() == 0 || dt.size() == 0)
        return Eigen::MatrixXd::Zero(B.cols(), T.cols());

    const double rows = static_cast<double>(B.rows()) * static_cast<double>(T.rows());
    const double cols = static_cast<double>(B.cols()) * static_cast<double>(T.cols());
    const double tau = std::max(rows, cols) * kEps * db(0) * dt(0);

    Eigen::MatrixXd core = sb.matrixU().transpose() * V * st.matrixU();
    for (Eigen::Index i = 0; i < core.rows(); ++i)
        for (Eigen::Index k = 0; k < core.cols(); ++k) {
            const double sv = db(i) * dt(k);
            core(i, k) = sv > tau ? core(i, k) / sv : 0.0;
        }
    return sb.matrixV() * core * st.matrixV().transpose();
}

Eigen::MatrixXd per_query_averaged_lstsq(const Eigen::MatrixXd& B, const Eigen::MatrixXd& T, const Eigen::MatrixXd& V)
{
    require_finite(B, "per_query_averaged_lstsq");
    require_finite(T, "per_query_averaged_lstsq");
    require_finite(V, "per_query_averaged_lstsq");
    if (V.rows() != B.rows() || V.cols() != T.rows())
        throw DimensionError("per_query_averaged_lstsq: targets must be " + std::to_string(B.rows()) + " x " +
                             std::to_string(T.rows()));
    if (T.rows() == 0)
        throw PreconditionError("per_query_averaged_lstsq: no query points");

    const Svd sb = thin_svd(B);
    const Eigen::VectorXd& db = sb.singularValues();
    const double width = static_cast<double>(B.cols()) * static_cast<double>(T.cols());
    const double tau = std::max(static_cast<double>(B.rows()), width) * kEps * (db.size() ? db(0) : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(db.size());
    for (Eigen::Index i = 0; i < db.size(); ++i)
        if (db(i) > tau)
            inv(i) = 1.0 / db(i);

    // Column l of W is B^+ v_l.
    const Eigen::MatrixXd W = sb.matrixV() * inv.asDiagonal() * (sb.matrixU().transpose() * V);

    Eigen::MatrixXd Tn = T;
    for (Eigen::Index l = 0; l < T.rows(); ++l) {
        const double n2 = T.row(l).squaredNorm();
        if (n2 > 0.0)
            Tn.row(l) /= n2;
        else
            Tn.row(l).setZero();
    }
    return (W * Tn) / static_cast<double>(T.rows());
}

Eigen::VectorXd average_weights(const std::vector<Eigen::VectorXd>& weight_vectors)
{
    if (weight_vectors.empty())
        throw PreconditionError("average_weights: empty list");
    const Eigen::Index n = weight_vectors.front().size();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    for (const auto& w : weight_vectors) {
        if (w.size() != n)
            throw DimensionError("average_weights: ragged weight vectors");
        sum += w;
    }
    return sum / static_cast<double>(weight_vectors.size());
}

Calibration fit_calibration(const Eigen::VectorXd& raw, const Eigen::VectorXd& targets)
{
    if (raw.size() != targets.size())
        throw DimensionError("fit_calibration: raw and target lengths differ");
    if (raw.size() < 2)
        throw PreconditionError("fit_calibration: at least two samples are required");
    require_finite(raw, "fit_calibration");
    require_finite(targets, "fit_calibration");

    const double n = static_cast<double>(raw.size());
    const double mr = raw.mean();
    const double mt = targets.mean();
    const Eigen::ArrayXd dr = raw.array() - mr;
    const Eigen::ArrayXd dt = targets.array() - mt;
    const double var = dr.square().sum() / n;
    if (var < 1e-14)
        return {1.0, mt - mr};
    const double slope = (dr * dt).sum() / dr.square().sum();
    return {slope, mt - slope * mr};
}

} // namespace rbon
