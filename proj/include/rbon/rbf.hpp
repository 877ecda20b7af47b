#pragma once

#include <complex>
#include <cmath>
#include <string>
#include <type_traits>

#include <Eigen/Dense>

#include "rbon/errors.hpp"

namespace rbon {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using cdouble = std::complex<double>;

template <typename T>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

/// Gaussian radial basis exp(-|x - c|^2 / (2 sigma^2)).
///
/// For complex arguments the distance is the Euclidean norm of the component
/// moduli, so the result is real and equals the real kernel applied to the
/// interleaved (re, im) embedding.
template <typename DerivedX, typename DerivedC>
double gaussian_rbf(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedC>& c, double sigma)
{
    if (x.size() != c.size())
        throw DimensionError("gaussian_rbf: input has dimension " + std::to_string(x.size()) +
                             " but center has " + std::to_string(c.size()));
    if (!(sigma > 0.0))
        throw PreconditionError("gaussian_rbf: spread must be positive");
    const double d2 = (x.derived() - c.derived()).squaredNorm();
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

/// One hidden layer of Gaussian units sharing an input dimension and field.
///
/// Row i of `centers` is the center of unit i; `spreads(i)` its width.
template <typename Scalar>
struct RbfLayer {
    using scalar_type = Scalar;

    MatrixX<Scalar> centers;
    Eigen::VectorXd spreads;

    RbfLayer() = default;
    RbfLayer(MatrixX<Scalar> c, Eigen::VectorXd s) : centers(std::move(c)), spreads(std::move(s))
    {
        if (centers.rows() != spreads.size())
            throw DimensionError("RbfLayer: center count and spread count differ");
        if (centers.rows() < 1)
            throw PreconditionError("RbfLayer: at least one unit is required");
        for (Eigen::Index i = 0; i < spreads.size(); ++i)
            if (!(spreads(i) > 0.0) || !std::isfinite(spreads(i)))
                throw PreconditionError("RbfLayer: spreads must be positive and finite");
    }

    [[nodiscard]] Eigen::Index units() const { return centers.rows(); }
    [[nodiscard]] Eigen::Index input_dim() const { return centers.cols(); }
    [[nodiscard]] static constexpr bool is_complex() { return is_complex_v<Scalar>; }
};

/// Feature vector [phi(x, c_1, s_1), ..., phi(x, c_K, s_K)].
template <typename Scalar, typename Derived>
Eigen::VectorXd layer_features(const RbfLayer<Scalar>& layer, const Eigen::MatrixBase<Derived>& x)
{
    static_assert(std::is_same_v<typename Derived::Scalar, Scalar>,
                  "layer_features: input field must match the layer's field");
    if (x.size() != layer.input_dim())
        throw DimensionError("layer_features: input has dimension " + std::to_string(x.size()) +
                             ", layer expects " + std::to_string(layer.input_dim()));
    const VectorX<Scalar> xv = x;
    Eigen::VectorXd out(layer.units());
    for (Eigen::Index k = 0; k < layer.units(); ++k) {
        const double d2 = (xv.transpose() - layer.centers.row(k)).squaredNorm();
        out(k) = std::exp(-d2 / (2.0 * layer.spreads(k) * layer.spreads(k)));
    }
    return out;
}

/// Batched features: row r of the result is layer_features(layer, X.row(r)).
template <typename Scalar, typename Derived>
Eigen::MatrixXd layer_features_rows(const RbfLayer<Scalar>& layer, const Eigen::MatrixBase<Derived>& X)
{
    static_assert(std::is_same_v<typename Derived::Scalar, Scalar>,
                  "layer_features_rows: input field must match the layer's field");
    if (X.cols() != layer.input_dim())
        throw DimensionError("layer_features_rows: inputs have dimension " + std::to_string(X.cols()) +
                             ", layer expects " + std::to_string(layer.input_dim()));
    Eigen::MatrixXd out(X.rows(), layer.units());
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (Eigen::Index k = 0; k < layer.units(); ++k) {
            const double d2 = (X.row(r) - layer.centers.row(k)).squaredNorm();
            out(r, k) = std::exp(-d2 / (2.0 * layer.spreads(k) * layer.spreads(k)));
        }
    return out;
}

/// Kronecker product in branch-major order: out[i*N + k] = b[i] * t[k].
template <typename DerivedB, typename DerivedT>
Eigen::VectorXd feature_product(const Eigen::MatrixBase<DerivedB>& b, const Eigen::MatrixBase<DerivedT>& t)
{
    if (b.size() == 0 || t.size() == 0)
        throw PreconditionError("feature_product: empty factor");
    const Eigen::Index n = t.size();
    Eigen::VectorXd out(b.size() * n);
    for (Eigen::Index i = 0; i < b.size(); ++i)
        out.segment(i * n, n) = b(i) * t.derived();
    return out;
}

/// Sums below this are treated as all-units-vanished.
inline constexpr double kDegenerateFeatureSum = 1e-300;

/// Divide a nonnegative feature vector by its sum.
template <typename Derived>
Eigen::VectorXd normalize_features(const Eigen::MatrixBase<Derived>& v)
{
    if ((v.array() < 0.0).any())
        throw PreconditionError("normalize_features: negative component");
    const double s = v.sum();
    if (!(s > kDegenerateFeatureSum))
        throw DegenerateFeatureError("normalize_features: feature sum vanished (every unit is ~0)");
    return v / s;
}

/// Row-wise normalize_features over a batch of feature vectors.
inline Eigen::MatrixXd normalize_feature_rows(const Eigen::MatrixXd& F)
{
    Eigen::MatrixXd out(F.rows(), F.cols());
    for (Eigen::Index r = 0; r < F.rows(); ++r)
        out.row(r) = normalize_features(F.row(r).transpose()).transpose();
    return out;
}

/// Interleave (re, im) of each component: C^m -> R^{2m}.
template <typename Derived>
Eigen::MatrixXd embed_complex_rows(const Eigen::MatrixBase<Derived>& Z)
{
    Eigen::MatrixXd out(Z.rows(), 2 * Z.cols());
    for (Eigen::Index r = 0; r < Z.rows(); ++r)
        for (Eigen::Index c = 0; c < Z.cols(); ++c) {
            out(r, 2 * c) = std::real(Z(r, c));
            out(r, 2 * c + 1) = std::imag(Z(r, c));
        }
    return out;
}

/// Inverse of embed_complex_rows.
inline MatrixX<cdouble> unembed_complex_rows(const Eigen::MatrixXd& E)
{
    if (E.cols() % 2 != 0)
        throw DimensionError("unembed_complex_rows: odd column count");
    MatrixX<cdouble> out(E.rows(), E.cols() / 2);
    for (Eigen::Index r = 0; r < E.rows(); ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            out(r, c) = cdouble(E(r, 2 * c), E(r, 2 * c + 1));
    return out;
}

} // namespace rbon
