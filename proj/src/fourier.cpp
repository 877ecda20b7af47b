#include "rbon/fourier.hpp"

#include <vector>

#include <unsupported/Eigen/FFT>

#include "rbon/errors.hpp"

namespace rbon {

VectorX<cdouble> to_frequency_domain(const Eigen::VectorXd& u)
{
    if (u.size() < 1)
        throw PreconditionError("to_frequency_domain: empty input");
    if (u.size() == 1)
        return VectorX<cdouble>::Constant(1, cdouble(u(0), 0.0));
    // Complex input keeps the full (not half) spectrum.
    std::vector<cdouble> in(u.data(), u.data() + u.size());
    std::vector<cdouble> out;
    Eigen::FFT<double> fft;
    fft.fwd(out, in);
    return Eigen::Map<const VectorX<cdouble>>(out.data(), static_cast<Eigen::Index>(out.size()));
}

VectorX<cdouble> from_frequency_domain(const VectorX<cdouble>& spectrum)
{
    if (spectrum.size() < 1)
        throw PreconditionError("from_frequency_domain: empty input");
    if (spectrum.size() == 1)
        return spectrum;
    std::vector<cdouble> in(spectrum.data(), spectrum.data() + spectrum.size());
    std::vector<cdouble> out;
    Eigen::FFT<double> fft;
    fft.inv(out, in);
    return Eigen::Map<const VectorX<cdouble>>(out.data(), static_cast<Eigen::Index>(out.size()));
}

MatrixX<cdouble> to_frequency_domain_rows(const Eigen::MatrixXd& U)
{
    MatrixX<cdouble> out(U.rows(), U.cols());
    for (Eigen::Index r = 0; r < U.rows(); ++r)
        out.row(r) = to_frequency_domain(U.row(r).transpose()).transpose();
    return out;
}

} // namespace rbon
