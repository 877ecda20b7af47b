#include "rbon/pde.hpp"

#include <cmath>
#include <string>

#include "rbon/errors.hpp"

namespace rbon {

void GridSpec::validate() const
{
    if (!(t_final > 0.0) || !(length > 0.0))
        throw PreconditionError("grid: t_final and length must be positive");
    if (nt < 3 || nx < 3)
        throw PreconditionError("grid: nt and nx must be at least 3");
}

Eigen::MatrixXd GridSpec::points() const
{
    Eigen::MatrixXd p(static_cast<Eigen::Index>(nt) * nx, 2);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nx; ++j) {
            p(static_cast<Eigen::Index>(i) * nx + j, 0) = t(i);
            p(static_cast<Eigen::Index>(i) * nx + j, 1) = x(j);
        }
    return p;
}

Eigen::VectorXd SolutionField::flattened() const
{
    Eigen::VectorXd v(values.size());
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        v.segment(i * values.cols(), values.cols()) = values.row(i).transpose();
    return v;
}

double wave_initial(double a, double x, double length)
{
    if (!(length > 0.0))
        throw PreconditionError("wave_initial: length must be positive");
    const double s = x - 0.5 * length;
    return 2.0 * std::exp(-s * s) + a * x / length;
}

SolutionField solve_wave(const ScalarFunction& u0, const WaveConfig& cfg)
{
    const GridSpec& g = cfg.grid;
    g.validate();
    const double r = cfg.speed * g.dt() / g.dx();
    if (r > 1.0 + 1e-12)
        throw StabilityError("solve_wave: CFL number c*dt/dx = " + std::to_string(r) + " exceeds 1");
    const double r2 = r * r;

    SolutionField out;
    out.grid = g;
    out.family = "wave";
    out.values.resize(g.nt, g.nx);
    for (int j = 0; j < g.nx; ++j)
        out.values(0, j) = u0(g.x(j));
    const double left = out.values(0, 0);
    const double right = out.values(0, g.nx - 1);

    auto& U = out.values;
    // Zero initial velocity: Taylor start u^1 = u^0 + (r^2 / 2) delta^2 u^0.
    U(1, 0) = left;
    U(1, g.nx - 1) = right;
    for (int j = 1; j < g.nx - 1; ++j)
        U(1, j) = U(0, j) + 0.5 * r2 * (U(0, j + 1) - 2.0 * U(0, j) + U(0, j - 1));
    for (int n = 1; n + 1 < g.nt; ++n) {
        U(n + 1, 0) = left;
        U(n + 1, g.nx - 1) = right;
        for (int j = 1; j < g.nx - 1; ++j)
            U(n + 1, j) = 2.0 * U(n, j) - U(n - 1, j) + r2 * (U(n, j + 1) - 2.0 * U(n, j) + U(n, j - 1));
    }
    return out;
}

SolutionField solve_wave(double a, const WaveConfig& cfg)
{
    const double length = cfg.grid.length;
    SolutionField f = solve_wave([a, length](double x) { return wave_initial(a, x, length); }, cfg);
    f.parameter = a;
    return f;
}

} // namespace rbon
