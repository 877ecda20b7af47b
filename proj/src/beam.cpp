#include "rbon/pde.hpp"

#include <cmath>

#include "rbon/errors.hpp"

namespace rbon {

namespace {
constexpr double kOmega = 10.0;
}

double beam_forcing(double a, double k, double t, double x)
{
    return a * std::exp(-k * x) * (1.0 - kOmega * kOmega) * std::sin(kOmega * t);
}

double beam_solution(double a, double k, double t, double x)
{
    return a * std::exp(-k * x) * std::sin(kOmega * t);
}

BeamConstants beam_constants(double k)
{
    if (!(k > 0.0))
        throw PreconditionError("beam: k must be positive");
    return {1.0 / (k * k * k * k), 1.0};
}

SolutionField solve_beam(double a, double k, const GridSpec& grid)
{
    grid.validate();
    beam_constants(k);
    SolutionField f;
    f.grid = grid;
    f.family = "beam";
    f.parameter = a;
    f.values.resize(grid.nt, grid.nx);
    for (int i = 0; i < grid.nt; ++i)
        for (int j = 0; j < grid.nx; ++j)
            f.values(i, j) = beam_solution(a, k, grid.t(i), grid.x(j));
    return f;
}

} // namespace rbon
