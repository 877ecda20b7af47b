#include "rbon/pde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "rbon/errors.hpp"

namespace rbon {

namespace {

constexpr int kGaussOrder = 8;

struct GaussRule {
    std::array<double, kGaussOrder> nodes{};   // on [-1, 1]
    std::array<double, kGaussOrder> weights{};
};

// Legendre roots by Newton iteration from the Chebyshev guess.
GaussRule make_gauss_rule()
{
    GaussRule rule;
    const int n = kGaussOrder;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GaussRule& gauss_rule()
{
    static const GaussRule rule = make_gauss_rule();
    return rule;
}

double integrate(const ScalarFunction& f, double a, double b)
{
    const auto& g = gauss_rule();
    const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < kGaussOrder; ++i)
        s += g.weights[static_cast<std::size_t>(i)] * f(mid + h * g.nodes[static_cast<std::size_t>(i)]);
    return h * s;
}

} // namespace

BurgersSeries::BurgersSeries(ScalarFunction u0, double viscosity, const BurgersConfig& cfg)
    : u0_(std::move(u0)), nu_(viscosity), tol_(cfg.truncation_tol)
{
    if (!(viscosity > 0.0))
        throw PreconditionError("burgers: viscosity must be positive");
    if (cfg.quadrature_panels < 1 || cfg.max_terms < 1)
        throw PreconditionError("burgers: quadrature_panels and max_terms must be positive");
    if (cfg.grid.length != 1.0)
        throw PreconditionError("burgers: the series solution is defined on [0, 1]");

    const auto& g = gauss_rule();
    const int panels = cfg.quadrature_panels;
    const double h = 1.0 / panels;
    std::vector<double> xs, ws, exps;
    xs.reserve(static_cast<std::size_t>(panels) * kGaussOrder);
    double before = 0.0; // int_0^{panel start} u0
    for (int p = 0; p < panels; ++p) {
        const double a = p * h;
        for (int i = 0; i < kGaussOrder; ++i) {
            const double x = a + 0.5 * h * (1.0 + g.nodes[static_cast<std::size_t>(i)]);
            xs.push_back(x);
            ws.push_back(0.5 * h * g.weights[static_cast<std::size_t>(i)]);
            exps.push_back(-(before + integrate(u0_, a, x)) / (2.0 * nu_));
        }
        before += integrate(u0_, a, a + h);
    }
    // theta is only defined up to a constant factor, which cancels in u.
    const double shift = *std::max_element(exps.begin(), exps.end());
    std::vector<double> theta(exps.size());
    for (std::size_t q = 0; q < exps.size(); ++q) {
        theta[q] = std::exp(exps[q] - shift);
        if (!std::isfinite(theta[q]))
            throw NonFiniteError("burgers: initial condition produced a non-finite Cole-Hopf transform");
    }

    double a0 = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q)
        a0 += ws[q] * theta[q];
    coeffs_.push_back(a0);
    const double floor = 1e-2 * tol_ * std::abs(a0);
    int quiet = 0;
    for (int n = 1; n <= cfg.max_terms; ++n) {
        double an = 0.0;
        for (std::size_t q = 0; q < xs.size(); ++q)
            an += ws[q] * theta[q] * std::cos(n * std::numbers::pi * xs[q]);
        an *= 2.0;
        coeffs_.push_back(an);
        quiet = std::abs(an) < floor ? quiet + 1 : 0;
        if (quiet >= 8)
            break;
    }
    suffix_max_.assign(coeffs_.size(), 0.0);
    double run = 0.0;
    for (std::size_t n = coeffs_.size(); n-- > 0;) {
        run = std::max(run, std::abs(coeffs_[n]));
        suffix_max_[n] = run;
    }
}

int BurgersSeries::terms_needed(double t) const
{
    const int total = terms();
    const double scale = tol_ * std::abs(coeffs_[0]);
    for (int n = 1; n <= total; ++n) {
        const double decay = std::exp(-n * n * std::numbers::pi * std::numbers::pi * nu_ * t);
        if (n * suffix_max_[static_cast<std::size_t>(n)] * decay < scale)
            return n - 1;
    }
    return total;
}

double BurgersSeries::operator()(double t, double x) const
{
    if (t < 0.0)
        throw PreconditionError("burgers: t must be non-negative");
    if (t == 0.0)
        return u0_(x);
    const int n_max = terms_needed(t);
    double num = 0.0, den = coeffs_[0];
    for (int n = 1; n <= n_max; ++n) {
        const double e = coeffs_[static_cast<std::size_t>(n)] *
                         std::exp(-n * n * std::numbers::pi * std::numbers::pi * nu_ * t);
        num += n * e * std::sin(n * std::numbers::pi * x);
        den += e * std::cos(n * std::numbers::pi * x);
    }
    return 2.0 * nu_ * std::numbers::pi * num / den;
}

Eigen::MatrixXd BurgersSeries::evaluate(const GridSpec& grid) const
{
    grid.validate();
    const int n_all = terms();
    Eigen::MatrixXd s(n_all + 1, grid.nx), c(n_all + 1, grid.nx);
    for (int n = 0; n <= n_all; ++n)
        for (int j = 0; j < grid.nx; ++j) {
            s(n, j) = std::sin(n * std::numbers::pi * grid.x(j));
            c(n, j) = std::cos(n * std::numbers::pi * grid.x(j));
        }
    Eigen::MatrixXd out(grid.nt, grid.nx);
    for (int i = 0; i < grid.nt; ++i) {
        const double t = grid.t(i);
        if (t == 0.0) {
            for (int j = 0; j < grid.nx; ++j)
                out(i, j) = u0_(grid.x(j));
            continue;
        }
        const int n_max = terms_needed(t);
        Eigen::RowVectorXd num = Eigen::RowVectorXd::Zero(grid.nx);
        Eigen::RowVectorXd den = Eigen::RowVectorXd::Constant(grid.nx, coeffs_[0]);
        for (int n = 1; n <= n_max; ++n) {
            const double e = coeffs_[static_cast<std::size_t>(n)] *
                             std::exp(-n * n * std::numbers::pi * std::numbers::pi * nu_ * t);
            num += (n * e) * s.row(n);
            den += e * c.row(n);
        }
        out.row(i) = (2.0 * nu_ * std::numbers::pi) * num.cwiseQuotient(den);
    }
    return out;
}

SolutionField solve_burgers(const ScalarFunction& u0, const BurgersConfig& cfg)
{
    cfg.grid.validate();
    BurgersSeries series(u0, cfg.viscosity, cfg);
    SolutionField f;
    f.grid = cfg.grid;
    f.family = "burgers";
    f.values = series.evaluate(cfg.grid);
    if (!f.values.allFinite())
        throw NonFiniteError("burgers: series produced non-finite values");
    return f;
}

} // namespace rbon
