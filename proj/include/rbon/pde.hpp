#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rbon {

/// Uniform tensor grid on [0, t_final] x [0, length], endpoints included.
struct GridSpec {
    double t_final = 1.0;
    double length = 1.0;
    int nt = 64;
    int nx = 64;

    void validate() const;
    [[nodiscard]] double dt() const { return t_final / (nt - 1); }
    [[nodiscard]] double dx() const { return length / (nx - 1); }
    [[nodiscard]] double t(int i) const { return t_final * i / (nt - 1); }
    [[nodiscard]] double x(int j) const { return length * j / (nx - 1); }
    /// (nt*nx) x 2 matrix of (t, x) pairs, t-major: row i*nx + j is (t_i, x_j).
    [[nodiscard]] Eigen::MatrixXd points() const;
};

/// u(t_i, x_j) stored as values(i, j).
struct SolutionField {
    GridSpec grid;
    Eigen::MatrixXd values;
    std::string family;
    double parameter = 0.0;

    /// Row-major flattening matching GridSpec::points().
    [[nodiscard]] Eigen::VectorXd flattened() const;
};

using ScalarFunction = std::function<double(double)>;

// ---- wave ------------------------------------------------------------------

/// 2 exp(-(x - L/2)^2) + a x / L
double wave_initial(double a, double x, double length);

struct WaveConfig {
    double speed = 1.0;
    GridSpec grid{1.0, 1.0, 505, 253};
};

/// Leapfrog central differences for u_tt = c^2 u_xx with zero initial
/// velocity and Dirichlet values held at u0(0) and u0(L).
/// Throws StabilityError when c dt / dx > 1.
SolutionField solve_wave(const ScalarFunction& u0, const WaveConfig& cfg);
SolutionField solve_wave(double a, const WaveConfig& cfg);

// ---- Burgers ---------------------------------------------------------------

struct BurgersConfig {
    double viscosity = 0.1;
    GridSpec grid{1.0, 1.0, 64, 64};
    int quadrature_panels = 256;
    double truncation_tol = 1e-14;
    int max_terms = 1024;
};

/// Exact solution of u_t + u u_x = nu u_xx on [0, 1] with u(t, 0) = u(t, 1) = 0
/// via the Cole-Hopf transform. theta solves the heat equation with
/// theta(0, x) = exp(-(1/(2 nu)) int_0^x u0), expanded in a cosine series whose
/// coefficients are computed by composite Gauss-Legendre quadrature.
class BurgersSeries {
public:
    BurgersSeries(ScalarFunction u0, double viscosity, const BurgersConfig& cfg = {});

    /// u(t, x); at t = 0 this returns u0(x) itself.
    [[nodiscard]] double operator()(double t, double x) const;
    [[nodiscard]] Eigen::MatrixXd evaluate(const GridSpec& grid) const;
    [[nodiscard]] int terms() const { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }

private:
    [[nodiscard]] int terms_needed(double t) const;

    ScalarFunction u0_;
    double nu_;
    double tol_;
    std::vector<double> coeffs_;     ///< A_0, A_1, ...
    std::vector<double> suffix_max_; ///< max_{m >= n} |A_m|
};

SolutionField solve_burgers(const ScalarFunction& u0, const BurgersConfig& cfg);

// ---- Euler-Bernoulli beam --------------------------------------------------

/// a exp(-k x) (1 - 10^2) sin(10 t)
double beam_forcing(double a, double k, double t, double x);

/// Manufactured solution a exp(-k x) sin(10 t).
double beam_solution(double a, double k, double t, double x);

struct BeamConstants {
    double flexural_rigidity; ///< EI
    double mass_per_length;   ///< rho A
};

/// EI = k^-4, rho A = 1: the constants for which beam_solution satisfies
/// EI u_xxxx + rho A u_tt = beam_forcing exactly.
BeamConstants beam_constants(double k);

SolutionField solve_beam(double a, double k, const GridSpec& grid);

} // namespace rbon
