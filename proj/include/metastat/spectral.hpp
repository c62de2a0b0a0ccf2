#pragma once

#include <vector>

#include "metastat/lattice.hpp"

namespace metastat {

/// Thrown when the renewal process cannot sustain growth (F(lambda) <= 1 for
/// all positive lambda down to the probe); carries the probed value.
class SubcriticalError : public std::domain_error {
public:
    SubcriticalError(const std::string& what, double f_probe)
        : std::domain_error(what), f_probe_(f_probe) {}
    double f_probe() const { return f_probe_; }

private:
    double f_probe_;
};

/// Exact panel moments of the exponential weight:
///   p0 = integral_0^h e^{-lambda u} du
///   p1 = integral_0^h u e^{-lambda u} du
/// Series fallback keeps them accurate when lambda*h is tiny.
double exp_panel_p0(double lambda, double h);
double exp_panel_p1(double lambda, double h);

/// Laplace transform F(lambda) = integral_0^inf K(tau) e^{-lambda tau} dtau
/// of the lattice-sampled kernel: piecewise-linear K on [0, tau_max] with the
/// weight integrated exactly per panel, plus the saturated analytic tail
/// beta_star e^{-lambda tau_max} / lambda. Exact for constant kernels.
double laplace_F(const std::vector<double>& K, double dtau, double beta_star, double lambda);

/// d/dlambda by the same product quadrature applied to -tau*K(tau); agrees with
/// the exact derivative of laplace_F to O((lambda*dtau)^2), which is all the
/// Newton update needs (the root residual is judged by laplace_F itself).
double laplace_F_prime(const std::vector<double>& K, double dtau, double beta_star,
                       double lambda);

/// Malthus exponent: the unique positive root of F(lambda) = 1. The problem
/// must be supercritical at the probe lambda = 1e-3*(a+c); bracketing +
/// bisection refined by Newton, converged to |F(lambda0)-1| <= root_tol.
double solve_malthus(const CharacteristicLattice& lat, double root_tol = 1e-12);

/// Direct/adjoint eigenpair on the lattice.
struct SpectralSolution {
    double lambda0 = 0.0;
    double C = 0.0;        ///< normalization of the direct eigenvector
    double residual = 0.0; ///< |F(lambda0) - 1|
    std::vector<double> psi; ///< adjoint weight on the lattice, [I+1][J]
    double psi_min = 0.0;
    double psi_max = 0.0;
    bool bounds_ok = false; ///< beta_min/lambda0 <= psi <= beta_max/lambda0

    /// Direct eigenvector in lattice coordinates: C * N(sigma_j) * e^{-lambda0 tau_i}.
    double vtilde(const CharacteristicLattice& lat, int i, int j) const {
        return C * lat.emission[j] * std::exp(-lambda0 * lat.tau(i));
    }
    double psi_at(const CharacteristicLattice& lat, int i, int j) const {
        return psi[size_t(i) * lat.cols() + j];
    }
};

/// Survival-weighted future birth potential along each characteristic:
/// psi(tau) = integral_0^inf beta(Phi_{tau+u}) e^{-lambda0 u} du, evaluated
/// by the backward panel recursion (overflow-safe for any tau).
std::vector<double> adjoint_eigenvector(const CharacteristicLattice& lat, double lambda0,
                                        Exec exec = Exec::OpenMP);

/// Normalization constant C with integral over the lattice (plus analytic
/// tau > tau_max tail) of N e^{-lambda0 tau} psi equal to 1.
double normalize_constant(const CharacteristicLattice& lat, double lambda0,
                          const std::vector<double>& psi);

/// Max interior-node defect of the characteristic ODE
/// d(psi)/dtau = lambda0 psi - beta * (integral of N psi on the boundary).
double adjoint_residual(const CharacteristicLattice& lat, double lambda0,
                        const std::vector<double>& psi);

/// Full spectral solve (root + eigenpair + normalization + bound checks).
SpectralSolution solve_spectral(const CharacteristicLattice& lat, double root_tol = 1e-12,
                                Exec exec = Exec::OpenMP);

} // namespace metastat
