#pragma once

#include <functional>
#include <string>
#include <vector>

#include "metastat/lattice.hpp"

namespace metastat {

/// Boundary source f(t, sigma) sampled on the run's time grid x sigma nodes.
/// Row-major [n_t+1][J]. Built by the run assembly (none / primary-tumor
/// seeding / tabulated).
struct SourceSamples {
    std::vector<double> values; ///< empty == identically zero
    int cols = 0;

    bool empty() const { return values.empty(); }
    double at(int n, int j) const { return values.empty() ? 0.0 : values[size_t(n) * cols + j]; }
};

/// Renewal kernel K(tau_i) = sum_j ds * N(sigma_j) * beta(Phi_tau_i(sigma_j)).
std::vector<double> kernel(const CharacteristicLattice& lat);

/// Forcing from the initial cohort: g0(t_n) = integral over tau > t_n of
/// beta * rho0izable (the initial data shifted by t_n). Trapezoid in tau on the
/// surviving range; zero (with a warning flag) once t_n exceeds tau_max.
std::vector<double> initial_tail(const CharacteristicLattice& lat,
                                 const std::vector<double>& rho0_tilde, int n_t);

/// Product-trapezoid march for B = K*B + g on the uniform grid with
/// step dtau. Requires 0.5*dtau*K[0] < 1 (else StepSizeError suggesting a
/// halved step). B[n] uses K up to min(n, I); contributions older than
/// tau_max are truncated (saturated cohort).
std::vector<double> solve_birth_rate(const std::vector<double>& K,
                                     const std::vector<double>& g, double dtau);

/// Density in lattice coordinates for all grid times; storage [n_t+1][I+1][J].
/// rho(t_n, tau_i, sigma_j) is a pure index shift of the boundary history and
/// the initial data (no interpolation anywhere).
struct DensityField {
    const CharacteristicLattice* lat = nullptr;
    double dt = 0.0; ///< == lat->dtau (aligned grids)
    int n_t = 0;     ///< time panels; times t_n = n*dt, n = 0..n_t
    std::vector<double> B;          ///< boundary birth rate, size n_t+1
    std::vector<double> rho0_tilde; ///< initial data, [I+1][J]
    SourceSamples source;           ///< f samples, [n_t+1][J] (may be empty)
    std::vector<double> rho_tilde;  ///< [n_t+1][I+1][J]

    double value(int n, int i, int j) const {
        return rho_tilde[(size_t(n) * (lat->rows()) + i) * lat->cols() + j];
    }
    double time(int n) const { return n * dt; }

    /// Branch-aware lattice integral at time t_n:
    /// sum_j ds * trapz_tau of term(v, i, j), where the two one-sided limits
    /// at the interface tau = t_n each carry half a node weight.
    /// term receives the field value and the node indices.
    double integrate(const std::function<double(double, int, int)>& term, int n) const;
};

/// Assembles the field from the marched boundary series (exact transport).
DensityField reconstruct(const CharacteristicLattice& lat, const std::vector<double>& B,
                         const std::vector<double>& rho0_tilde, const SourceSamples& source,
                         Exec exec = Exec::OpenMP);

/// Physical-coordinates density at an off-lattice point: inverse flow, then
/// bilinear interpolation of rho_tilde in (tau, s) divided by the local
/// Jacobian. Points in the equilibrium guard ball or beyond the lattice
/// tau-coverage are rejected (SingularityError).
double to_physical(const DensityField& field, int n, const PhasePoint& X,
                   const FlowOptions& opt = {});

/// integral of rho(t_n) * w over Omega, evaluated on the lattice
/// (w == 1 gives the total metastatic mass).
double weighted_mass(const DensityField& field, int n,
                     const std::function<double(const PhasePoint&)>& w);

/// Total mass of the initial cohort beyond tau_max - t_n (what truncation
/// has discarded by time t_n), as a fraction of the initial mass.
double truncated_initial_fraction(const DensityField& field, int n);

} // namespace metastat
