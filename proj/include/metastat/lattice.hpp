#pragma once

#include <cmath>
#include <vector>

#include "metastat/boundary.hpp"
#include "metastat/growth.hpp"
#include "metastat/parallel.hpp"

namespace metastat {

/// Colonization rate beta(x, theta) = m * x^alpha (alpha = 0 gives the
/// constant-rate law used by the analytic oracles).
struct BirthLaw {
    double m;
    double alpha;

    static BirthLaw make(double m, double alpha) {
        if (m < 0.0) throw std::domain_error("birth law: m must be nonnegative");
        return {m, alpha};
    }
    double operator()(const PhasePoint& X) const {
        return alpha == 0.0 ? m : m * std::pow(X.x, alpha);
    }
    /// Supremum over the closed square, attained at the equilibrium for
    /// alpha >= 0: beta* = m * b^alpha.
    double at_equilibrium(const GrowthParams& p) const {
        return alpha == 0.0 ? m : m * std::pow(p.b, alpha);
    }
};

/// Precomputed characteristic lattice: per boundary node sigma_j, the flow
/// positions, Jacobians and birth-rate samples at tau_i = i * dtau.
/// Rows i = 0..I (I panels), columns j = 0..J-1 (J/4 midpoint nodes per side).
struct CharacteristicLattice {
    GrowthParams params;
    BirthLaw beta;
    double tau_max = 0.0;
    double dtau = 0.0;
    double ds = 0.0;                   ///< arc spacing (uniform across sides)
    std::vector<BoundaryPoint> sigma;  ///< J nodes, corners excluded
    std::vector<double> emission;      ///< N(sigma_j), discrete integral == 1
    double beta_star = 0.0;            ///< beta at the equilibrium (tail value)

    // row-major [ (I+1) x J ]
    std::vector<PhasePoint> positions;
    std::vector<double> jacobians;
    std::vector<double> beta_vals;

    int rows() const { return static_cast<int>(positions.size() / sigma.size()); }
    int cols() const { return static_cast<int>(sigma.size()); }
    int idx(int i, int j) const { return i * cols() + j; }

    const PhasePoint& pos(int i, int j) const { return positions[idx(i, j)]; }
    double jac(int i, int j) const { return jacobians[idx(i, j)]; }
    double beta_at(int i, int j) const { return beta_vals[idx(i, j)]; }
    double tau(int i) const { return i * dtau; }
};

struct LatticeOptions {
    double ode_tol = 1e-10;
    double tau_max_override = 0.0; ///< 0 -> automatic selection
    Exec exec = Exec::OpenMP;
};

/// Automatic horizon: smallest tau at which every emission-support
/// characteristic is within 1e-3*(b-1) of the equilibrium, doubled.
double select_tau_max(const GrowthParams& p, const EmissionProfile& N, int J,
                      double ode_tol = 1e-10);

/// Builds the lattice: J/4 midpoint nodes per side (J divisible by 4),
/// I+1 tau rows. Throws if J is not divisible by 4 or I < 1.
CharacteristicLattice build_lattice(const GrowthParams& p, const EmissionProfile& N,
                                    const BirthLaw& beta, int I, int J,
                                    const LatticeOptions& opt = {});

} // namespace metastat
