#pragma once

#include <utility>
#include <vector>

#include "metastat/errors.hpp"

namespace metastat {

/// Point of the state space Omega = [1,b] x [1,b]:
/// x = tumor size, theta = angiogenic capacity.
struct PhasePoint {
    double x = 1.0;
    double theta = 1.0;
};

/// Growth/angiogenesis parameter set. b = (c/d)^{3/2} is the shared
/// carrying capacity; (b,b) is the unique interior-attracting equilibrium.
struct GrowthParams {
    double a; ///< tumor growth rate
    double c; ///< stimulation rate
    double d; ///< inhibition rate
    double b; ///< carrying capacity, derived

    /// Validates a,c,d > 0 and b > 1 (i.e. c > d).
    static GrowthParams make(double a, double c, double d);
};

/// Velocity field G(x, theta) of the structured growth dynamics.
PhasePoint velocity(const GrowthParams& p, const PhasePoint& X);

/// div G, used to transport the flow Jacobian.
double divergence(const GrowthParams& p, const PhasePoint& X);

struct BoundaryPoint; // boundary.hpp

/// Result of following the characteristic from a boundary point for time tau.
/// jacobian == |G.nu(sigma)| * exp(div_integral) by construction; both are
/// reported so the identity stays checkable.
struct FlowResult {
    PhasePoint position;
    double jacobian;
    double div_integral;
};

struct FlowOptions {
    double tol = 1e-10;        ///< local error tolerance of the integrator
    double guard_radius = 0.0; ///< 0 -> default 1e-6 * b
    long max_steps = 2000000;
};

/// Characteristic flow Phi_tau(sigma) from a boundary point, with the
/// accumulated divergence integral (log of the area-change factor).
FlowResult flow(const GrowthParams& p, const BoundaryPoint& sigma, double tau,
                const FlowOptions& opt = {});

/// Flow sampled at all given tau values (single integration pass).
std::vector<FlowResult> flow_samples(const GrowthParams& p, const BoundaryPoint& sigma,
                                     const std::vector<double>& taus,
                                     const FlowOptions& opt = {});

/// Inverse of the flow chart: entry time and entry boundary point of the
/// (unique) characteristic through an interior point. Points inside the
/// equilibrium guard ball are rejected (entry time diverges there).
std::pair<double, BoundaryPoint> inverse_flow(const GrowthParams& p, const PhasePoint& X,
                                              const FlowOptions& opt = {});

/// Primary tumor trajectory X_p(t) sampled on t_grid (x0 in closed Omega).
std::vector<PhasePoint> primary_tumor(const GrowthParams& p, const PhasePoint& x0,
                                      const std::vector<double>& t_grid,
                                      const FlowOptions& opt = {});

} // namespace metastat
