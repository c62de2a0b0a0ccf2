#pragma once

#include <array>
#include <functional>
#include <tuple>
#include <utility>
#include <vector>

#include "metastat/growth.hpp"

namespace metastat {

/// Sides of the square boundary, ordered as the emission sources are listed:
/// Gamma1 = left (x=1), Gamma2 = top (theta=b), Gamma3 = right (x=b),
/// Gamma4 = bottom (theta=1). Corners belong to no side.
enum class Side : int { Gamma1 = 1, Gamma2 = 2, Gamma3 = 3, Gamma4 = 4 };

/// Boundary point in chart coordinates (side, arc length s in (0, b-1)),
/// with the cached phase-space position, outward normal and G.nu <= 0.
struct BoundaryPoint {
    Side side;
    double s;
    PhasePoint position;
    std::array<double, 2> normal; ///< outward unit normal
    double g_dot_nu;              ///< G.nu at the point (negative on open sides)
};

/// Chart (side, s) -> boundary point. s must lie strictly inside (0, b-1).
BoundaryPoint chart(const GrowthParams& p, Side side, double s);

/// Inverse chart: phase point on the boundary -> (side, s). Points farther
/// than snap_tol from the boundary, or within snap_tol of a corner, are
/// rejected.
BoundaryPoint unchart(const GrowthParams& p, const PhasePoint& X, double snap_tol = 1e-12);

/// Arc positions of n per-side quadrature/lattice nodes: s_j = (j+1/2)(b-1)/n.
/// All nodes are strictly interior, so corner degeneracies never enter sums.
std::vector<double> side_nodes(const GrowthParams& p, int per_side);

/// Composite quadrature of f over the whole boundary on uniform per-side
/// midpoint nodes; order 2, exact for integrands linear on each panel.
double boundary_quadrature(const GrowthParams& p,
                           const std::function<double(const BoundaryPoint&)>& f,
                           int per_side);

/// Emission profile N(sigma): nonnegative, Lipschitz, compactly supported,
/// renormalized so its discrete boundary quadrature equals 1 exactly.
class EmissionProfile {
public:
    /// Triangular hat on Gamma1 centered at theta = (1+b)/2 with base width
    /// (b-1)/2 (area-1 hat before renormalization, peak 2/width).
    static EmissionProfile triangular_hat(const GrowthParams& p, int per_side);

    /// Hat with explicit center/width in arc coordinates on Gamma1.
    static EmissionProfile triangular_hat(const GrowthParams& p, int per_side,
                                          double center_s, double width);

    /// Piecewise-linear table profile: per-side (s, value) breakpoints,
    /// zero outside the tabulated range. First/last values must vanish
    /// (compact support) and all values must be nonnegative.
    static EmissionProfile from_table(
        const GrowthParams& p, int per_side,
        const std::vector<std::tuple<Side, double, double>>& rows);

    double operator()(const BoundaryPoint& sigma) const;
    double lipschitz_bound() const { return lipschitz_; }

private:
    EmissionProfile() = default;
    void renormalize(const GrowthParams& p, int per_side);

    // per side: sorted breakpoints (s, value); empty side == identically zero
    std::array<std::vector<std::pair<double, double>>, 4> table_;
    double scale_ = 1.0;
    double lipschitz_ = 0.0;
};

} // namespace metastat
