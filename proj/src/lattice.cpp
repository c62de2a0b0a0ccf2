#include "metastat/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "metastat/ode.hpp"

namespace metastat {

namespace {

std::vector<BoundaryPoint> lattice_nodes(const GrowthParams& p, int J) {
    if (J < 8 || J % 4 != 0)
        throw std::domain_error("lattice: J must be a multiple of 4 and at least 8");
    const int per_side = J / 4;
    const auto s = side_nodes(p, per_side);
    std::vector<BoundaryPoint> nodes;
    nodes.reserve(J);
    for (Side side : {Side::Gamma1, Side::Gamma2, Side::Gamma3, Side::Gamma4})
        for (double sj : s) nodes.push_back(chart(p, side, sj));
    return nodes;
}

} // namespace

double select_tau_max(const GrowthParams& p, const EmissionProfile& N, int J,
                      double ode_tol) {
    const auto nodes = lattice_nodes(p, J);
    const double thresh = 1e-3 * (p.b - 1.0);
    const double thresh2 = thresh * thresh;

    struct Rhs {
        GrowthParams p;
        void operator()(double, const std::array<double, 2>& y, std::array<double, 2>& dy) const {
            const PhasePoint G = velocity(p, {y[0], y[1]});
            dy[0] = G.x;
            dy[1] = G.theta;
        }
    };

    double worst = 0.0;
    bool any = false;
    for (const auto& sigma : nodes) {
        if (N(sigma) <= 0.0) continue;
        any = true;
        using Ode = Dopri5<2, Rhs>;
        Ode::Options oo;
        oo.rtol = ode_tol;
        oo.atol = ode_tol * 1e-2;
        Ode ode(Rhs{p}, 0.0, {sigma.position.x, sigma.position.theta}, oo);
        const double t_cap = 1e5;
        for (;;) {
            const double dx = ode.y()[0] - p.b, dt = ode.y()[1] - p.b;
            if (dx * dx + dt * dt < thresh2) break;
            if (ode.t() > t_cap)
                throw NumericalError("tau_max selection: characteristic failed to reach "
                                     "the equilibrium neighborhood");
            ode.step(t_cap);
        }
        worst = std::max(worst, ode.t());
    }
    if (!any) throw std::domain_error("tau_max selection: emission profile has no support node");
    return 2.0 * worst;
}

CharacteristicLattice build_lattice(const GrowthParams& p, const EmissionProfile& N,
                                    const BirthLaw& beta, int I, int J,
                                    const LatticeOptions& opt) {
    if (I < 1) throw std::domain_error("lattice: need at least one tau panel");
    CharacteristicLattice lat;
    lat.params = p;
    lat.beta = beta;
    lat.sigma = lattice_nodes(p, J);
    lat.ds = (p.b - 1.0) / (J / 4);
    lat.tau_max = opt.tau_max_override > 0.0
                      ? opt.tau_max_override
                      : select_tau_max(p, N, J, opt.ode_tol);
    lat.dtau = lat.tau_max / I;
    lat.beta_star = beta.at_equilibrium(p);

    lat.emission.resize(J);
    for (int j = 0; j < J; ++j) lat.emission[j] = N(lat.sigma[j]);

    const int rows = I + 1;
    lat.positions.resize(static_cast<size_t>(rows) * J);
    lat.jacobians.resize(static_cast<size_t>(rows) * J);
    lat.beta_vals.resize(static_cast<size_t>(rows) * J);

    std::vector<double> taus(rows);
    for (int i = 0; i < rows; ++i) taus[i] = i * lat.dtau;

    FlowOptions fo;
    fo.tol = opt.ode_tol;

    for_each_index(opt.exec, J, [&](int j) {
        const auto samples = flow_samples(p, lat.sigma[j], taus, fo);
        for (int i = 0; i < rows; ++i) {
            const auto& r = samples[i];
            lat.positions[lat.idx(i, j)] = r.position;
            lat.jacobians[lat.idx(i, j)] = r.jacobian;
            lat.beta_vals[lat.idx(i, j)] = beta(r.position);
        }
    });
    return lat;
}

} // namespace metastat
