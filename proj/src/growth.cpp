#include "metastat/growth.hpp"

#include <algorithm>
#include <cmath>

#include "metastat/boundary.hpp"
#include "metastat/ode.hpp"

namespace metastat {

GrowthParams GrowthParams::make(double a, double c, double d) {
    if (!(a > 0.0) || !(c > 0.0) || !(d > 0.0))
        throw std::domain_error("growth parameters must satisfy a, c, d > 0");
    const double b = std::pow(c / d, 1.5);
    if (!(b > 1.0))
        throw std::domain_error("carrying capacity b = (c/d)^{3/2} must exceed 1 (need c > d)");
    return GrowthParams{a, c, d, b};
}

PhasePoint velocity(const GrowthParams& p, const PhasePoint& X) {
    const double g1 = p.a * X.x * std::log(X.theta / X.x);
    const double g2 = p.c * X.x - p.d * X.theta * std::cbrt(X.x * X.x);
    return {g1, g2};
}

double divergence(const GrowthParams& p, const PhasePoint& X) {
    return p.a * (std::log(X.theta / X.x) - 1.0) - p.d * std::cbrt(X.x * X.x);
}

namespace {

// Clamp a coordinate to [1, b]; overshoot beyond 1e-12*b means the
// integrator left the invariant square, which is a numerical failure.
double clamp_coord(double v, double b) {
    const double slack = 1e-12 * b;
    if (v < 1.0) {
        if (1.0 - v > slack)
            throw NumericalError("flow: trajectory left Omega (coordinate " +
                                 std::to_string(v) + " below 1)");
        return 1.0;
    }
    if (v > b) {
        if (v - b > slack)
            throw NumericalError("flow: trajectory left Omega (coordinate " +
                                 std::to_string(v) + " above b)");
        return b;
    }
    return v;
}

struct FlowRhs {
    GrowthParams p;
    void operator()(double, const std::array<double, 3>& y, std::array<double, 3>& dy) const {
        const PhasePoint X{y[0], y[1]};
        const PhasePoint G = velocity(p, X);
        dy[0] = G.x;
        dy[1] = G.theta;
        dy[2] = divergence(p, X);
    }
};

struct BackwardRhs {
    GrowthParams p;
    void operator()(double, const std::array<double, 2>& y, std::array<double, 2>& dy) const {
        const PhasePoint G = velocity(p, {y[0], y[1]});
        dy[0] = -G.x;
        dy[1] = -G.theta;
    }
};

double guard_of(const GrowthParams& p, const FlowOptions& opt) {
    return opt.guard_radius > 0.0 ? opt.guard_radius : 1e-6 * p.b;
}

} // namespace

std::vector<FlowResult> flow_samples(const GrowthParams& p, const BoundaryPoint& sigma,
                                     const std::vector<double>& taus, const FlowOptions& opt) {
    using Ode = Dopri5<3, FlowRhs>;
    Ode::Options oo;
    oo.rtol = opt.tol;
    oo.atol = opt.tol * 1e-2;
    oo.max_steps = opt.max_steps;
    const double speed = std::abs(sigma.g_dot_nu);
    Ode ode(FlowRhs{p}, 0.0, {sigma.position.x, sigma.position.theta, 0.0}, oo);

    std::vector<FlowResult> out;
    out.reserve(taus.size());
    double prev = 0.0;
    for (double tau : taus) {
        if (tau < 0.0) throw std::domain_error("flow: tau must be nonnegative");
        if (tau < prev) throw std::domain_error("flow: tau samples must be nondecreasing");
        prev = tau;
        if (tau > 0.0) ode.advance_to(tau);
        const auto& y = ode.y();
        FlowResult r;
        r.position = {clamp_coord(y[0], p.b), clamp_coord(y[1], p.b)};
        r.div_integral = y[2];
        r.jacobian = speed * std::exp(y[2]);
        out.push_back(r);
    }
    return out;
}

FlowResult flow(const GrowthParams& p, const BoundaryPoint& sigma, double tau,
                const FlowOptions& opt) {
    return flow_samples(p, sigma, {tau}, opt).front();
}

std::pair<double, BoundaryPoint> inverse_flow(const GrowthParams& p, const PhasePoint& X,
                                              const FlowOptions& opt) {
    const double b = p.b;
    if (X.x < 1.0 || X.x > b || X.theta < 1.0 || X.theta > b)
        throw std::domain_error("inverse_flow: point outside the closed square");

    const double guard = guard_of(p, opt);
    const double dx = X.x - b, dth = X.theta - b;
    if (std::sqrt(dx * dx + dth * dth) < guard)
        throw SingularityError("inverse_flow: point inside the equilibrium guard ball "
                               "(entry time diverges)");

    // distance-to-boundary function; zero crossing = entry point
    auto wall = [b](const std::array<double, 2>& y) {
        return std::min(std::min(y[0] - 1.0, b - y[0]), std::min(y[1] - 1.0, b - y[1]));
    };

    const double snap = 1e-12 * (b - 1.0);
    if (wall({X.x, X.theta}) <= snap)
        return {0.0, unchart(p, X, 1e-9 * (b - 1.0))};

    using Ode = Dopri5<2, BackwardRhs>;
    Ode::Options oo;
    oo.rtol = opt.tol;
    oo.atol = opt.tol * 1e-2;
    oo.max_steps = opt.max_steps;
    Ode ode(BackwardRhs{p}, 0.0, {X.x, X.theta}, oo);

    const double s_max = 1e4;
    while (wall(ode.y()) > 0.0) {
        if (ode.t() > s_max)
            throw NumericalError("inverse_flow: no boundary crossing before s_max");
        ode.step(s_max);
    }

    // bisect the dense interpolant of the crossing step
    double lo = ode.prev_t(), hi = ode.t();
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (wall(ode.dense(mid)) > 0.0 ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    auto yc = ode.dense(tau);
    PhasePoint entry{std::clamp(yc[0], 1.0, b), std::clamp(yc[1], 1.0, b)};
    return {tau, unchart(p, entry, 1e-7 * (b - 1.0))};
}

std::vector<PhasePoint> primary_tumor(const GrowthParams& p, const PhasePoint& x0,
                                      const std::vector<double>& t_grid,
                                      const FlowOptions& opt) {
    if (x0.x < 1.0 || x0.x > p.b || x0.theta < 1.0 || x0.theta > p.b)
        throw std::domain_error("primary_tumor: x0 outside the closed square");
    struct Rhs {
        GrowthParams p;
        void operator()(double, const std::array<double, 2>& y, std::array<double, 2>& dy) const {
            const PhasePoint G = velocity(p, {y[0], y[1]});
            dy[0] = G.x;
            dy[1] = G.theta;
        }
    };
    using Ode = Dopri5<2, Rhs>;
    Ode::Options oo;
    oo.rtol = opt.tol;
    oo.atol = opt.tol * 1e-2;
    oo.max_steps = opt.max_steps;
    Ode ode(Rhs{p}, 0.0, {x0.x, x0.theta}, oo);

    std::vector<PhasePoint> out;
    out.reserve(t_grid.size());
    double prev = 0.0;
    for (double t : t_grid) {
        if (t < prev) throw std::domain_error("primary_tumor: t_grid must be nondecreasing");
        if (t > prev) ode.advance_to(t);
        prev = t;
        out.push_back({clamp_coord(ode.y()[0], p.b), clamp_coord(ode.y()[1], p.b)});
    }
    return out;
}

} // namespace metastat
