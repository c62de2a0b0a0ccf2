#include "metastat/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace metastat {

namespace {

PhasePoint side_position(const GrowthParams& p, Side side, double s) {
    switch (side) {
        case Side::Gamma1: return {1.0, 1.0 + s};
        case Side::Gamma2: return {1.0 + s, p.b};
        case Side::Gamma3: return {p.b, p.b - s};
        case Side::Gamma4: return {p.b - s, 1.0};
    }
    throw std::domain_error("chart: invalid side");
}

std::array<double, 2> side_normal(Side side) {
    switch (side) {
        case Side::Gamma1: return {-1.0, 0.0};
        case Side::Gamma2: return {0.0, 1.0};
        case Side::Gamma3: return {1.0, 0.0};
        case Side::Gamma4: return {0.0, -1.0};
    }
    throw std::domain_error("chart: invalid side");
}

} // namespace

BoundaryPoint chart(const GrowthParams& p, Side side, double s) {
    const double L = p.b - 1.0;
    if (!(s > 0.0) || !(s < L))
        throw std::domain_error("chart: arc coordinate must lie strictly inside (0, b-1); "
                                "corners are excluded");
    BoundaryPoint bp;
    bp.side = side;
    bp.s = s;
    bp.position = side_position(p, side, s);
    bp.normal = side_normal(side);
    const PhasePoint G = velocity(p, bp.position);
    bp.g_dot_nu = G.x * bp.normal[0] + G.theta * bp.normal[1];
    return bp;
}

BoundaryPoint unchart(const GrowthParams& p, const PhasePoint& X, double snap_tol) {
    const double b = p.b, L = b - 1.0;
    struct Cand {
        Side side;
        double dist;
        double s;
    };
    const Cand cands[4] = {
        {Side::Gamma1, std::abs(X.x - 1.0), X.theta - 1.0},
        {Side::Gamma2, std::abs(X.theta - b), X.x - 1.0},
        {Side::Gamma3, std::abs(X.x - b), b - X.theta},
        {Side::Gamma4, std::abs(X.theta - 1.0), b - X.x},
    };
    int best = 0, second = 1;
    for (int i = 1; i < 4; ++i) {
        if (cands[i].dist < cands[best].dist) {
            second = best;
            best = i;
        } else if (cands[i].dist < cands[second].dist) {
            second = i;
        }
    }
    if (cands[best].dist > snap_tol)
        throw std::domain_error("unchart: point is not on the boundary");
    if (cands[second].dist <= snap_tol)
        throw std::domain_error("unchart: corner points belong to no side");
    double s = cands[best].s;
    if (s <= -snap_tol || s >= L + snap_tol)
        throw std::domain_error("unchart: arc coordinate outside the side");
    const double eps = 1e-13 * L;
    s = std::clamp(s, eps, L - eps);
    return chart(p, cands[best].side, s);
}

std::vector<double> side_nodes(const GrowthParams& p, int per_side) {
    if (per_side < 2)
        throw std::domain_error("boundary quadrature needs at least 2 nodes per side");
    const double L = p.b - 1.0;
    const double ds = L / per_side;
    std::vector<double> s(per_side);
    for (int j = 0; j < per_side; ++j) s[j] = (j + 0.5) * ds;
    return s;
}

double boundary_quadrature(const GrowthParams& p,
                           const std::function<double(const BoundaryPoint&)>& f,
                           int per_side) {
    const auto nodes = side_nodes(p, per_side);
    const double ds = (p.b - 1.0) / per_side;
    double total = 0.0;
    for (Side side : {Side::Gamma1, Side::Gamma2, Side::Gamma3, Side::Gamma4}) {
        double acc = 0.0;
        for (double s : nodes) acc += f(chart(p, side, s));
        total += acc * ds;
    }
    return total;
}

EmissionProfile EmissionProfile::triangular_hat(const GrowthParams& p, int per_side) {
    const double L = p.b - 1.0;
    return triangular_hat(p, per_side, 0.5 * L, 0.5 * L);
}

EmissionProfile EmissionProfile::triangular_hat(const GrowthParams& p, int per_side,
                                                double center_s, double width) {
    const double L = p.b - 1.0;
    if (!(width > 0.0) || center_s - 0.5 * width <= 0.0 || center_s + 0.5 * width >= L)
        throw std::domain_error("emission hat support must lie strictly inside Gamma1");
    EmissionProfile prof;
    prof.table_[0] = {{center_s - 0.5 * width, 0.0},
                      {center_s, 2.0 / width},
                      {center_s + 0.5 * width, 0.0}};
    prof.renormalize(p, per_side);
    return prof;
}

EmissionProfile EmissionProfile::from_table(
    const GrowthParams& p, int per_side,
    const std::vector<std::tuple<Side, double, double>>& rows) {
    const double L = p.b - 1.0;
    EmissionProfile prof;
    for (const auto& [side, s, v] : rows) {
        if (!(s > 0.0) || !(s < L))
            throw ConfigError("emission table: arc coordinate outside the open side");
        if (v < 0.0) throw ConfigError("emission table: negative profile value");
        prof.table_[static_cast<int>(side) - 1].push_back({s, v});
    }
    bool any = false;
    for (auto& tab : prof.table_) {
        if (tab.empty()) continue;
        std::sort(tab.begin(), tab.end());
        for (size_t i = 1; i < tab.size(); ++i)
            if (tab[i].first <= tab[i - 1].first)
                throw ConfigError("emission table: duplicate arc coordinate");
        if (tab.front().second != 0.0 || tab.back().second != 0.0)
            throw ConfigError("emission table: profile must vanish at the ends of its "
                              "tabulated range (compact support)");
        if (tab.size() >= 2) any = true;
    }
    if (!any) throw ConfigError("emission table: profile is identically zero");
    prof.renormalize(p, per_side);
    return prof;
}

double EmissionProfile::operator()(const BoundaryPoint& sigma) const {
    const auto& tab = table_[static_cast<int>(sigma.side) - 1];
    if (tab.size() < 2) return 0.0;
    const double s = sigma.s;
    if (s <= tab.front().first || s >= tab.back().first) return 0.0;
    auto hi = std::upper_bound(tab.begin(), tab.end(), std::make_pair(s, 1e300));
    auto lo = hi - 1;
    const double t = (s - lo->first) / (hi->first - lo->first);
    return scale_ * ((1.0 - t) * lo->second + t * hi->second);
}

void EmissionProfile::renormalize(const GrowthParams& p, int per_side) {
    scale_ = 1.0;
    const double q = boundary_quadrature(
        p, [this](const BoundaryPoint& bp) { return (*this)(bp); }, per_side);
    if (!(q > 0.0)) throw ConfigError("emission profile: quadrature of the raw profile is zero");
    scale_ = 1.0 / q;
    lipschitz_ = 0.0;
    for (const auto& tab : table_) {
        for (size_t i = 1; i < tab.size(); ++i) {
            const double slope = std::abs(tab[i].second - tab[i - 1].second) /
                                 (tab[i].first - tab[i - 1].first);
            lipschitz_ = std::max(lipschitz_, slope * scale_);
        }
    }
}

} // namespace metastat
