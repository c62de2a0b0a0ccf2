#include "metastat/renewal.hpp"

#include <algorithm>
#include <cmath>

namespace metastat {

std::vector<double> kernel(const CharacteristicLattice& lat) {
    const int rows = lat.rows(), J = lat.cols();
    std::vector<double> K(rows, 0.0);
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        for (int j = 0; j < J; ++j) acc += lat.emission[j] * lat.beta_at(i, j);
        K[i] = acc * lat.ds;
    }
    return K;
}

std::vector<double> initial_tail(const CharacteristicLattice& lat,
                                 const std::vector<double>& rho0_tilde, int n_t) {
    const int rows = lat.rows(), J = lat.cols();
    const int I = rows - 1;
    if (rho0_tilde.size() != static_cast<size_t>(rows) * J)
        throw std::invalid_argument("initial_tail: rho0 shape does not match the lattice");
    std::vector<double> g(n_t + 1, 0.0);
    for (int n = 0; n <= n_t; ++n) {
        if (n >= I) continue; // initial cohort fully shifted out (or zero-width tail)
        double acc = 0.0;
        for (int j = 0; j < J; ++j) {
            // trapezoid over tau in [t_n, tau_max]; data shifted by n rows
            double col = 0.5 * (lat.beta_at(n, j) * rho0_tilde[size_t(0) * J + j] +
                                lat.beta_at(I, j) * rho0_tilde[size_t(I - n) * J + j]);
            for (int i = n + 1; i < I; ++i)
                col += lat.beta_at(i, j) * rho0_tilde[size_t(i - n) * J + j];
            acc += col;
        }
        g[n] = acc * lat.dtau * lat.ds;
    }
    return g;
}

std::vector<double> solve_birth_rate(const std::vector<double>& K,
                                     const std::vector<double>& g, double dtau) {
    if (K.size() < 2) throw std::invalid_argument("solve_birth_rate: kernel needs >= 2 samples");
    if (!(dtau > 0.0)) throw std::invalid_argument("solve_birth_rate: dtau must be positive");
    const int I = static_cast<int>(K.size()) - 1;
    const int n_t = static_cast<int>(g.size()) - 1;
    const double half = 0.5 * dtau * K[0];
    if (half >= 1.0)
        throw StepSizeError("solve_birth_rate: 0.5*dtau*K(0) = " + std::to_string(half) +
                            " >= 1; halve the time step");
    const double denom = 1.0 - half;
    std::vector<double> B(n_t + 1, 0.0);
    B[0] = g[0];
    for (int n = 1; n <= n_t; ++n) {
        const int m = std::min(n, I);
        double conv = 0.0;
        for (int i = 1; i < m; ++i) conv += K[i] * B[n - i];
        conv += 0.5 * K[m] * B[n - m];
        B[n] = (g[n] + dtau * conv) / denom;
    }
    return B;
}

DensityField reconstruct(const CharacteristicLattice& lat, const std::vector<double>& B,
                         const std::vector<double>& rho0_tilde, const SourceSamples& source,
                         Exec exec) {
    const int rows = lat.rows(), J = lat.cols();
    const int I = rows - 1;
    const int n_t = static_cast<int>(B.size()) - 1;
    if (rho0_tilde.size() != static_cast<size_t>(rows) * J)
        throw std::invalid_argument("reconstruct: rho0 shape does not match the lattice");
    if (!source.empty() &&
        (source.cols != J || source.values.size() != static_cast<size_t>(n_t + 1) * J))
        throw std::invalid_argument("reconstruct: source shape does not match grid");

    DensityField f;
    f.lat = &lat;
    f.dt = lat.dtau;
    f.n_t = n_t;
    f.B = B;
    f.rho0_tilde = rho0_tilde;
    f.source = source;
    f.rho_tilde.resize(static_cast<size_t>(n_t + 1) * rows * J);

    for_each_index(exec, n_t + 1, [&](int n) {
        double* slab = &f.rho_tilde[size_t(n) * rows * J];
        if (n == 0) {
            std::copy(rho0_tilde.begin(), rho0_tilde.end(), slab);
            return;
        }
        for (int i = 0; i < rows; ++i) {
            if (i <= n) {
                const int k = n - i; // boundary age; i == n gives k == 0 (H-side limit)
                for (int j = 0; j < J; ++j)
                    slab[size_t(i) * J + j] = lat.emission[j] * B[k] + source.at(k, j);
            } else {
                for (int j = 0; j < J; ++j)
                    slab[size_t(i) * J + j] = rho0_tilde[size_t(i - n) * J + j];
            }
        }
    });
    return f;
}

double DensityField::integrate(const std::function<double(double, int, int)>& term,
                               int n) const {
    const int rows = lat->rows(), J = lat->cols();
    const int I = rows - 1;
    const double dtau = lat->dtau;
    double total = 0.0;
    for (int j = 0; j < J; ++j) {
        double col = 0.5 * (term(value(n, 0, j), 0, j) + term(value(n, I, j), I, j));
        for (int i = 1; i < I; ++i) col += term(value(n, i, j), i, j);
        // interface tau = t_n: half weight each for the two one-sided limits
        if (n >= 1 && n <= I - 1)
            col += 0.5 * (term(rho0_tilde[j], n, j) - term(value(n, n, j), n, j));
        total += col;
    }
    return total * dtau * lat->ds;
}

double weighted_mass(const DensityField& field, int n,
                     const std::function<double(const PhasePoint&)>& w) {
    const auto* lat = field.lat;
    return field.integrate(
        [&](double v, int i, int j) { return v * w(lat->pos(i, j)); }, n);
}

double to_physical(const DensityField& field, int n, const PhasePoint& X,
                   const FlowOptions& opt) {
    const auto& lat = *field.lat;
    auto [tau, sigma] = inverse_flow(lat.params, X, opt);
    if (tau > lat.tau_max)
        throw SingularityError("to_physical: point is beyond the lattice tau coverage "
                               "(saturated region near the equilibrium)");

    const int per_side = lat.cols() / 4;
    const int block = (static_cast<int>(sigma.side) - 1) * per_side;
    double u = sigma.s / lat.ds - 0.5;
    u = std::clamp(u, 0.0, static_cast<double>(per_side - 1));
    int j0 = std::min(static_cast<int>(u), per_side - 2);
    const double fs = u - j0;

    double v = tau / lat.dtau;
    int i0 = std::min(static_cast<int>(v), lat.rows() - 2);
    const double ft = v - i0;

    auto val = [&](int i, int j) { return field.value(n, i, block + j); };
    const double interp = (1.0 - ft) * ((1.0 - fs) * val(i0, j0) + fs * val(i0, j0 + 1)) +
                          ft * ((1.0 - fs) * val(i0 + 1, j0) + fs * val(i0 + 1, j0 + 1));

    const FlowResult fr = flow(lat.params, sigma, tau, opt);
    return interp / fr.jacobian;
}

double truncated_initial_fraction(const DensityField& field, int n) {
    const auto& lat = *field.lat;
    const int rows = lat.rows(), J = lat.cols();
    const int I = rows - 1;
    auto band_mass = [&](int i_from, int i_to) {
        if (i_from > i_to) return 0.0;
        double acc = 0.0;
        for (int j = 0; j < J; ++j) {
            double col = 0.5 * (field.rho0_tilde[size_t(i_from) * J + j] +
                                field.rho0_tilde[size_t(i_to) * J + j]);
            for (int i = i_from + 1; i < i_to; ++i)
                col += field.rho0_tilde[size_t(i) * J + j];
            acc += col;
        }
        return acc * lat.dtau * lat.ds;
    };
    const double total = band_mass(0, I);
    if (!(total > 0.0)) return 0.0;
    const int cut = std::max(0, I - n);
    if (cut >= I) return 0.0;
    return band_mass(cut, I) / total;
}

} // namespace metastat
