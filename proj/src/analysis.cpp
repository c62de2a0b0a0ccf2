#include "metastat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace metastat {

namespace {

// <f(t_n, .), Psi_boundary> over Gamma; absolute value optional.
double source_psi_pairing(const DensityField& field, const SpectralSolution& spec, int n,
                          bool absolute) {
    if (field.source.empty()) return 0.0;
    const CharacteristicLattice& lat = *field.lat;
    double sum = 0.0;
    for (int j = 0; j < lat.cols(); ++j) {
        double f = field.source.at(n, j);
        sum += lat.ds * (absolute ? std::abs(f) : f) * spec.psi_at(lat, 0, j);
    }
    return sum;
}

// Running trapezoid of e^{-rate * s} * <f or |f|, Psi_b> on the time grid.
std::vector<double> source_integral_series(const DensityField& field,
                                           const SpectralSolution& spec, double rate,
                                           bool absolute) {
    std::vector<double> S(size_t(field.n_t) + 1, 0.0);
    if (field.source.empty()) return S;
    double prev = source_psi_pairing(field, spec, 0, absolute); // e^0
    for (int n = 1; n <= field.n_t; ++n) {
        double cur = std::exp(-rate * field.time(n)) * source_psi_pairing(field, spec, n, absolute);
        S[n] = S[n - 1] + 0.5 * field.dt * (prev + cur);
        prev = cur;
    }
    return S;
}

double plain_mass(const DensityField& field, int n) {
    return field.integrate([](double v, int, int) { return v; }, n);
}

} // namespace

double psi_mass(const DensityField& field, int n, const SpectralSolution& spec) {
    const CharacteristicLattice& lat = *field.lat;
    return field.integrate(
        [&](double v, int i, int j) { return v * spec.psi_at(lat, i, j); }, n);
}

double psi_norm(const DensityField& field, int n, const SpectralSolution& spec) {
    const CharacteristicLattice& lat = *field.lat;
    return field.integrate(
        [&](double v, int i, int j) { return std::abs(v) * spec.psi_at(lat, i, j); }, n);
}

MeanValueSeries check_mean_value(const DensityField& field, const SpectralSolution& spec) {
    MeanValueSeries out;
    const int n_t = field.n_t;
    const double m0 = psi_mass(field, 0, spec);
    const double floor = 1e-12 * std::max(std::abs(m0), psi_norm(field, 0, spec));
    const std::vector<double> S = source_integral_series(field, spec, spec.lambda0, false);

    out.closed_form.resize(size_t(n_t) + 1);
    out.rel_error.resize(size_t(n_t) + 1);
    for (int n = 0; n <= n_t; ++n) {
        double M = std::exp(spec.lambda0 * field.time(n)) * (m0 + S[n]);
        out.closed_form[n] = M;
        double diff = std::abs(psi_mass(field, n, spec) - M);
        double denom = std::max(std::abs(M), floor);
        out.rel_error[n] = (diff == 0.0) ? 0.0
                           : (denom > 0.0 ? diff / denom
                                          : std::numeric_limits<double>::infinity());
        out.max_rel_error = std::max(out.max_rel_error, out.rel_error[n]);
    }
    return out;
}

ContractionSeries check_contraction(const DensityField& field, const SpectralSolution& spec,
                                    double rel_tol) {
    ContractionSeries out;
    const int n_t = field.n_t;
    const double norm0 = psi_norm(field, 0, spec);
    const std::vector<double> S = source_integral_series(field, spec, spec.lambda0, true);

    out.lhs.resize(size_t(n_t) + 1);
    out.rhs.resize(size_t(n_t) + 1);
    out.margin.resize(size_t(n_t) + 1);
    double rhs_scale = 0.0;
    for (int n = 0; n <= n_t; ++n) {
        out.lhs[n] = psi_norm(field, n, spec);
        out.rhs[n] = std::exp(spec.lambda0 * field.time(n)) * (norm0 + S[n]);
        out.margin[n] = out.rhs[n] - out.lhs[n];
        rhs_scale = std::max(rhs_scale, std::abs(out.rhs[n]));
    }
    out.ok = true;
    for (double m : out.margin)
        if (m < -rel_tol * rhs_scale) out.ok = false;
    return out;
}

ComparisonResult check_comparison(const DensityField& lower, const DensityField& upper) {
    if (lower.lat != upper.lat || lower.n_t != upper.n_t)
        throw std::invalid_argument("check_comparison: runs must share lattice and grid");
    const int rows = lower.lat->rows();
    const int cols = lower.lat->cols();

    ComparisonResult out;
    out.worst_gap = -std::numeric_limits<double>::infinity();
    for (int n = 0; n <= lower.n_t; ++n)
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                double gap = lower.value(n, i, j) - upper.value(n, i, j);
                out.worst_gap = std::max(out.worst_gap, gap);
                if (gap > 0.0) {
                    if (out.violations == 0) {
                        out.first_time = n;
                        out.first_row = i;
                        out.first_col = j;
                    }
                    ++out.violations;
                }
            }
    out.ok = (out.violations == 0);
    return out;
}

std::vector<double> balance_residual(const DensityField& field) {
    const CharacteristicLattice& lat = *field.lat;
    const int n_t = field.n_t;
    if (n_t < 2) return {};

    std::vector<double> mass(size_t(n_t) + 1);
    for (int n = 0; n <= n_t; ++n) mass[n] = plain_mass(field, n);

    std::vector<double> res(size_t(n_t) - 1);
    for (int n = 1; n < n_t; ++n) {
        double influx = field.B[n];
        for (int j = 0; j < lat.cols(); ++j) influx += lat.ds * field.source.at(n, j);
        double dmass = (mass[n + 1] - mass[n - 1]) / (2.0 * field.dt);
        res[n - 1] = std::abs(dmass - influx);
    }
    return res;
}

ConvergenceReport convergence_report(const DensityField& field, const SpectralSolution& spec,
                                     double fit_window_fraction) {
    const CharacteristicLattice& lat = *field.lat;
    const int n_t = field.n_t;

    ConvergenceReport out;
    out.mu_bound = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < spec.psi.size(); ++k)
        if (spec.psi[k] > 0.0)
            out.mu_bound = std::min(out.mu_bound, lat.beta_vals[k] / spec.psi[k]);
    if (!std::isfinite(out.mu_bound)) out.mu_bound = 0.0;

    const std::vector<double> Sabs =
        source_integral_series(field, spec, spec.lambda0 - out.mu_bound, true);

    out.times.resize(size_t(n_t) + 1);
    out.deviation.resize(size_t(n_t) + 1);
    out.bound_rhs.resize(size_t(n_t) + 1);
    for (int n = 0; n <= n_t; ++n) {
        out.times[n] = field.time(n);
        double scale = std::exp(-spec.lambda0 * field.time(n));
        double m_resc = scale * psi_mass(field, n, spec);
        out.deviation[n] = field.integrate(
            [&](double v, int i, int j) {
                return std::abs(v * scale - m_resc * spec.vtilde(lat, i, j)) *
                       spec.psi_at(lat, i, j);
            },
            n);
    }
    for (int n = 0; n <= n_t; ++n)
        out.bound_rhs[n] =
            std::exp(-out.mu_bound * out.times[n]) * (out.deviation[0] + 2.0 * Sabs[n]);

    out.mean_value_error = check_mean_value(field, spec).rel_error;

    // Log-linear decay rate over the trailing window, skipping noise-floor
    // samples (an eigenvector-initialized run never leaves the floor).
    const double floor =
        1e-13 * std::max(psi_norm(field, 0, spec), std::numeric_limits<double>::min());
    const double t_start = fit_window_fraction * field.time(n_t);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int n = 0; n <= n_t; ++n) {
        if (out.times[n] < t_start || out.deviation[n] <= floor) continue;
        double x = out.times[n], y = std::log(out.deviation[n]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++count;
    }
    double det = count * sxx - sx * sx;
    if (count >= 2 && det > 0.0) {
        out.fitted_rate = -(count * sxy - sx * sy) / det;
        out.rate_fitted = true;
    }
    return out;
}

std::vector<DiagnosticsRow> diagnostics_table(const DensityField& field,
                                              const SpectralSolution& spec) {
    const ConvergenceReport rep = convergence_report(field, spec);
    const MeanValueSeries mv = check_mean_value(field, spec);

    std::vector<DiagnosticsRow> rows(size_t(field.n_t) + 1);
    for (int n = 0; n <= field.n_t; ++n) {
        rows[n].t = field.time(n);
        rows[n].mass = plain_mass(field, n);
        rows[n].psi_mass = psi_mass(field, n, spec);
        rows[n].m_closed_form = mv.closed_form[n];
        rows[n].deviation = rep.deviation[n];
        rows[n].bound_rhs = rep.bound_rhs[n];
    }
    return rows;
}

} // namespace metastat
