#include "metastat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metastat/errors.hpp"
#include "metastat/renewal.hpp"

namespace metastat {

double exp_panel_p0(double lambda, double h) {
    double z = lambda * h;
    if (z == 0.0) return h;
    return -std::expm1(-z) / lambda;
}

double exp_panel_p1(double lambda, double h) {
    double z = lambda * h;
    if (z == 0.0) return 0.5 * h * h;
    double s;
    if (std::abs(z) < 0.05) {
        // 1 - e^{-z}(1+z) = sum_{k>=2} (-1)^k (k-1)/k! z^k, summed until the
        // terms fall below roundoff (direct evaluation cancels ~all digits).
        s = 0.0;
        double zk = z; // z^{k-1} running power
        double kfac = 1.0;
        for (int k = 2; k < 30; ++k) {
            zk *= z;
            kfac *= k;
            double term = (k % 2 == 0 ? 1.0 : -1.0) * (k - 1) / kfac * zk;
            s += term;
            if (std::abs(term) < 1e-20 * std::abs(s)) break;
        }
    } else {
        s = 1.0 - std::exp(-z) * (1.0 + z);
    }
    return s / (lambda * lambda);
}

namespace {

// Product quadrature of a piecewise-linear sampled function against
// e^{-lambda tau} over [0, tau_max]; serial fixed-order sum.
double weighted_panels(const std::vector<double>& f, double dtau, double lambda) {
    const double p0 = exp_panel_p0(lambda, dtau);
    const double p1h = exp_panel_p1(lambda, dtau) / dtau;
    double sum = 0.0;
    for (size_t i = 0; i + 1 < f.size(); ++i) {
        double w = std::exp(-lambda * (double(i) * dtau));
        sum += w * (f[i] * p0 + (f[i + 1] - f[i]) * p1h);
    }
    return sum;
}

} // namespace

double laplace_F(const std::vector<double>& K, double dtau, double beta_star,
                 double lambda) {
    if (lambda <= 0.0) throw std::domain_error("laplace_F: lambda must be positive");
    if (K.size() < 2) throw std::domain_error("laplace_F: kernel needs >= 2 samples");
    const double tau_max = double(K.size() - 1) * dtau;
    return weighted_panels(K, dtau, lambda) + beta_star * std::exp(-lambda * tau_max) / lambda;
}

double laplace_F_prime(const std::vector<double>& K, double dtau, double beta_star,
                       double lambda) {
    if (lambda <= 0.0) throw std::domain_error("laplace_F: lambda must be positive");
    const double tau_max = double(K.size() - 1) * dtau;
    std::vector<double> tk(K.size());
    for (size_t i = 0; i < K.size(); ++i) tk[i] = double(i) * dtau * K[i];
    double body = weighted_panels(tk, dtau, lambda);
    double tail = beta_star * std::exp(-lambda * tau_max) *
                  (tau_max / lambda + 1.0 / (lambda * lambda));
    return -body - tail;
}

double solve_malthus(const CharacteristicLattice& lat, double root_tol) {
    const std::vector<double> K = kernel(lat);
    const double dtau = lat.dtau;
    const double bs = lat.beta_star;

    // F is strictly decreasing on (0, inf); supercriticality is checked at a
    // probe far below any biologically plausible exponent.
    const double probe = 1e-3 * (lat.params.a + lat.params.c);
    const double f_probe = laplace_F(K, dtau, bs, probe);
    if (f_probe <= 1.0)
        throw SubcriticalError("renewal process is subcritical: F(lambda_probe) <= 1",
                               f_probe);

    double lo = probe;
    double hi = std::max(2.0 * probe, lat.params.a + lat.params.c);
    for (int it = 0;; ++it) {
        if (laplace_F(K, dtau, bs, hi) < 1.0) break;
        lo = hi;
        hi *= 2.0;
        if (it > 200) throw NumericalError("malthus bracket: no upper bound found");
    }

    // Bisection with Newton refinement; F > 1 means lambda is too small.
    double lambda = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = laplace_F(K, dtau, bs, lambda) - 1.0;
        if (std::abs(f) <= root_tol) return lambda;
        if (f > 0.0)
            lo = lambda;
        else
            hi = lambda;
        double fp = laplace_F_prime(K, dtau, bs, lambda);
        double next = lambda - f / fp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        lambda = next;
    }
    throw NumericalError("malthus root: |F(lambda)-1| did not reach tolerance");
}

std::vector<double> adjoint_eigenvector(const CharacteristicLattice& lat, double lambda0,
                                        Exec exec) {
    const int I = lat.rows() - 1;
    const int J = lat.cols();
    const double h = lat.dtau;
    const double p0 = exp_panel_p0(lambda0, h);
    const double p1h = exp_panel_p1(lambda0, h) / h;
    const double decay = std::exp(-lambda0 * h);
    const double tail = lat.beta_star / lambda0;

    std::vector<double> psi(size_t(I + 1) * J);
    for_each_index(exec, J, [&](int j) {
        psi[size_t(I) * J + j] = tail;
        for (int i = I - 1; i >= 0; --i) {
            double bi = lat.beta_at(i, j);
            double db = lat.beta_at(i + 1, j) - bi;
            psi[size_t(i) * J + j] = bi * p0 + db * p1h + decay * psi[size_t(i + 1) * J + j];
        }
    });
    return psi;
}

double normalize_constant(const CharacteristicLattice& lat, double lambda0,
                          const std::vector<double>& psi) {
    const int I = lat.rows() - 1;
    const int J = lat.cols();
    const double tail = (lat.beta_star / lambda0) * std::exp(-lambda0 * lat.tau_max) / lambda0;

    double denom = 0.0;
    std::vector<double> col(size_t(I) + 1);
    for (int j = 0; j < J; ++j) {
        for (int i = 0; i <= I; ++i) col[i] = psi[size_t(i) * J + j];
        double s_j = weighted_panels(col, lat.dtau, lambda0) + tail;
        denom += lat.ds * lat.emission[j] * s_j;
    }
    if (denom <= 0.0) throw NumericalError("normalize: nonpositive adjoint pairing");
    return 1.0 / denom;
}

double adjoint_residual(const CharacteristicLattice& lat, double lambda0,
                        const std::vector<double>& psi) {
    const int I = lat.rows() - 1;
    const int J = lat.cols();

    double w0 = 0.0;
    for (int j = 0; j < J; ++j) w0 += lat.ds * lat.emission[j] * psi[j];

    double worst = 0.0;
    for (int j = 0; j < J; ++j) {
        for (int i = 1; i < I; ++i) {
            double dpsi = (psi[size_t(i + 1) * J + j] - psi[size_t(i - 1) * J + j]) /
                          (2.0 * lat.dtau);
            double defect = dpsi - lambda0 * psi[size_t(i) * J + j] + lat.beta_at(i, j) * w0;
            worst = std::max(worst, std::abs(defect));
        }
    }
    return worst;
}

SpectralSolution solve_spectral(const CharacteristicLattice& lat, double root_tol,
                                Exec exec) {
    SpectralSolution out;
    out.lambda0 = solve_malthus(lat, root_tol);
    out.residual = std::abs(
        laplace_F(kernel(lat), lat.dtau, lat.beta_star, out.lambda0) - 1.0);
    out.psi = adjoint_eigenvector(lat, out.lambda0, exec);
    out.C = normalize_constant(lat, out.lambda0, out.psi);

    auto [mn, mx] = std::minmax_element(out.psi.begin(), out.psi.end());
    out.psi_min = *mn;
    out.psi_max = *mx;
    auto [bmn, bmx] = std::minmax_element(lat.beta_vals.begin(), lat.beta_vals.end());
    double lo = std::min(*bmn, lat.beta_star) / out.lambda0;
    double hi = std::max(*bmx, lat.beta_star) / out.lambda0;
    out.bounds_ok = (out.psi_min >= lo) && (out.psi_max <= hi);
    return out;
}

} // namespace metastat
