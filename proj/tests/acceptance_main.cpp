// End-to-end acceptance gate. Each criterion prints one PASS/FAIL line with
// the measured values against pinned tolerances; the exit code is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "metastat/analysis.hpp"
#include "metastat/checks.hpp"
#include "metastat/run.hpp"
#include "metastat/spectral.hpp"

using namespace metastat;

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Outcome {
    bool pass;
    std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double plain_mass(const DensityField& field, int n) {
    return weighted_mass(field, n, [](const PhasePoint&) { return 1.0; });
}

// 1. constant colonization rate: every pipeline stage has a closed form
Outcome criterion_constant_rate_pipeline() {
    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    cfg.m = 0.7;
    cfg.alpha = 0.0;
    cfg.I = 256;
    cfg.J = 256;
    cfg.tau_max = 12.0;
    cfg.T = 5.0;
    cfg.initial = InitialKind::Gaussian;

    RunResult run = simulate(cfg);
    const CharacteristicLattice& lat = *run.setup.lattice;
    SpectralSolution spec = solve_spectral(lat, cfg.root_tol);

    double lam_err = std::abs(spec.lambda0 - 0.7) / 0.7;
    double psi_err = std::max(std::abs(spec.psi_min - 1.0), std::abs(spec.psi_max - 1.0));
    double c_err = std::abs(spec.C - spec.lambda0) / spec.lambda0;

    double mass0 = plain_mass(run.field, 0);
    double mass_err = 0.0;
    for (int n = 0; n <= run.field.n_t; ++n) {
        double oracle = mass0 * std::exp(0.7 * run.field.time(n));
        mass_err = std::max(mass_err, std::abs(plain_mass(run.field, n) - oracle) / oracle);
    }
    double secs = elapsed(t0);

    bool pass = lam_err <= 1e-8 && psi_err <= 1e-6 && c_err <= 1e-6 && mass_err <= 1e-3 &&
                secs < 30.0;
    return {pass, fmt("lambda0(err=%.2e, thr=1e-8) psi(err=%.2e, thr=1e-6) "
                      "C(err=%.2e, thr=1e-6) mass(err=%.2e, thr=1e-3) time(%.1fs, thr=30s)",
                      lam_err, psi_err, c_err, mass_err, secs)};
}

// 2. power-law colonization rate: spectral residual and adjoint bounds
Outcome criterion_spectral_residual_bounds() {
    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    cfg.I = 256;
    cfg.J = 64;
    RunSetup setup = prepare_setup(cfg);
    SpectralSolution spec = solve_spectral(*setup.lattice, cfg.root_tol);

    const double b = setup.params.b;
    double lo = cfg.m / spec.lambda0;
    double hi = cfg.m * std::pow(b, cfg.alpha) / spec.lambda0;
    double viol = std::max(std::max(lo - spec.psi_min, spec.psi_max - hi), 0.0);
    double secs = elapsed(t0);

    bool pass = spec.residual <= 1e-10 && viol <= 0.0 && secs < 10.0;
    return {pass, fmt("residual(%.2e, thr=1e-10) bounds[%.6g,%.6g] "
                      "psi[%.6g,%.6g] viol(%.2e, thr=0) time(%.1fs, thr=10s)",
                      spec.residual, lo, hi, spec.psi_min, spec.psi_max, viol, secs)};
}

// 3. flow Jacobian against finite differences of the flow map
Outcome criterion_jacobian_fd() {
    auto t0 = std::chrono::steady_clock::now();
    GrowthParams p = GrowthParams::make(0.5, 2.0, 1.0);
    std::mt19937_64 rng(42);
    double err = max_jacobian_fd_error(p, 100, rng);
    double secs = elapsed(t0);
    bool pass = err <= 1e-4 && secs < 10.0;
    return {pass, fmt("max_rel_err(%.2e, thr=1e-4) over 100 samples, time(%.1fs, thr=10s)",
                      err, secs)};
}

// 4. inverse flow roundtrip over random interior points
Outcome criterion_inverse_flow_roundtrip() {
    auto t0 = std::chrono::steady_clock::now();
    GrowthParams p = GrowthParams::make(0.5, 2.0, 1.0);
    std::mt19937_64 rng(42);
    double err = max_roundtrip_error(p, 1000, rng);
    double secs = elapsed(t0);
    bool pass = err <= 1e-6 && secs < 30.0;
    return {pass, fmt("max_err/(b-1)(%.2e, thr=1e-6) over 1000 points, time(%.1fs, thr=30s)",
                      err, secs)};
}

// 5. weighted-mass identity at baseline and under one grid halving
Outcome criterion_mean_value_order() {
    auto run_err = [](int I) {
        RunConfig cfg;
        cfg.I = I;
        cfg.J = 64;
        cfg.tau_max = 24.0;
        cfg.T = 3.0;
        cfg.initial = InitialKind::Gaussian;
        RunResult run = simulate(cfg);
        SpectralSolution spec = solve_spectral(*run.setup.lattice, cfg.root_tol);
        return check_mean_value(run.field, spec).max_rel_error;
    };
    double base = run_err(256);
    double half = run_err(512);
    double ratio = base / half;
    bool pass = base <= 1e-3 && ratio >= 3.0 && ratio <= 5.0;
    return {pass, fmt("baseline_err(%.2e, thr=1e-3) halved_err(%.2e) "
                      "ratio(%.2f, thr=[3,5])",
                      base, half, ratio)};
}

// 6. decay toward the stable profile: monotone deviation, fitted rate,
//    eigenvector-initialized runs hold their quadrature-level deviation
Outcome criterion_asymptotic_decay() {
    RunConfig cfg;
    cfg.I = 256;
    cfg.J = 32;
    cfg.T = 4.0;
    cfg.initial = InitialKind::Gaussian;
    RunResult run = simulate(cfg);
    const CharacteristicLattice& lat = *run.setup.lattice;
    SpectralSolution spec = solve_spectral(lat, cfg.root_tol);
    ConvergenceReport rep = convergence_report(run.field, spec);

    double worst_step = 0.0;
    for (size_t k = 1; k < rep.deviation.size(); ++k)
        worst_step = std::max(worst_step, rep.deviation[k] - rep.deviation[k - 1]);
    bool monotone = worst_step <= 1e-10;
    bool rate_ok = rep.rate_fitted && rep.fitted_rate >= 0.5 * rep.mu_bound;

    // eigen-initialized run on the same lattice
    std::vector<double> v0(size_t(lat.rows()) * lat.cols());
    for (int i = 0; i < lat.rows(); ++i)
        for (int j = 0; j < lat.cols(); ++j)
            v0[size_t(i) * lat.cols() + j] = spec.vtilde(lat, i, j);
    DensityField eig = solve_field(lat, v0, {}, run.field.n_t);
    ConvergenceReport erep = convergence_report(eig, spec);
    double d0 = erep.deviation[0];
    double dmax = 0.0;
    for (double d : erep.deviation) dmax = std::max(dmax, d);
    bool eigen_ok = d0 > 0.0 && dmax <= 10.0 * d0;

    bool pass = monotone && rate_ok && eigen_ok;
    return {pass, fmt("worst_step(%.2e, thr=1e-10) rate(%.4f, thr>=%.4f) "
                      "eigen_dev(max=%.2e, thr=10*d0=%.2e)",
                      worst_step, rep.fitted_rate, 0.5 * rep.mu_bound, dmax, 10.0 * d0)};
}

// 7. comparison principle: ordered nonnegative data stays ordered
Outcome criterion_comparison_principle() {
    RunConfig cfg;
    cfg.I = 32;
    cfg.J = 32;
    cfg.tau_max = 8.0;
    cfg.T = 2.0;
    cfg.source = SourceMode::PrimaryTumor;
    cfg.source_x0 = 1.0;
    cfg.source_theta0 = 1.5;
    RunSetup setup = prepare_setup(cfg);
    const CharacteristicLattice& lat = *setup.lattice;
    int n_t = time_panel_count(cfg, lat);
    SourceSamples src = make_source(cfg, lat, n_t);

    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long long violations = 0;
    for (int pair = 0; pair < 50; ++pair) {
        std::vector<double> low(size_t(lat.rows()) * lat.cols());
        std::vector<double> high(low.size());
        for (size_t k = 0; k < low.size(); ++k) {
            low[k] = u(rng) * lat.jacobians[k];
            high[k] = low[k] + u(rng) * lat.jacobians[k];
        }
        DensityField fl = solve_field(lat, low, src, n_t);
        DensityField fh = solve_field(lat, high, src, n_t);
        ComparisonResult res = check_comparison(fl, fh);
        violations += res.violations;
        double mn = *std::min_element(fl.rho_tilde.begin(), fl.rho_tilde.end());
        if (mn < 0.0) ++violations; // positivity is part of the same property
    }
    bool pass = violations == 0;
    return {pass, fmt("violations(%lld, thr=0) over 50 ordered pairs", violations)};
}

// 8. growth never outruns the exponential of the supremum rate
Outcome criterion_growth_bound() {
    RunConfig cfg;
    cfg.I = 256;
    cfg.J = 32;
    cfg.T = 4.0;
    cfg.initial = InitialKind::Gaussian;
    RunResult run = simulate(cfg);
    double beta_sup = run.setup.lattice->beta_star; // m * b^alpha, the sup over Omega
    double mass0 = plain_mass(run.field, 0);
    double worst = 0.0;
    for (int n = 0; n <= run.field.n_t; ++n) {
        double bound = mass0 * std::exp(beta_sup * run.field.time(n)) * (1.0 + 1e-6);
        worst = std::max(worst, plain_mass(run.field, n) / bound);
    }
    bool pass = worst <= 1.0;
    return {pass, fmt("max mass/bound(%.9f, thr=1) with sup_beta=%.6g", worst, beta_sup)};
}

// 9. Volterra march converges at second order against g*exp(K t)
Outcome criterion_volterra_order() {
    const double Kc = 0.7, g0 = 1.0, T = 2.0;
    std::vector<double> errs;
    for (int n_t : {50, 100, 200, 400}) {
        double dtau = T / n_t;
        std::vector<double> K(n_t + 1, Kc);
        std::vector<double> g(n_t + 1, g0);
        std::vector<double> B = solve_birth_rate(K, g, dtau);
        double worst = 0.0;
        for (int n = 0; n <= n_t; ++n)
            worst = std::max(worst, std::abs(B[n] - g0 * std::exp(Kc * n * dtau)));
        errs.push_back(worst);
    }
    bool pass = true;
    std::string orders;
    for (size_t k = 0; k + 1 < errs.size(); ++k) {
        double order = std::log2(errs[k] / errs[k + 1]);
        pass = pass && order >= 1.7 && order <= 2.3;
        orders += fmt("%s%.2f", k ? "," : "", order);
    }
    return {pass, fmt("orders(%s, thr=2.0+-0.3) finest_err(%.2e)", orders.c_str(),
                      errs.back())};
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Outcome()> fn;
    };
    const Entry entries[] = {
        {"constant-rate pipeline oracle", criterion_constant_rate_pipeline},
        {"power-law spectral residual and bounds", criterion_spectral_residual_bounds},
        {"flow jacobian vs finite differences", criterion_jacobian_fd},
        {"inverse flow roundtrip", criterion_inverse_flow_roundtrip},
        {"weighted-mass identity, grid halving", criterion_mean_value_order},
        {"asymptotic decay to the stable profile", criterion_asymptotic_decay},
        {"comparison principle and positivity", criterion_comparison_principle},
        {"supremum-rate growth bound", criterion_growth_bound},
        {"volterra convergence order", criterion_volterra_order},
    };

    int failures = 0;
    int id = 0;
    for (const Entry& e : entries) {
        ++id;
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out = {false, fmt("exception: %s", ex.what())};
        }
        if (!out.pass) ++failures;
        std::printf("[%d/9] %-42s %s  %s\n", id, e.name, out.pass ? "PASS" : "FAIL",
                    out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/9 passed\n", 9 - failures);
    return failures;
}
