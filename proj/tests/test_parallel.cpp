#include "doctest.h"

#include <cstdlib>
#include <numeric>
#include <vector>

#include "metastat/run.hpp"
#include "metastat/spectral.hpp"

using namespace metastat;

TEST_CASE("worker cap honors the environment variable") {
    CHECK(worker_count() >= 1);
    setenv("METASTAT_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    setenv("METASTAT_THREADS", "not_a_number", 1);
    CHECK(worker_count() >= 1);
    unsetenv("METASTAT_THREADS");
}

TEST_CASE("for_each_index covers the range exactly once under both policies") {
    for (Exec exec : {Exec::Serial, Exec::OpenMP}) {
        std::vector<int> hits(257, 0);
        for_each_index(exec, 257, [&](int i) { hits[i] += 1; });
        CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 257);
        for (int h : hits) CHECK(h == 1);
    }
}

TEST_CASE("parallel pipeline reproduces the serial reference bit for bit") {
    RunConfig cfg;
    cfg.I = 128;
    cfg.J = 16;
    cfg.T = 1.5;
    cfg.tau_max = 8.0;
    cfg.m = 0.1;
    cfg.alpha = 2.0 / 3.0;
    cfg.initial = InitialKind::Gaussian;
    cfg.source = SourceMode::PrimaryTumor;
    cfg.source_x0 = 1.2;
    cfg.source_theta0 = 1.5;

    RunSetup ser = prepare_setup(cfg, Exec::Serial);
    RunSetup par = prepare_setup(cfg, Exec::OpenMP);
    CHECK(ser.lattice->jacobians == par.lattice->jacobians);
    CHECK(ser.lattice->beta_vals == par.lattice->beta_vals);
    REQUIRE(ser.lattice->positions.size() == par.lattice->positions.size());
    for (size_t k = 0; k < ser.lattice->positions.size(); ++k) {
        CHECK(ser.lattice->positions[k].x == par.lattice->positions[k].x);
        CHECK(ser.lattice->positions[k].theta == par.lattice->positions[k].theta);
    }

    SpectralSolution ss = solve_spectral(*ser.lattice, cfg.root_tol, Exec::Serial);
    SpectralSolution sp = solve_spectral(*ser.lattice, cfg.root_tol, Exec::OpenMP);
    CHECK(ss.lambda0 == sp.lambda0);
    CHECK(ss.C == sp.C);
    CHECK(ss.psi == sp.psi);

    int n_t = time_panel_count(cfg, *ser.lattice);
    std::vector<double> rho0 = make_initial_data(cfg, *ser.lattice);
    SourceSamples src = make_source(cfg, *ser.lattice, n_t);
    DensityField fs = solve_field(*ser.lattice, rho0, src, n_t, Exec::Serial);
    DensityField fp = solve_field(*ser.lattice, rho0, src, n_t, Exec::OpenMP);
    CHECK(fs.B == fp.B);
    CHECK(fs.rho_tilde == fp.rho_tilde);
}
