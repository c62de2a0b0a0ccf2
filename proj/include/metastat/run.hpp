#pragma once

#include <memory>
#include <string>
#include <vector>

#include "metastat/config.hpp"
#include "metastat/renewal.hpp"

namespace metastat {

/// Model objects realized from a config: parameters, laws, and the
/// characteristic lattice (heap-held so field pointers survive moves).
struct RunSetup {
    GrowthParams params;
    BirthLaw beta;
    EmissionProfile profile;
    std::unique_ptr<CharacteristicLattice> lattice;
};

RunSetup prepare_setup(const RunConfig& cfg, Exec exec = Exec::OpenMP);

/// Number of time panels: largest n with n * dtau <= T (grids are aligned,
/// so the horizon lands on the last covered lattice multiple).
int time_panel_count(const RunConfig& cfg, const CharacteristicLattice& lat);

/// Initial data realized on the lattice as rho0_tilde = rho0(X) * |J_Phi|
/// (or read directly from a lattice CSV for InitialKind::LatticeCsv).
std::vector<double> make_initial_data(const RunConfig& cfg, const CharacteristicLattice& lat);

/// Source samples f(t_n, sigma_j) for the configured mode.
SourceSamples make_source(const RunConfig& cfg, const CharacteristicLattice& lat, int n_t);

/// Forcing contribution of the source to the birth-rate equation:
/// integral over tau < t_n of beta * f(t_n - tau), product trapezoid.
std::vector<double> source_forcing(const CharacteristicLattice& lat,
                                   const SourceSamples& src, int n_t);

/// Volterra march + reconstruction for already-realized data on an existing
/// lattice (the core of simulate(), reusable across runs on one lattice).
DensityField solve_field(const CharacteristicLattice& lat, const std::vector<double>& rho0,
                         const SourceSamples& src, int n_t, Exec exec = Exec::OpenMP);

struct RunResult {
    RunSetup setup;
    DensityField field;
    std::vector<std::string> warnings;
};

/// Full density run: lattice, initial data, source, Volterra march,
/// reconstruction. Throws ConfigError / NumericalError subclasses.
RunResult simulate(const RunConfig& cfg, Exec exec = Exec::OpenMP);

} // namespace metastat
