#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metastat/errors.hpp"

namespace metastat {

enum class ProfileKind { Hat, Table };
enum class InitialKind { Zero, Gaussian, Uniform, LatticeCsv };
enum class SourceMode { None, PrimaryTumor, Table };

/// One run description, loadable from a sectioned key = value file.
/// A value of 0 means "pick automatically" for hat_center, hat_width and
/// tau_max. Serialization through to_ini() round-trips losslessly.
struct RunConfig {
    // [growth]
    double a = 0.5;
    double c = 2.0;
    double d = 1.0;

    // [emission]
    double m = 0.1;
    double alpha = 2.0 / 3.0;
    ProfileKind profile = ProfileKind::Hat;
    double hat_center = 0.0; ///< arc position on Gamma1; 0 = (b-1)/2
    double hat_width = 0.0;  ///< base width; 0 = (b-1)/2
    std::string profile_table; ///< CSV path for ProfileKind::Table

    // [grids]
    int I = 512;
    int J = 64;
    double T = 2.0;
    double tau_max = 0.0; ///< 0 = automatic horizon selection

    // [initial_data]
    InitialKind initial = InitialKind::Zero;
    double init_center_x = 1.7;
    double init_center_theta = 2.1;
    double init_width = 0.2;
    double init_amplitude = 1.0;
    std::string initial_path; ///< lattice CSV for InitialKind::LatticeCsv

    // [source]
    SourceMode source = SourceMode::None;
    double source_x0 = 1.0;
    double source_theta0 = 1.5;
    std::string source_table;

    // [tolerances]
    double ode_tol = 1e-10;
    double root_tol = 1e-12;
    double quad_tol = 1e-6;

    // [phase]
    int phase_trajectories = 12;
    int phase_samples = 200;
    double phase_t_end = 30.0;
    bool phase_include_equilibrium = true;

    // [spectral]
    double lambda_min = 0.0; ///< 0 = auto scan range around lambda0
    double lambda_max = 0.0;
    int scan_points = 64;

    // [output]
    std::vector<double> snapshot_times; ///< empty = {0, T/2, T}

    // [run]
    std::uint64_t seed = 42;

    bool operator==(const RunConfig&) const = default;
};

/// Parses sectioned key = value text ('#'/';' comments). Unknown sections or
/// keys raise ConfigError naming the offender.
RunConfig parse_config(const std::string& text);

/// Reads and parses a config file.
RunConfig load_config(const std::string& path);

/// Canonical serialized form; parse_config(to_ini(c)) == c exactly.
std::string to_ini(const RunConfig& cfg);

/// Structural validation shared by every subcommand: positive rates with
/// c > d, positive tolerances, positive horizon, sane grid/scan counts.
void validate(const RunConfig& cfg);

/// Additional demands of a density run: I, J >= 8 and J divisible by 4.
void validate_for_simulate(const RunConfig& cfg);

} // namespace metastat
