#pragma once

#include <vector>

#include "metastat/renewal.hpp"
#include "metastat/spectral.hpp"

namespace metastat {

/// Signed Psi-weighted mass <rho(t_n), Psi> on the lattice.
double psi_mass(const DensityField& field, int n, const SpectralSolution& spec);

/// L1_Psi norm: integral of |rho(t_n)| * Psi.
double psi_norm(const DensityField& field, int n, const SpectralSolution& spec);

/// Mean-value identity: the Psi-weighted mass evolves as
/// M(t) = e^{lambda0 t} ( M(0) + integral_0^t e^{-lambda0 s} <f(s), Psi_boundary> ds ).
struct MeanValueSeries {
    std::vector<double> closed_form; ///< M(t_n)
    std::vector<double> rel_error;   ///< |psi_mass - M| / max(|M|, floor)
    double max_rel_error = 0.0;
};
MeanValueSeries check_mean_value(const DensityField& field, const SpectralSolution& spec);

/// Contraction estimate: psi_norm(t) never exceeds the same closed form
/// driven by |initial data| and |f|. Margins are rhs - lhs; ok means every
/// margin >= -rel_tol * max(rhs).
struct ContractionSeries {
    std::vector<double> lhs;
    std::vector<double> rhs;
    std::vector<double> margin;
    bool ok = false;
};
ContractionSeries check_contraction(const DensityField& field, const SpectralSolution& spec,
                                    double rel_tol = 1e-6);

/// Nodewise ordering of two runs on the same lattice/grid (expects
/// lower's data <= upper's data and a shared nonnegative source).
struct ComparisonResult {
    bool ok = false;
    long long violations = 0;
    int first_time = -1, first_row = -1, first_col = -1;
    double worst_gap = 0.0; ///< max over nodes of lower - upper (<= 0 when ok)
};
ComparisonResult check_comparison(const DensityField& lower, const DensityField& upper);

/// Mass balance: centered d/dt of total mass minus (B(t) + boundary source
/// influx), at interior grid times n = 1..n_t-1.
std::vector<double> balance_residual(const DensityField& field);

/// Convergence to the stable distribution: deviation(t) is the L1_Psi
/// distance between the rescaled solution and its mean-value multiple of the
/// direct eigenvector; bound_rhs is the exponential envelope
/// e^{-mu t} ( deviation(0) + 2 integral_0^t e^{-(lambda0-mu)s} <|f|, Psi_b> )
/// with the sharpest lattice mu = min beta/Psi.
struct ConvergenceReport {
    std::vector<double> times;
    std::vector<double> deviation;
    std::vector<double> bound_rhs;
    std::vector<double> mean_value_error;
    double mu_bound = 0.0;
    double fitted_rate = 0.0; ///< least-squares decay rate over the fit window
    bool rate_fitted = false; ///< false when deviation sits at the noise floor
};
ConvergenceReport convergence_report(const DensityField& field, const SpectralSolution& spec,
                                     double fit_window_fraction = 0.5);

/// Per-time diagnostics assembled for export.
struct DiagnosticsRow {
    double t;
    double mass;
    double psi_mass;
    double m_closed_form;
    double deviation;
    double bound_rhs;
};
std::vector<DiagnosticsRow> diagnostics_table(const DensityField& field,
                                              const SpectralSolution& spec);

} // namespace metastat
