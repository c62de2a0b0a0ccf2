#pragma once

#include <random>
#include <string>
#include <vector>

#include "metastat/config.hpp"
#include "metastat/run.hpp"

namespace metastat {

/// One named validation check. status is "pass", "fail" or "skip";
/// value/threshold give the measured quantity and its acceptance level.
struct CheckResult {
    std::string name;
    std::string status;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (c.status == "fail") return false;
        return true;
    }
};

/// Max relative mismatch between the transported Jacobian and the
/// finite-difference determinant of the flow differential, over n random
/// (tau, sigma) samples with tau ~ U[tau_lo, tau_hi].
double max_jacobian_fd_error(const GrowthParams& p, int n_samples, std::mt19937_64& rng,
                             double tau_lo = 0.0, double tau_hi = 3.0);

/// Max roundtrip defect |Phi_{tau(X)}(sigma(X)) - X| / (b-1) over n random
/// interior points (equilibrium guard ball excluded).
double max_roundtrip_error(const GrowthParams& p, int n_samples, std::mt19937_64& rng);

/// Full invariant battery over the configured model: flow geometry, spectral
/// identities, a density run with its dynamical inequalities, and a
/// randomized comparison pair. Spectral-dependent checks are skipped (not
/// failed) when the configuration is subcritical.
ValidationReport run_validation(const RunConfig& cfg, Exec exec = Exec::OpenMP);

} // namespace metastat
