#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "metastat/analysis.hpp"
#include "metastat/checks.hpp"
#include "metastat/config.hpp"
#include "metastat/csv.hpp"
#include "metastat/run.hpp"
#include "metastat/spectral.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace metastat;

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    fs::path path = fs::path(dir) / name;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path.string());
    return f;
}

void write_json(const std::string& dir, const std::string& name, const json& j) {
    std::ofstream f = open_out(dir, name);
    f << j.dump(2) << "\n";
}

int cmd_phase(const RunConfig& cfg, const std::string& out) {
    GrowthParams p = GrowthParams::make(cfg.a, cfg.c, cfg.d);
    FlowOptions opt;
    opt.tol = cfg.ode_tol;

    std::vector<double> taus(cfg.phase_samples);
    for (int k = 0; k < cfg.phase_samples; ++k)
        taus[k] = cfg.phase_t_end * k / (cfg.phase_samples - 1);

    std::ofstream f = open_out(out, "phase.csv");
    f << "seed_id,t,x,theta\n";
    if (cfg.phase_include_equilibrium)
        for (double t : taus)
            f << "0," << csv_num(t) << "," << csv_num(p.b) << "," << csv_num(p.b) << "\n";

    const double side_len = p.b - 1.0;
    const double perimeter = 4.0 * side_len;
    for (int k = 0; k < cfg.phase_trajectories; ++k) {
        double u = (k + 0.5) * perimeter / cfg.phase_trajectories;
        int side = std::min(3, int(u / side_len));
        double s = u - side * side_len;
        // keep seeds off the (degenerate) corners
        s = std::min(std::max(s, 1e-3 * side_len), (1.0 - 1e-3) * side_len);
        BoundaryPoint sigma = chart(p, Side(side + 1), s);
        std::vector<FlowResult> path = flow_samples(p, sigma, taus, opt);
        for (int n = 0; n < cfg.phase_samples; ++n)
            f << k + 1 << "," << csv_num(taus[n]) << "," << csv_num(path[n].position.x)
              << "," << csv_num(path[n].position.theta) << "\n";
    }
    return 0;
}

int cmd_spectral(const RunConfig& cfg, const std::string& out, Exec exec) {
    RunSetup setup = prepare_setup(cfg, exec);
    const CharacteristicLattice& lat = *setup.lattice;

    SpectralSolution spec;
    try {
        spec = solve_spectral(lat, cfg.root_tol, exec);
    } catch (const SubcriticalError& e) {
        json j;
        j["subcritical"] = true;
        j["f_probe"] = e.f_probe();
        j["detail"] = e.what();
        write_json(out, "spectral_summary.json", j);
        std::fprintf(stderr, "spectral: %s\n", e.what());
        return 3;
    }

    std::vector<double> K = kernel(lat);
    double lo = cfg.lambda_min > 0.0 ? cfg.lambda_min : spec.lambda0 / 4.0;
    double hi = cfg.lambda_max > 0.0 ? cfg.lambda_max : spec.lambda0 * 4.0;
    {
        std::ofstream f = open_out(out, "spectral_scan.csv");
        f << "lambda,F\n";
        for (int i = 0; i < cfg.scan_points; ++i) {
            double lam = lo + (hi - lo) * i / (cfg.scan_points - 1);
            f << csv_num(lam) << ","
              << csv_num(laplace_F(K, lat.dtau, lat.beta_star, lam)) << "\n";
        }
    }
    {
        std::ofstream f = open_out(out, "eigenvector.csv");
        f << "side,s,tau,psi,vtilde\n";
        for (int i = 0; i < lat.rows(); ++i)
            for (int j = 0; j < lat.cols(); ++j)
                f << int(lat.sigma[j].side) << "," << csv_num(lat.sigma[j].s) << ","
                  << csv_num(lat.tau(i)) << "," << csv_num(spec.psi_at(lat, i, j)) << ","
                  << csv_num(spec.vtilde(lat, i, j)) << "\n";
    }
    json j;
    j["subcritical"] = false;
    j["lambda0"] = spec.lambda0;
    j["C"] = spec.C;
    j["residual"] = spec.residual;
    j["psi_min"] = spec.psi_min;
    j["psi_max"] = spec.psi_max;
    j["bounds_check"] = spec.bounds_ok;
    j["tau_max"] = lat.tau_max;
    j["I"] = lat.rows() - 1;
    j["J"] = lat.cols();
    write_json(out, "spectral_summary.json", j);
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out, Exec exec) {
    RunResult res = simulate(cfg, exec);
    const DensityField& field = res.field;
    const CharacteristicLattice& lat = *res.setup.lattice;
    for (const std::string& w : res.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    {
        std::ofstream f = open_out(out, "birth_rate.csv");
        f << "t,B\n";
        for (int n = 0; n <= field.n_t; ++n)
            f << csv_num(field.time(n)) << "," << csv_num(field.B[n]) << "\n";
    }
    {
        std::ofstream f = open_out(out, "diagnostics.csv");
        f << "t,mass,psi_mass,m_closed_form,deviation,bound_rhs\n";
        try {
            SpectralSolution spec = solve_spectral(lat, cfg.root_tol, exec);
            for (const DiagnosticsRow& r : diagnostics_table(field, spec))
                f << csv_num(r.t) << "," << csv_num(r.mass) << "," << csv_num(r.psi_mass)
                  << "," << csv_num(r.m_closed_form) << "," << csv_num(r.deviation) << ","
                  << csv_num(r.bound_rhs) << "\n";
        } catch (const SubcriticalError& e) {
            std::fprintf(stderr, "diagnostics reduced to mass only: %s\n", e.what());
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (int n = 0; n <= field.n_t; ++n) {
                double mass = weighted_mass(field, n, [](const PhasePoint&) { return 1.0; });
                f << csv_num(field.time(n)) << "," << csv_num(mass);
                for (int k = 0; k < 4; ++k) f << "," << csv_num(nan);
                f << "\n";
            }
        }
    }

    std::vector<double> snaps = cfg.snapshot_times;
    if (snaps.empty()) snaps = {0.0, cfg.T / 2.0, cfg.T};
    for (size_t k = 0; k < snaps.size(); ++k) {
        int n = std::min<int>(field.n_t, std::max(0L, std::lround(snaps[k] / field.dt)));
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
        std::ofstream f = open_out(out, name);
        f << "t,side,s,tau,x,theta,rho_tilde,jacobian,rho_physical\n";
        for (int i = 0; i < lat.rows(); ++i)
            for (int j = 0; j < lat.cols(); ++j) {
                double v = field.value(n, i, j);
                double jac = lat.jac(i, j);
                f << csv_num(field.time(n)) << "," << int(lat.sigma[j].side) << ","
                  << csv_num(lat.sigma[j].s) << "," << csv_num(lat.tau(i)) << ","
                  << csv_num(lat.pos(i, j).x) << "," << csv_num(lat.pos(i, j).theta) << ","
                  << csv_num(v) << "," << csv_num(jac) << "," << csv_num(v / jac) << "\n";
            }
    }
    return 0;
}

int cmd_validate(const RunConfig& cfg, const std::string& out, Exec exec) {
    ValidationReport rep = run_validation(cfg, exec);

    json checks = json::array();
    int passed = 0, failed = 0, skipped = 0;
    for (const CheckResult& c : rep.checks) {
        std::printf("%-26s %-5s value=%-13.6g threshold=%-13.6g %s\n", c.name.c_str(),
                    c.status.c_str(), c.value, c.threshold, c.detail.c_str());
        json row;
        row["name"] = c.name;
        row["status"] = c.status;
        row["value"] = c.value;
        row["threshold"] = c.threshold;
        if (!c.detail.empty()) row["detail"] = c.detail;
        checks.push_back(row);
        if (c.status == "pass") ++passed;
        else if (c.status == "fail") ++failed;
        else ++skipped;
    }
    std::printf("validation: %d passed, %d failed, %d skipped\n", passed, failed, skipped);

    json j;
    j["all_passed"] = rep.all_passed();
    j["passed"] = passed;
    j["failed"] = failed;
    j["skipped"] = skipped;
    j["checks"] = checks;
    write_json(out, "validation.json", j);
    return rep.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured metastatic growth: transport, renewal and spectral tools"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    long long seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (default: current)");
        sub->add_option("--seed", seed_override, "override the configured RNG seed");
        return sub;
    };
    CLI::App* sub_phase = add_common(app.add_subcommand(
        "phase", "sample growth trajectories from the domain boundary"));
    CLI::App* sub_spectral = add_common(app.add_subcommand(
        "spectral", "Malthus exponent, eigenvectors and transform scan"));
    CLI::App* sub_simulate = add_common(app.add_subcommand(
        "simulate", "density run: birth rate, diagnostics, snapshots"));
    CLI::App* sub_validate = add_common(app.add_subcommand(
        "validate", "run the invariant battery and write validation.json"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (seed_override >= 0) cfg.seed = std::uint64_t(seed_override);
        validate(cfg);
        Exec exec = Exec::OpenMP;
        if (*sub_phase) return cmd_phase(cfg, out_dir);
        if (*sub_spectral) return cmd_spectral(cfg, out_dir, exec);
        if (*sub_simulate) return cmd_simulate(cfg, out_dir, exec);
        if (*sub_validate) return cmd_validate(cfg, out_dir, exec);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
