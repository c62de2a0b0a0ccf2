#include "metastat/run.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "metastat/csv.hpp"

namespace metastat {

namespace {

EmissionProfile make_profile(const RunConfig& cfg, const GrowthParams& params,
                             int per_side) {
    if (cfg.profile == ProfileKind::Hat) {
        const double span = params.b - 1.0;
        if (cfg.hat_center == 0.0 && cfg.hat_width == 0.0)
            return EmissionProfile::triangular_hat(params, per_side);
        double center = cfg.hat_center == 0.0 ? 0.5 * span : cfg.hat_center;
        double width = cfg.hat_width == 0.0 ? 0.5 * span : cfg.hat_width;
        return EmissionProfile::triangular_hat(params, per_side, center, width);
    }
    CsvTable t = read_csv(cfg.profile_table);
    if (t.header != std::vector<std::string>{"side", "s", "value"})
        throw ConfigError(cfg.profile_table + ": expected header side,s,value");
    std::vector<std::tuple<Side, double, double>> rows;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& cells = t.rows[r];
        std::string ctx = cfg.profile_table + " row " + std::to_string(r + 2);
        if (cells.size() != 3) throw ConfigError(ctx + ": expected 3 columns");
        long side = csv_to_long(cells[0], ctx);
        if (side < 1 || side > 4) throw ConfigError(ctx + ": side must be 1..4");
        rows.emplace_back(Side(side), csv_to_double(cells[1], ctx),
                          csv_to_double(cells[2], ctx));
    }
    return EmissionProfile::from_table(params, per_side, rows);
}

// Nearest lattice indices for a (side, s, tau) row; rejects off-node values.
std::pair<int, int> locate_node(const CharacteristicLattice& lat, long side, double s,
                                double tau, const std::string& ctx) {
    if (side < 1 || side > 4) throw ConfigError(ctx + ": side must be 1..4");
    const int per_side = lat.cols() / 4;
    int j_local = int(std::lround(s / lat.ds - 0.5));
    int i = int(std::lround(tau / lat.dtau));
    if (j_local < 0 || j_local >= per_side ||
        std::abs((j_local + 0.5) * lat.ds - s) > 1e-6 * lat.ds)
        throw ConfigError(ctx + ": s does not match a lattice node");
    if (i < 0 || i >= lat.rows() || std::abs(i * lat.dtau - tau) > 1e-6 * lat.dtau)
        throw ConfigError(ctx + ": tau does not match a lattice row");
    return {i, int(side - 1) * per_side + j_local};
}

} // namespace

RunSetup prepare_setup(const RunConfig& cfg, Exec exec) {
    validate(cfg);
    if (cfg.J % 4 != 0 || cfg.J < 8)
        throw ConfigError("J must be divisible by 4 and >= 8");
    GrowthParams params = GrowthParams::make(cfg.a, cfg.c, cfg.d);
    BirthLaw beta = BirthLaw::make(cfg.m, cfg.alpha);
    EmissionProfile profile = make_profile(cfg, params, cfg.J / 4);

    LatticeOptions lopt;
    lopt.ode_tol = cfg.ode_tol;
    lopt.tau_max_override = cfg.tau_max;
    lopt.exec = exec;
    auto lattice = std::make_unique<CharacteristicLattice>(
        build_lattice(params, profile, beta, cfg.I, cfg.J, lopt));
    return RunSetup{params, beta, std::move(profile), std::move(lattice)};
}

int time_panel_count(const RunConfig& cfg, const CharacteristicLattice& lat) {
    int n_t = int(std::floor(cfg.T / lat.dtau + 1e-9));
    if (n_t < 1)
        throw ConfigError("horizon T is shorter than one lattice step; "
                          "raise T or the tau resolution I");
    return n_t;
}

std::vector<double> make_initial_data(const RunConfig& cfg, const CharacteristicLattice& lat) {
    const int rows = lat.rows(), cols = lat.cols();
    std::vector<double> rho0(size_t(rows) * cols, 0.0);

    switch (cfg.initial) {
    case InitialKind::Zero:
        break;
    case InitialKind::Gaussian: {
        if (!(cfg.init_width > 0.0))
            throw ConfigError("[initial_data] width must be positive");
        const double inv2w2 = 1.0 / (2.0 * cfg.init_width * cfg.init_width);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                const PhasePoint& X = lat.pos(i, j);
                double dx = X.x - cfg.init_center_x;
                double dth = X.theta - cfg.init_center_theta;
                double rho = cfg.init_amplitude * std::exp(-(dx * dx + dth * dth) * inv2w2);
                rho0[size_t(i) * cols + j] = rho * lat.jac(i, j);
            }
        break;
    }
    case InitialKind::Uniform:
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                rho0[size_t(i) * cols + j] = cfg.init_amplitude * lat.jac(i, j);
        break;
    case InitialKind::LatticeCsv: {
        CsvTable t = read_csv(cfg.initial_path);
        if (t.header != std::vector<std::string>{"side", "s", "tau", "rho_tilde"})
            throw ConfigError(cfg.initial_path + ": expected header side,s,tau,rho_tilde");
        for (size_t r = 0; r < t.rows.size(); ++r) {
            const auto& cells = t.rows[r];
            std::string ctx = cfg.initial_path + " row " + std::to_string(r + 2);
            if (cells.size() != 4) throw ConfigError(ctx + ": expected 4 columns");
            auto [i, j] = locate_node(lat, csv_to_long(cells[0], ctx),
                                      csv_to_double(cells[1], ctx),
                                      csv_to_double(cells[2], ctx), ctx);
            rho0[size_t(i) * cols + j] = csv_to_double(cells[3], ctx);
        }
        break;
    }
    }
    return rho0;
}

SourceSamples make_source(const RunConfig& cfg, const CharacteristicLattice& lat, int n_t) {
    SourceSamples src;
    src.cols = lat.cols();
    if (cfg.source == SourceMode::None) return src;

    src.values.assign(size_t(n_t + 1) * lat.cols(), 0.0);
    if (cfg.source == SourceMode::PrimaryTumor) {
        PhasePoint x0{cfg.source_x0, cfg.source_theta0};
        const double b = lat.params.b;
        if (x0.x < 1.0 || x0.x > b || x0.theta < 1.0 || x0.theta > b)
            throw ConfigError("[source] primary tumor seed must lie in [1,b]^2");
        std::vector<double> t_grid(size_t(n_t) + 1);
        for (int n = 0; n <= n_t; ++n) t_grid[n] = n * lat.dtau;
        FlowOptions fopt;
        fopt.tol = 1e-12;
        std::vector<PhasePoint> traj = primary_tumor(lat.params, x0, t_grid, fopt);
        for (int n = 0; n <= n_t; ++n) {
            double beta_p = lat.beta(traj[n]);
            for (int j = 0; j < lat.cols(); ++j)
                src.values[size_t(n) * lat.cols() + j] = lat.emission[j] * beta_p;
        }
        return src;
    }

    // table mode: rows must land exactly on grid times and lattice nodes
    CsvTable t = read_csv(cfg.source_table);
    if (t.header != std::vector<std::string>{"t", "side", "s", "value"})
        throw ConfigError(cfg.source_table + ": expected header t,side,s,value");
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& cells = t.rows[r];
        std::string ctx = cfg.source_table + " row " + std::to_string(r + 2);
        if (cells.size() != 4) throw ConfigError(ctx + ": expected 4 columns");
        double tval = csv_to_double(cells[0], ctx);
        int n = int(std::lround(tval / lat.dtau));
        if (n < 0 || n > n_t || std::abs(n * lat.dtau - tval) > 1e-6 * lat.dtau)
            throw ConfigError(ctx + ": t does not match a grid time");
        auto [i, j] = locate_node(lat, csv_to_long(cells[1], ctx),
                                  csv_to_double(cells[2], ctx), 0.0, ctx);
        (void)i;
        src.values[size_t(n) * lat.cols() + j] = csv_to_double(cells[3], ctx);
    }
    return src;
}

std::vector<double> source_forcing(const CharacteristicLattice& lat,
                                   const SourceSamples& src, int n_t) {
    std::vector<double> out(size_t(n_t) + 1, 0.0);
    if (src.empty()) return out;
    const int I = lat.rows() - 1;
    const int J = lat.cols();
    for (int n = 1; n <= n_t; ++n) {
        int m = std::min(n, I);
        double acc = 0.0;
        for (int j = 0; j < J; ++j) {
            double col =
                0.5 * (lat.beta_at(0, j) * src.at(n, j) + lat.beta_at(m, j) * src.at(n - m, j));
            for (int i = 1; i < m; ++i) col += lat.beta_at(i, j) * src.at(n - i, j);
            acc += lat.ds * col;
        }
        out[n] = lat.dtau * acc;
    }
    return out;
}

DensityField solve_field(const CharacteristicLattice& lat, const std::vector<double>& rho0,
                         const SourceSamples& src, int n_t, Exec exec) {
    std::vector<double> g = initial_tail(lat, rho0, n_t);
    std::vector<double> sf = source_forcing(lat, src, n_t);
    for (int n = 0; n <= n_t; ++n) g[n] += sf[n];

    std::vector<double> B = solve_birth_rate(kernel(lat), g, lat.dtau);
    return reconstruct(lat, B, rho0, src, exec);
}

RunResult simulate(const RunConfig& cfg, Exec exec) {
    validate_for_simulate(cfg);
    RunSetup setup = prepare_setup(cfg, exec);
    const CharacteristicLattice& lat = *setup.lattice;

    const int n_t = time_panel_count(cfg, lat);
    std::vector<double> rho0 = make_initial_data(cfg, lat);
    SourceSamples src = make_source(cfg, lat, n_t);
    DensityField field = solve_field(lat, rho0, src, n_t, exec);

    RunResult out{std::move(setup), std::move(field), {}};

    bool has_initial_mass = false;
    for (double v : rho0)
        if (v != 0.0) has_initial_mass = true;
    if (has_initial_mass && n_t >= lat.rows() - 1)
        out.warnings.push_back(
            "initial cohort ages past tau_max within the horizon; its birth "
            "contribution beyond that point is truncated to zero");
    if (has_initial_mass) {
        double fr = truncated_initial_fraction(out.field, n_t);
        if (fr > cfg.quad_tol)
            out.warnings.push_back("fraction " + csv_num(fr) +
                                   " of the initial cohort mass reached the tau_max "
                                   "cutoff by the final time (saturated at the "
                                   "equilibrium; dropped from lattice integrals)");
    }
    if (!src.empty()) {
        for (int j = 0; j < lat.cols(); ++j)
            if (src.at(0, j) != 0.0) {
                out.warnings.push_back(
                    "source does not vanish at t = 0; run proceeds on the "
                    "weak-solution pathway (regularity compatibility not met)");
                break;
            }
    }
    return out;
}

} // namespace metastat
