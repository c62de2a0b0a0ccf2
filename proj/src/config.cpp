#include "metastat/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace metastat {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& section, const std::string& key,
                    const std::string& v) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
        throw ConfigError("[" + section + "] " + key + ": not a finite number: '" + v + "'");
    return x;
}

long parse_int(const std::string& section, const std::string& key, const std::string& v) {
    char* end = nullptr;
    long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("[" + section + "] " + key + ": not an integer: '" + v + "'");
    return x;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("[" + section + "] " + key + ": expected true/false: '" + v + "'");
}

std::vector<double> parse_list(const std::string& section, const std::string& key,
                               const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(section, key, item));
    }
    return out;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "growth" && section != "emission" && section != "grids" &&
                section != "initial_data" && section != "source" &&
                section != "tolerances" && section != "phase" && section != "spectral" &&
                section != "output" && section != "run")
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any section");

        auto unknown = [&]() -> ConfigError {
            return ConfigError("unknown key '" + key + "' in [" + section + "]");
        };

        if (section == "growth") {
            if (key == "a") cfg.a = parse_double(section, key, val);
            else if (key == "c") cfg.c = parse_double(section, key, val);
            else if (key == "d") cfg.d = parse_double(section, key, val);
            else throw unknown();
        } else if (section == "emission") {
            if (key == "m") cfg.m = parse_double(section, key, val);
            else if (key == "alpha") cfg.alpha = parse_double(section, key, val);
            else if (key == "profile") {
                if (val == "hat") cfg.profile = ProfileKind::Hat;
                else if (val == "table") cfg.profile = ProfileKind::Table;
                else throw ConfigError("[emission] profile: expected hat|table: '" + val + "'");
            } else if (key == "hat_center") cfg.hat_center = parse_double(section, key, val);
            else if (key == "hat_width") cfg.hat_width = parse_double(section, key, val);
            else if (key == "table_path") cfg.profile_table = val;
            else throw unknown();
        } else if (section == "grids") {
            if (key == "I") cfg.I = int(parse_int(section, key, val));
            else if (key == "J") cfg.J = int(parse_int(section, key, val));
            else if (key == "T") cfg.T = parse_double(section, key, val);
            else if (key == "tau_max") cfg.tau_max = parse_double(section, key, val);
            else throw unknown();
        } else if (section == "initial_data") {
            if (key == "kind") {
                if (val == "zero") cfg.initial = InitialKind::Zero;
                else if (val == "gaussian") cfg.initial = InitialKind::Gaussian;
                else if (val == "uniform") cfg.initial = InitialKind::Uniform;
                else if (val == "lattice_csv") cfg.initial = InitialKind::LatticeCsv;
                else throw ConfigError(
                    "[initial_data] kind: expected zero|gaussian|uniform|lattice_csv: '" +
                    val + "'");
            } else if (key == "center_x") cfg.init_center_x = parse_double(section, key, val);
            else if (key == "center_theta")
                cfg.init_center_theta = parse_double(section, key, val);
            else if (key == "width") cfg.init_width = parse_double(section, key, val);
            else if (key == "amplitude") cfg.init_amplitude = parse_double(section, key, val);
            else if (key == "path") cfg.initial_path = val;
            else throw unknown();
        } else if (section == "source") {
            if (key == "mode") {
                if (val == "none") cfg.source = SourceMode::None;
                else if (val == "primary_tumor") cfg.source = SourceMode::PrimaryTumor;
                else if (val == "table") cfg.source = SourceMode::Table;
                else throw ConfigError(
                    "[source] mode: expected none|primary_tumor|table: '" + val + "'");
            } else if (key == "x0") cfg.source_x0 = parse_double(section, key, val);
            else if (key == "theta0") cfg.source_theta0 = parse_double(section, key, val);
            else if (key == "path") cfg.source_table = val;
            else throw unknown();
        } else if (section == "tolerances") {
            if (key == "ode_tol") cfg.ode_tol = parse_double(section, key, val);
            else if (key == "root_tol") cfg.root_tol = parse_double(section, key, val);
            else if (key == "quad_tol") cfg.quad_tol = parse_double(section, key, val);
            else throw unknown();
        } else if (section == "phase") {
            if (key == "trajectories")
                cfg.phase_trajectories = int(parse_int(section, key, val));
            else if (key == "samples") cfg.phase_samples = int(parse_int(section, key, val));
            else if (key == "t_end") cfg.phase_t_end = parse_double(section, key, val);
            else if (key == "include_equilibrium")
                cfg.phase_include_equilibrium = parse_bool(section, key, val);
            else throw unknown();
        } else if (section == "spectral") {
            if (key == "lambda_min") cfg.lambda_min = parse_double(section, key, val);
            else if (key == "lambda_max") cfg.lambda_max = parse_double(section, key, val);
            else if (key == "scan_points")
                cfg.scan_points = int(parse_int(section, key, val));
            else throw unknown();
        } else if (section == "output") {
            if (key == "snapshots") cfg.snapshot_times = parse_list(section, key, val);
            else throw unknown();
        } else if (section == "run") {
            if (key == "seed") cfg.seed = std::uint64_t(parse_int(section, key, val));
            else throw unknown();
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_ini(const RunConfig& c) {
    std::ostringstream o;
    o << "[growth]\n"
      << "a = " << fmt(c.a) << "\nc = " << fmt(c.c) << "\nd = " << fmt(c.d) << "\n\n";

    o << "[emission]\n"
      << "m = " << fmt(c.m) << "\nalpha = " << fmt(c.alpha) << "\n"
      << "profile = " << (c.profile == ProfileKind::Hat ? "hat" : "table") << "\n"
      << "hat_center = " << fmt(c.hat_center) << "\nhat_width = " << fmt(c.hat_width) << "\n";
    if (!c.profile_table.empty()) o << "table_path = " << c.profile_table << "\n";
    o << "\n";

    o << "[grids]\n"
      << "I = " << c.I << "\nJ = " << c.J << "\nT = " << fmt(c.T)
      << "\ntau_max = " << fmt(c.tau_max) << "\n\n";

    o << "[initial_data]\n";
    const char* kind = c.initial == InitialKind::Zero      ? "zero"
                       : c.initial == InitialKind::Gaussian ? "gaussian"
                       : c.initial == InitialKind::Uniform  ? "uniform"
                                                             : "lattice_csv";
    o << "kind = " << kind << "\n"
      << "center_x = " << fmt(c.init_center_x)
      << "\ncenter_theta = " << fmt(c.init_center_theta)
      << "\nwidth = " << fmt(c.init_width) << "\namplitude = " << fmt(c.init_amplitude)
      << "\n";
    if (!c.initial_path.empty()) o << "path = " << c.initial_path << "\n";
    o << "\n";

    o << "[source]\n";
    const char* mode = c.source == SourceMode::None          ? "none"
                       : c.source == SourceMode::PrimaryTumor ? "primary_tumor"
                                                               : "table";
    o << "mode = " << mode << "\nx0 = " << fmt(c.source_x0)
      << "\ntheta0 = " << fmt(c.source_theta0) << "\n";
    if (!c.source_table.empty()) o << "path = " << c.source_table << "\n";
    o << "\n";

    o << "[tolerances]\n"
      << "ode_tol = " << fmt(c.ode_tol) << "\nroot_tol = " << fmt(c.root_tol)
      << "\nquad_tol = " << fmt(c.quad_tol) << "\n\n";

    o << "[phase]\n"
      << "trajectories = " << c.phase_trajectories << "\nsamples = " << c.phase_samples
      << "\nt_end = " << fmt(c.phase_t_end) << "\ninclude_equilibrium = "
      << (c.phase_include_equilibrium ? "true" : "false") << "\n\n";

    o << "[spectral]\n"
      << "lambda_min = " << fmt(c.lambda_min) << "\nlambda_max = " << fmt(c.lambda_max)
      << "\nscan_points = " << c.scan_points << "\n\n";

    o << "[output]\n";
    if (!c.snapshot_times.empty()) {
        o << "snapshots = ";
        for (size_t k = 0; k < c.snapshot_times.size(); ++k)
            o << (k ? ", " : "") << fmt(c.snapshot_times[k]);
        o << "\n";
    }
    o << "\n[run]\nseed = " << c.seed << "\n";
    return o.str();
}

void validate(const RunConfig& c) {
    if (!(c.a > 0.0) || !(c.c > 0.0) || !(c.d > 0.0))
        throw ConfigError("growth rates a, c, d must all be positive");
    if (!(c.c > c.d))
        throw ConfigError("need c > d, otherwise the carrying capacity b <= 1 "
                          "and the domain is empty");
    if (c.m < 0.0) throw ConfigError("emission m must be nonnegative");
    if (!(c.ode_tol > 0.0) || !(c.root_tol > 0.0) || !(c.quad_tol > 0.0))
        throw ConfigError("all tolerances must be positive");
    if (!(c.T > 0.0)) throw ConfigError("horizon T must be positive");
    if (c.tau_max < 0.0) throw ConfigError("tau_max must be >= 0 (0 = auto)");
    if (c.I < 1 || c.J < 1) throw ConfigError("grid counts I, J must be positive");
    if (c.phase_trajectories < 1 || c.phase_samples < 2)
        throw ConfigError("[phase] needs trajectories >= 1 and samples >= 2");
    if (!(c.phase_t_end > 0.0)) throw ConfigError("[phase] t_end must be positive");
    if (c.scan_points < 2) throw ConfigError("[spectral] scan_points must be >= 2");
    if (c.lambda_min < 0.0 || c.lambda_max < 0.0 || c.lambda_max < c.lambda_min)
        throw ConfigError("[spectral] scan range must satisfy 0 <= lambda_min <= lambda_max");
    if (c.profile == ProfileKind::Table && c.profile_table.empty())
        throw ConfigError("[emission] profile = table requires table_path");
    if (c.initial == InitialKind::LatticeCsv && c.initial_path.empty())
        throw ConfigError("[initial_data] kind = lattice_csv requires path");
    if (c.source == SourceMode::Table && c.source_table.empty())
        throw ConfigError("[source] mode = table requires path");
    for (double t : c.snapshot_times)
        if (t < 0.0 || t > c.T)
            throw ConfigError("snapshot times must lie in [0, T]");
}

void validate_for_simulate(const RunConfig& c) {
    validate(c);
    if (c.I < 8 || c.J < 8)
        throw ConfigError("density runs need I >= 8 and J >= 8");
    if (c.J % 4 != 0)
        throw ConfigError("J must be divisible by 4 (per-side node count)");
}

} // namespace metastat
