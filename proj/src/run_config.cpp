#include "nls2d/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace nls2d {

void RunConfig::validate() const {
    if (nx < 2 || ny < 2) throw ConfigError("nx and ny must be >= 2");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("lx and ly must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_end >= dt)) throw ConfigError("t_end must be >= dt");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
    if (workers < 1 || workers > 3) throw ConfigError("workers must be in 1..3");
    for (double t : snapshot_times)
        if (t < 0.0 || t > t_end + 1e-12) throw ConfigError("snapshot time outside [0, t_end]");
}

GridModel RunConfig::make_model() const {
    const GridSpec grid(nx, ny, lx, ly);
    if (v0 != 0.0) return GridModel(grid, gamma, build_delta_potential(grid, v0));
    return GridModel(grid, gamma);
}

State RunConfig::make_initial(const GridModel& model) const {
    if (initial == InitialKind::Cosine) return initial_condition(model.grid());
    const int n = model.points();
    return State(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for " + key + ": '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer value for " + key + ": '" + v + "'");
    }
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "lx") cfg.lx = parse_double(key, value);
    else if (key == "ly") cfg.ly = parse_double(key, value);
    else if (key == "nx") cfg.nx = parse_int(key, value);
    else if (key == "ny") cfg.ny = parse_int(key, value);
    else if (key == "t_end") cfg.t_end = parse_double(key, value);
    else if (key == "dt") cfg.dt = parse_double(key, value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "v0") cfg.v0 = parse_double(key, value);
    else if (key == "epsilon") cfg.epsilon = parse_double(key, value);
    else if (key == "max_iters") cfg.max_iters = parse_int(key, value);
    else if (key == "max_halvings") cfg.max_halvings = parse_int(key, value);
    else if (key == "workers") cfg.workers = parse_int(key, value);
    else if (key == "method") {
        const auto m = parse_method(value);
        if (!m) throw ConfigError("unknown method: '" + value + "'");
        cfg.method = *m;
    } else if (key == "initial") {
        if (value == "cosine") cfg.initial = InitialKind::Cosine;
        else if (value == "uniform") cfg.initial = InitialKind::Uniform;
        else throw ConfigError("initial must be 'cosine' or 'uniform'");
    } else if (key == "participation") {
        if (value == "normalized") cfg.raw_participation = false;
        else if (value == "raw") cfg.raw_participation = true;
        else throw ConfigError("participation must be 'normalized' or 'raw'");
    } else if (key == "solver") {
        if (value == "direct") cfg.solver = SolverKind::Direct;
        else if (value == "gmres") cfg.solver = SolverKind::Gmres;
        else throw ConfigError("solver must be 'direct' or 'gmres'");
    } else if (key == "snapshot_times") {
        cfg.snapshot_times.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.snapshot_times.push_back(parse_double(key, item));
        }
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else {
        throw ConfigError("unknown config key: '" + key + "'");
    }
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        apply_key_value(base, key, value);
    }
    return base;
}

}  // namespace nls2d
