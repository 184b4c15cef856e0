#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nls2d/integrators.hpp"

namespace nls2d {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class InitialKind { Cosine, Uniform };

struct RunConfig {
    double lx = 2.0 * 3.14159265358979323846;
    double ly = 2.0 * 3.14159265358979323846;
    int nx = 70;
    int ny = 70;
    double t_end = 1.0;
    double dt = 0.01;
    double gamma = 0.1;
    double v0 = 0.0;  // depth of the single-point potential; 0 disables
    MethodId method = MethodId::Mb4;
    double epsilon = 1e-13;
    int max_iters = 50;
    int max_halvings = 4;
    int workers = 1;  // 1..3
    InitialKind initial = InitialKind::Cosine;
    bool raw_participation = false;  // report sum |u|^4 instead of the normalized ratio
    SolverKind solver = SolverKind::Direct;
    std::vector<double> snapshot_times;
    std::string out_dir;

    void validate() const;
    GridModel make_model() const;
    State make_initial(const GridModel& model) const;
};

/// Flat key = value file; '#' starts a comment. Unknown keys are errors.
RunConfig parse_config_file(const std::string& path, RunConfig base = {});
void apply_key_value(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace nls2d
