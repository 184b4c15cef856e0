#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "nls2d/harness.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out = ".";
    std::map<std::string, std::string> overrides;
};

void add_common_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "flat key = value config file");
    cmd->add_option("--out", opts.out, "output directory");
    static const char* keys[] = {"lx",      "ly",          "nx",           "ny",
                                 "t_end",   "dt",          "gamma",        "v0",
                                 "method",  "epsilon",     "max_iters",    "max_halvings",
                                 "workers", "initial",     "participation","solver",
                                 "snapshot_times"};
    for (const char* key : keys) {
        cmd->add_option_function<std::string>(
            std::string("--") + key,
            [key, &opts](const std::string& v) { opts.overrides[key] = v; },
            std::string("override config key ") + key);
    }
}

nls2d::RunConfig build_config(const CommonOpts& opts) {
    nls2d::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = nls2d::parse_config_file(opts.config_path, cfg);
    for (const auto& [key, value] : opts.overrides) nls2d::apply_key_value(cfg, key, value);
    cfg.out_dir = opts.out;
    cfg.validate();
    return cfg;
}

std::vector<nls2d::MethodId> parse_method_list(const std::string& csv) {
    std::vector<nls2d::MethodId> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto m = nls2d::parse_method(item);
        if (!m) throw nls2d::ConfigError("unknown method: '" + item + "'");
        out.push_back(*m);
    }
    if (out.empty()) throw nls2d::ConfigError("empty method list");
    return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

void emit_report(const std::string& out_dir, const std::string& text) {
    std::cout << text;
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir + "/report.txt");
    if (!f) throw std::runtime_error("cannot open report.txt in " + out_dir);
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D nonlinear Schrodinger lattice integrator toolkit"};
    app.require_subcommand(1);

    CommonOpts run_opts, cmp_opts, bench_opts, conv_opts;
    std::string cmp_methods = "mb4,avf2,avf4,gauss2,gauss4,rk4";
    std::string conv_methods;
    std::string h_list_csv = "0.04,0.02,0.01";

    CLI::App* cmd_run = app.add_subcommand("run", "integrate and record the trajectory");
    add_common_options(cmd_run, run_opts);

    CLI::App* cmd_cmp = app.add_subcommand("compare", "run several methods on one problem");
    add_common_options(cmd_cmp, cmp_opts);
    cmd_cmp->add_option("--methods", cmp_methods, "comma-separated method list");

    CLI::App* cmd_bench = app.add_subcommand("bench", "1-worker vs 3-worker stage solves");
    add_common_options(cmd_bench, bench_opts);

    CLI::App* cmd_conv = app.add_subcommand("converge", "order study against a fine reference");
    add_common_options(cmd_conv, conv_opts);
    cmd_conv->add_option("--methods", conv_methods, "comma-separated method list");
    cmd_conv->add_option("--h-list", h_list_csv, "descending comma-separated step sizes");

    try {
        app.parse(argc, argv);

        if (cmd_run->parsed()) {
            const nls2d::RunConfig cfg = build_config(run_opts);
            const nls2d::TrajectoryRecord rec = nls2d::run(cfg);
            std::cout << "steps: " << rec.rows.size() - 1
                      << "  energy drift: " << rec.max_energy_drift()
                      << "  probability drift: " << rec.max_probability_drift() << '\n';
        } else if (cmd_cmp->parsed()) {
            nls2d::RunConfig cfg = build_config(cmp_opts);
            cfg.out_dir.clear();
            const auto report = nls2d::compare_methods(cfg, parse_method_list(cmp_methods));
            std::ostringstream os;
            report.write(os);
            emit_report(cmp_opts.out, os.str());
        } else if (cmd_bench->parsed()) {
            nls2d::RunConfig cfg = build_config(bench_opts);
            cfg.out_dir.clear();
            const auto report = nls2d::parallel_bench(cfg);
            std::ostringstream os;
            report.write(os);
            emit_report(bench_opts.out, os.str());
        } else if (cmd_conv->parsed()) {
            nls2d::RunConfig cfg = build_config(conv_opts);
            cfg.out_dir.clear();
            const std::vector<nls2d::MethodId> methods =
                conv_methods.empty() ? std::vector<nls2d::MethodId>{cfg.method}
                                     : parse_method_list(conv_methods);
            const auto report = nls2d::convergence_study(cfg, methods, parse_double_list(h_list_csv));
            std::ostringstream os;
            report.write(os);
            emit_report(conv_opts.out, os.str());
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const nls2d::NonConvergenceError& e) {
        std::cerr << "error: " << e.what();
        if (e.at_time >= 0.0) std::cerr << " (at t = " << e.at_time << ")";
        std::cerr << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
