#include "nls2d/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

namespace nls2d {

namespace {

double drift_of(double value, double base) {
    if (!std::isfinite(value)) return std::numeric_limits<double>::infinity();
    return std::abs(value - base) / std::max(1.0, std::abs(base));
}

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void write_snapshot(const std::string& path, double t, const GridModel& model, const State& u) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open snapshot file: " + path);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# %.17g %d %d\n", t, model.grid().nx, model.grid().ny);
    f << buf;
    for (int j = 0; j < model.grid().ny; ++j) {
        for (int i = 0; i < model.grid().nx; ++i) {
            const double d = std::norm(u[model.grid().index(i, j)]);
            std::snprintf(buf, sizeof(buf), "%.17g%c", d, i + 1 == model.grid().nx ? '\n' : ' ');
            f << buf;
        }
    }
}

int step_count(double t_end, double dt) {
    return static_cast<int>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace

double TrajectoryRecord::max_energy_drift() const {
    if (rows.empty()) return 0.0;
    const double h0 = rows.front().total_energy;
    double d = 0.0;
    for (const auto& r : rows) d = std::max(d, drift_of(r.total_energy, h0));
    return d;
}

double TrajectoryRecord::max_probability_drift() const {
    if (rows.empty()) return 0.0;
    const double p0 = rows.front().probability;
    double d = 0.0;
    for (const auto& r : rows) d = std::max(d, drift_of(r.probability, p0));
    return d;
}

TrajectoryRecord run(const RunConfig& cfg) {
    cfg.validate();
    const GridModel model = cfg.make_model();
    State u = cfg.make_initial(model);

    NewtonConfig ncfg{cfg.epsilon, cfg.max_iters, cfg.max_halvings};
    WorkerPool pool(cfg.method == MethodId::Mb4 ? cfg.workers : 1);
    StepDriver driver(model, cfg.method, ncfg, cfg.solver, &pool);

    const bool want_files = !cfg.out_dir.empty();
    if (want_files) std::filesystem::create_directories(cfg.out_dir);

    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t snap_next = 0;

    TrajectoryRecord rec;
    const int nsteps = step_count(cfg.t_end, cfg.dt);
    rec.rows.reserve(nsteps + 1);

    auto record_row = [&](double t, int iters, double wall) {
        const Observables obs = observables(model, u);
        TrajectoryRow row;
        row.t = t;
        row.u_kinetic = obs.u_kinetic;
        row.u_nonlinear = obs.u_nonlinear;
        row.u_external = obs.u_external;
        row.total_energy = obs.total_energy;
        row.probability = obs.probability;
        row.participation = cfg.raw_participation ? obs.raw_quartic : obs.participation;
        row.newton_iters = iters;
        row.wall_seconds = wall;
        rec.rows.push_back(row);
        while (snap_next < snaps.size() && t + 1e-12 >= snaps[snap_next]) {
            if (want_files)
                write_snapshot(cfg.out_dir + "/snapshot_" + format_g(snaps[snap_next]) + ".txt",
                               t, model, u);
            ++snap_next;
        }
    };

    const auto run_start = std::chrono::steady_clock::now();
    record_row(0.0, 0, 0.0);
    for (int s = 1; s <= nsteps; ++s) {
        const double t_prev = (s - 1) * cfg.dt;
        const double t_next = std::min(s * cfg.dt, cfg.t_end);
        const double h = t_next - t_prev;
        StepStats stats;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            u = driver.advance(u, h, &stats);
        } catch (NonConvergenceError& e) {
            e.at_time = t_prev;
            throw;
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.solve_seconds += stats.solve_seconds;
        record_row(t_next, stats.newton_iters, wall);
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    rec.final_state = std::move(u);

    if (want_files) {
        std::ofstream f(cfg.out_dir + "/trajectory.csv");
        if (!f) throw std::runtime_error("cannot open trajectory.csv in " + cfg.out_dir);
        write_trajectory_csv(f, rec);
    }
    return rec;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
    os << "t,UK,UI,UE,H,prob,participation,newton_iters,wall_s\n";
    char buf[352];
    for (const auto& r : record.rows) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.6g\n", r.t, r.u_kinetic,
                      r.u_nonlinear, r.u_external, r.total_energy, r.probability, r.participation,
                      r.newton_iters, r.wall_seconds);
        os << buf;
    }
}

CompareReport compare_methods(const RunConfig& cfg, const std::vector<MethodId>& methods) {
    CompareReport rep;
    double gauss2_time = 0.0, mb4_time = 0.0, avf4_time = 0.0;
    for (MethodId m : methods) {
        RunConfig c = cfg;
        c.method = m;
        c.out_dir.clear();
        const TrajectoryRecord rec = run(c);
        MethodReport mr;
        mr.method = m;
        mr.energy_drift = rec.max_energy_drift();
        mr.probability_drift = rec.max_probability_drift();
        const int nsteps = std::max<std::size_t>(1, rec.rows.size() - 1);
        double wall = 0.0;
        int iters = 0;
        for (const auto& r : rec.rows) {
            wall += r.wall_seconds;
            iters += r.newton_iters;
        }
        mr.mean_step_seconds = wall / nsteps;
        mr.total_newton_iters = iters;
        rep.methods.push_back(mr);
        if (m == MethodId::Gauss2) gauss2_time = mr.mean_step_seconds;
        if (m == MethodId::Mb4) mb4_time = mr.mean_step_seconds;
        if (m == MethodId::Avf4) avf4_time = mr.mean_step_seconds;
    }
    if (gauss2_time > 0.0) {
        rep.mb4_over_gauss2 = mb4_time / gauss2_time;
        rep.avf4_over_gauss2 = avf4_time / gauss2_time;
    }
    return rep;
}

void CompareReport::write(std::ostream& os) const {
    os << "method  energy_drift  probability_drift  mean_step_seconds  newton_iters\n";
    char buf[192];
    for (const auto& m : methods) {
        std::snprintf(buf, sizeof(buf), "%-7s %.3e     %.3e          %.6f           %d\n",
                      method_name(m.method).c_str(), m.energy_drift, m.probability_drift,
                      m.mean_step_seconds, m.total_newton_iters);
        os << buf;
    }
    char line[96];
    std::snprintf(line, sizeof(line), "time ratio MB4/GAUSS2  = %.3f\n", mb4_over_gauss2);
    os << line;
    std::snprintf(line, sizeof(line), "time ratio AVF4/GAUSS2 = %.3f\n", avf4_over_gauss2);
    os << line;
}

namespace {

bool rows_identical(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (x.t != y.t || x.u_kinetic != y.u_kinetic || x.u_nonlinear != y.u_nonlinear ||
            x.u_external != y.u_external || x.total_energy != y.total_energy ||
            x.probability != y.probability || x.participation != y.participation ||
            x.newton_iters != y.newton_iters)
            return false;
    }
    if (a.final_state.size() != b.final_state.size()) return false;
    for (std::size_t i = 0; i < a.final_state.size(); ++i)
        if (a.final_state[i] != b.final_state[i]) return false;
    return true;
}

}  // namespace

BenchReport parallel_bench(const RunConfig& cfg) {
    RunConfig base = cfg;
    base.method = MethodId::Mb4;
    base.out_dir.clear();

    RunConfig serial = base;
    serial.workers = 1;
    const TrajectoryRecord rec1 = run(serial);

    RunConfig parallel = base;
    parallel.workers = 3;
    const TrajectoryRecord rec3 = run(parallel);

    const int nsteps = std::max<std::size_t>(1, rec1.rows.size() - 1);
    BenchReport rep;
    rep.serial_step_seconds = rec1.wall_seconds / nsteps;
    rep.parallel_step_seconds = rec3.wall_seconds / nsteps;
    rep.speedup = rep.serial_step_seconds / rep.parallel_step_seconds;
    rep.solve_fraction = rec1.solve_seconds / rec1.wall_seconds;
    rep.trajectories_identical = rows_identical(rec1, rec3);
    return rep;
}

void BenchReport::write(std::ostream& os) const {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "per-step seconds, 1 worker  = %.6f\n", serial_step_seconds);
    os << buf;
    std::snprintf(buf, sizeof(buf), "per-step seconds, 3 workers = %.6f\n", parallel_step_seconds);
    os << buf;
    std::snprintf(buf, sizeof(buf), "speedup                     = %.3f\n", speedup);
    os << buf;
    std::snprintf(buf, sizeof(buf), "solve-phase fraction        = %.3f\n", solve_fraction);
    os << buf;
    os << "trajectories bit-identical  = " << (trajectories_identical ? "yes" : "no") << '\n';
}

ConvergenceReport convergence_study(const RunConfig& cfg, const std::vector<MethodId>& methods,
                                    const std::vector<double>& h_list) {
    if (h_list.size() < 3) throw ConfigError("convergence_study: need at least 3 h values");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1])) throw ConfigError("convergence_study: h_list must descend");

    ConvergenceReport rep;
    for (MethodId m : methods) {
        RunConfig base = cfg;
        base.method = m;
        base.out_dir.clear();
        base.snapshot_times.clear();

        RunConfig ref_cfg = base;
        ref_cfg.dt = h_list.back() / 8.0;
        const State ref = run(ref_cfg).final_state;
        double ref_norm = 0.0;
        for (const Complex& z : ref) ref_norm += std::norm(z);
        ref_norm = std::sqrt(ref_norm);

        ConvergenceReport::Entry entry;
        entry.method = m;
        for (double h : h_list) {
            RunConfig c = base;
            c.dt = h;
            const State uh = run(c).final_state;
            double err = 0.0;
            for (std::size_t k = 0; k < uh.size(); ++k) err += std::norm(uh[k] - ref[k]);
            entry.h_values.push_back(h);
            entry.errors.push_back(std::sqrt(err) / ref_norm);
        }
        // least-squares slope of log(err) vs log(h)
        const int n = static_cast<int>(h_list.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = std::log(entry.h_values[i]);
            const double y = std::log(entry.errors[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        entry.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        rep.entries.push_back(std::move(entry));
    }
    return rep;
}

void ConvergenceReport::write(std::ostream& os) const {
    char buf[96];
    for (const auto& e : entries) {
        os << method_name(e.method) << ":\n";
        for (std::size_t i = 0; i < e.h_values.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "  h = %-10.6g error = %.6e\n", e.h_values[i],
                          e.errors[i]);
            os << buf;
        }
        std::snprintf(buf, sizeof(buf), "  fitted order = %.3f\n", e.slope);
        os << buf;
    }
}

}  // namespace nls2d
