#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nls2d/run_config.hpp"

namespace nls2d {

struct TrajectoryRow {
    double t = 0.0;
    double u_kinetic = 0.0;
    double u_nonlinear = 0.0;
    double u_external = 0.0;
    double total_energy = 0.0;
    double probability = 0.0;
    double participation = 0.0;
    int newton_iters = 0;
    double wall_seconds = 0.0;
};

struct TrajectoryRecord {
    std::vector<TrajectoryRow> rows;
    State final_state;
    double solve_seconds = 0.0;  // factorizations + triangular solves
    double wall_seconds = 0.0;   // whole stepping loop

    /// Deviation maxima relative to the t=0 row; a non-finite value counts
    /// as infinite drift.
    double max_energy_drift() const;
    double max_probability_drift() const;
};

/// Steps the configured problem to t_end, recording observables per step and
/// writing trajectory.csv plus snapshot files when cfg.out_dir is set.
TrajectoryRecord run(const RunConfig& cfg);

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

struct MethodReport {
    MethodId method = MethodId::Mb4;
    double energy_drift = 0.0;
    double probability_drift = 0.0;
    double mean_step_seconds = 0.0;
    int total_newton_iters = 0;
};

struct CompareReport {
    std::vector<MethodReport> methods;
    double mb4_over_gauss2 = 0.0;
    double avf4_over_gauss2 = 0.0;

    void write(std::ostream& os) const;
};

CompareReport compare_methods(const RunConfig& cfg, const std::vector<MethodId>& methods);

struct BenchReport {
    double serial_step_seconds = 0.0;
    double parallel_step_seconds = 0.0;
    double speedup = 0.0;
    double solve_fraction = 0.0;  // measured on the 1-worker run
    bool trajectories_identical = false;

    void write(std::ostream& os) const;
};

/// Identical MB4 workloads with 1 and 3 workers; the trajectories must match
/// bit for bit.
BenchReport parallel_bench(const RunConfig& cfg);

struct ConvergenceReport {
    struct Entry {
        MethodId method;
        std::vector<double> h_values;
        std::vector<double> errors;  // relative l2 error at t_end vs reference
        double slope = 0.0;          // least-squares log-log fit
    };
    std::vector<Entry> entries;

    void write(std::ostream& os) const;
};

/// Errors against a same-method reference run at h_min/8.
ConvergenceReport convergence_study(const RunConfig& cfg, const std::vector<MethodId>& methods,
                                    const std::vector<double>& h_list);

}  // namespace nls2d
