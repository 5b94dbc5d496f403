#ifndef MDFLOW_NEWTON_HPP
#define MDFLOW_NEWTON_HPP

#include <string>
#include <vector>

#include "mdflow/assembly.hpp"

namespace mdflow {

struct NewtonOptions {
    double tol = 1e-6;
    int max_iter = 15;
};

//! Flip counts aggregated per entity group for one Newton solve.
struct FlipCounts {
    std::vector<long> per_subdomain;
    std::vector<long> per_mortar;

    FlipCounts() = default;
    FlipCounts(std::size_t ns, std::size_t nm) : per_subdomain(ns, 0), per_mortar(nm, 0) {}
    void add(const FlipCounts& o);
    long by_dim(const MixedDimDomain& domain, int dim) const;
    long mortars_total() const;
};

struct NewtonResult {
    bool converged = false;
    int iterations = 0;
    std::string failure;  // empty when converged
    FlipCounts flips;
    int clip_events = 0;
    int clip_events_interior = 0;  // clips of cells that were well inside (0,1)
};

//! Damped-free Newton with frozen upwind choices inside each iterate:
//! solve J dx = -r, update, clip saturations to [0,1], stop when
//! ||dx||_2 / sqrt(dim) < tol. Flips are counted between the upwind
//! signatures of consecutive iterates.
NewtonResult newton_solve(const Discretization& disc, const FluidPair& fluid, double gravity,
                          State& state, const State& previous, double dt,
                          const NewtonOptions& opts = NewtonOptions{},
                          const Sources* sources = nullptr);

//! Implicit-Euler march with halving of the timestep on Newton failure and a
//! hard floor of dt_min = 1e-12 below which the run aborts.
struct TimeController {
    double dt_max = 0.1;
    double dt_min = 1e-12;
    double t_end = 1.0;
    double t = 0.0;
};

struct StepRecord {
    double t = 0.0;
    double dt = 0.0;
    int newton_iters = 0;
    long cum_newton_iters = 0;  // includes iterations of discarded attempts
    int cuts = 0;
    long cum_cuts = 0;
    long flips_2d = 0, flips_1d = 0, flips_mortar = 0;
    long cum_flips_2d = 0, cum_flips_1d = 0, cum_flips_mortar = 0;
    double mass_phase0 = 0.0, mass_phase1 = 0.0;
    int clip_events = 0;
};

struct RunReport {
    std::vector<StepRecord> rows;
    std::string status = "completed";  // or "dt_underflow"
    double E_A = 0.0;
    std::string case_name, scheme;
    // flips burnt in attempts that were cut and discarded
    long wasted_flips_2d = 0, wasted_flips_1d = 0, wasted_flips_mortar = 0;
    long wasted_newton_iters = 0;

    long cum_newton_iters() const { return rows.empty() ? 0 : rows.back().cum_newton_iters; }
    long cum_cuts() const { return rows.empty() ? 0 : rows.back().cum_cuts; }
    long total_flips_2d() const {
        return (rows.empty() ? 0 : rows.back().cum_flips_2d) + wasted_flips_2d;
    }
    long total_flips_1d() const {
        return (rows.empty() ? 0 : rows.back().cum_flips_1d) + wasted_flips_1d;
    }
    long total_flips_mortar() const {
        return (rows.empty() ? 0 : rows.back().cum_flips_mortar) + wasted_flips_mortar;
    }
};

struct RunResult {
    RunReport report;
    std::vector<double> times;   // accepted times, starting at t = 0
    std::vector<State> states;   // states at those times (index 0 = initial)
    bool completed() const { return report.status == "completed"; }
};

RunResult advance(const Discretization& disc, const FluidPair& fluid, double gravity,
                  TimeController controller, const State& initial,
                  const NewtonOptions& opts = NewtonOptions{},
                  const Sources* sources = nullptr);

} // namespace mdflow

#endif
