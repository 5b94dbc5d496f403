#include "mdflow/newton.hpp"

#include <algorithm>
#include <cmath>

#include "mdflow/errors.hpp"

namespace mdflow {

void FlipCounts::add(const FlipCounts& o) {
    if (per_subdomain.empty()) per_subdomain.assign(o.per_subdomain.size(), 0);
    if (per_mortar.empty()) per_mortar.assign(o.per_mortar.size(), 0);
    for (std::size_t i = 0; i < o.per_subdomain.size(); ++i)
        per_subdomain[i] += o.per_subdomain[i];
    for (std::size_t j = 0; j < o.per_mortar.size(); ++j) per_mortar[j] += o.per_mortar[j];
}

long FlipCounts::by_dim(const MixedDimDomain& domain, int dim) const {
    long s = 0;
    for (std::size_t i = 0; i < per_subdomain.size(); ++i)
        if (domain.subdomains[i].dim == dim) s += per_subdomain[i];
    return s;
}

long FlipCounts::mortars_total() const {
    long s = 0;
    for (long v : per_mortar) s += v;
    return s;
}

namespace {

FlipCounts count_flips(const Discretization& disc, const std::vector<std::uint8_t>& a,
                       const std::vector<std::uint8_t>& b) {
    const auto& dom = disc.domain();
    const auto& lay = disc.choice_layout();
    FlipCounts flips(dom.subdomains.size(), dom.mortars.size());
    const std::size_t ns = dom.subdomains.size();
    const std::size_t nm = dom.mortars.size();
    // only definite direction reversals count; ties carry no direction
    auto flipped = [](std::uint8_t from, std::uint8_t to) {
        return from != to && from != kSideTie && to != kSideTie;
    };
    for (std::size_t i = 0; i < ns; ++i) {
        const int end = (i + 1 < ns) ? lay.subdomain_base[i + 1]
                                     : (nm == 0 ? lay.size : lay.mortar_base[0]);
        for (int k = lay.subdomain_base[i]; k < end; ++k)
            if (flipped(a[k], b[k])) ++flips.per_subdomain[i];
    }
    for (std::size_t j = 0; j < nm; ++j) {
        const int end = (j + 1 < nm) ? lay.mortar_base[j + 1] : lay.size;
        for (int k = lay.mortar_base[j]; k < end; ++k)
            if (flipped(a[k], b[k])) ++flips.per_mortar[j];
    }
    return flips;
}

} // namespace

NewtonResult newton_solve(const Discretization& disc, const FluidPair& fluid, double gravity,
                          State& state, const State& previous, double dt,
                          const NewtonOptions& opts, const Sources* sources) {
    NewtonResult result;
    result.flips = FlipCounts(disc.domain().subdomains.size(), disc.domain().mortars.size());
    const auto& map = disc.unknowns();
    std::vector<std::uint8_t> prev_choices;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    for (int it = 1; it <= opts.max_iter; ++it) {
        AssemblyResult sys;
        try {
            sys = disc.assemble_residual(fluid, gravity, state, previous, dt, sources);
        } catch (const AssemblyError& e) {
            result.iterations = it;
            result.failure = e.what();
            return result;
        }
        if (!prev_choices.empty())
            result.flips.add(count_flips(disc, prev_choices, sys.choices));
        prev_choices = std::move(sys.choices);

        lu.compute(sys.jacobian);
        if (lu.info() != Eigen::Success) {
            result.iterations = it;
            result.failure = "singular linear system";
            return result;
        }
        const Eigen::VectorXd dx = lu.solve(-sys.residual);
        if (lu.info() != Eigen::Success || !dx.allFinite()) {
            result.iterations = it;
            result.failure = "linear solve produced non-finite update";
            return result;
        }

        const double err = dx.norm() / std::sqrt(static_cast<double>(dx.size()));
        for (int k = 0; k < dx.size(); ++k) state.x[k] += dx[k];

        result.iterations = it;
        if (err < opts.tol) {
            // the converged update is kept unclipped: discarding its residual
            // bound overshoot (solver slack, ~err-sized) would silently drop
            // mass. Flux evaluations clamp saturations; only excursions far
            // beyond the bounds are reported as misbehavior.
            for (std::size_t i = 0; i < disc.domain().subdomains.size(); ++i) {
                const int nc = disc.domain().grids[i].n_cells();
                for (int c = 0; c < nc; ++c) {
                    const double s = state.at(map.s(i, c));
                    if (s < -0.01 || s > 1.01) ++result.clip_events_interior;
                }
            }
            result.converged = true;
            return result;
        }

        // clip saturations to [0,1] before the next residual evaluation
        for (std::size_t i = 0; i < disc.domain().subdomains.size(); ++i) {
            const int nc = disc.domain().grids[i].n_cells();
            for (int c = 0; c < nc; ++c) {
                double& s = state.x[map.s(i, c)];
                if (s < 0.0 || s > 1.0) {
                    s = std::clamp(s, 0.0, 1.0);
                    ++result.clip_events;
                }
            }
        }
    }
    result.failure = "no convergence within " + std::to_string(opts.max_iter) + " iterations";
    return result;
}

RunResult advance(const Discretization& disc, const FluidPair& fluid, double gravity,
                  TimeController controller, const State& initial, const NewtonOptions& opts,
                  const Sources* sources) {
    RunResult run;
    run.report.scheme = scheme_name(disc.scheme());
    run.times.push_back(controller.t);
    run.states.push_back(initial);

    State accepted = initial;
    long cum_newton = 0, cum_cuts = 0;
    long cum_f2 = 0, cum_f1 = 0, cum_fm = 0;
    const double time_eps = 1e-12 * std::max(1.0, controller.t_end);

    while (controller.t < controller.t_end - time_eps) {
        double dt = std::min(controller.dt_max, controller.t_end - controller.t);
        int cuts_this_step = 0;

        for (;;) {
            if (dt < controller.dt_min) {
                run.report.status = "dt_underflow";
                return run;
            }
            State trial = accepted;
            NewtonResult nr = newton_solve(disc, fluid, gravity, trial, accepted, dt, opts,
                                           sources);
            cum_newton += nr.iterations;
            if (!nr.converged) {
                ++cuts_this_step;
                ++cum_cuts;
                run.report.wasted_newton_iters += nr.iterations;
                run.report.wasted_flips_2d += nr.flips.by_dim(disc.domain(), 2);
                run.report.wasted_flips_1d += nr.flips.by_dim(disc.domain(), 1);
                run.report.wasted_flips_mortar += nr.flips.mortars_total();
                dt *= 0.5;
                continue;
            }

            controller.t += dt;
            accepted = std::move(trial);
            run.times.push_back(controller.t);
            run.states.push_back(accepted);

            StepRecord rec;
            rec.t = controller.t;
            rec.dt = dt;
            rec.newton_iters = nr.iterations;
            rec.cum_newton_iters = cum_newton;
            rec.cuts = cuts_this_step;
            rec.cum_cuts = cum_cuts;
            rec.flips_2d = nr.flips.by_dim(disc.domain(), 2);
            rec.flips_1d = nr.flips.by_dim(disc.domain(), 1);
            rec.flips_mortar = nr.flips.mortars_total();
            cum_f2 += rec.flips_2d;
            cum_f1 += rec.flips_1d;
            cum_fm += rec.flips_mortar;
            rec.cum_flips_2d = cum_f2;
            rec.cum_flips_1d = cum_f1;
            rec.cum_flips_mortar = cum_fm;
            rec.mass_phase0 = disc.total_mass(fluid, accepted, 0);
            rec.mass_phase1 = disc.total_mass(fluid, accepted, 1);
            rec.clip_events = nr.clip_events;
            run.report.rows.push_back(rec);
            break;
        }
    }
    return run;
}

} // namespace mdflow
