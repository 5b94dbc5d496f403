#include "mdflow/convergence.hpp"

#include <cmath>
#include <stdexcept>

#include "mdflow/errors.hpp"
#include "mdflow/newton.hpp"

namespace mdflow {

namespace {

constexpr double kFracY = 0.5;

// Smooth initial data
//   p(x,y)  = 0.75 (1-y) + 0.05 cos(pi x) cos(pi y)
//   S0(x,y) = 0.5 + 0.3 sin(pi x) sin(pi y)
// initialized as exact cell averages, so every refinement level carries the
// same integrals and the measured error is purely the one-step evolution.
double int_sin(double a, double b) { return (std::cos(M_PI * a) - std::cos(M_PI * b)) / M_PI; }
double int_cos(double a, double b) { return (std::sin(M_PI * b) - std::sin(M_PI * a)) / M_PI; }

InitialValues smooth_cell_averages(const MixedDimDomain& domain) {
    InitialValues init;
    init.p.resize(domain.subdomains.size());
    init.s0.resize(domain.subdomains.size());
    for (std::size_t i = 0; i < domain.subdomains.size(); ++i) {
        const auto& g = domain.grids[i];
        for (int c = 0; c < g.n_cells(); ++c) {
            if (g.dim == 2) {
                double ax = 1e300, bx = -1e300, ay = 1e300, by = -1e300;
                for (int v : g.cell_vertices[c]) {
                    ax = std::min(ax, g.points[v][0]);
                    bx = std::max(bx, g.points[v][0]);
                    ay = std::min(ay, g.points[v][1]);
                    by = std::max(by, g.points[v][1]);
                }
                const double wx = bx - ax, wy = by - ay;
                init.p[i].push_back(0.75 * (1.0 - 0.5 * (ay + by)) +
                                    0.05 * (int_cos(ax, bx) / wx) * (int_cos(ay, by) / wy));
                init.s0[i].push_back(0.5 +
                                     0.3 * (int_sin(ax, bx) / wx) * (int_sin(ay, by) / wy));
            } else {
                // fracture cells: 1D averages along y = kFracY
                const double half = 0.5 * g.cell_measure[c];
                const double ax = g.cell_center[c][0] - half, bx = g.cell_center[c][0] + half;
                const double sy = std::sin(M_PI * kFracY), cy = std::cos(M_PI * kFracY);
                init.p[i].push_back(0.75 * (1.0 - kFracY) +
                                    0.05 * (int_cos(ax, bx) / (bx - ax)) * cy);
                init.s0[i].push_back(0.5 + 0.3 * (int_sin(ax, bx) / (bx - ax)) * sy);
            }
        }
    }
    return init;
}

CaseSetup make_level_case(int n, bool conforming) {
    MatrixSpec m;
    m.kind = MatrixSpec::Kind::quad;
    m.nx = m.ny = n;
    m.permeability = 1.0;
    m.porosity = 0.25;
    FractureSpec f;
    f.p0 = {0.0, kFracY, 0.0};
    f.p1 = {1.0, kFracY, 0.0};
    f.permeability = 1.0;
    f.normal_permeability = 0.1;
    f.aperture = 0.01;
    f.porosity = 0.25;
    if (!conforming) {
        // mismatch the fracture and mortar grids against the matrix trace
        f.n_cells = std::max(2, (3 * n) / 4);
        f.n_mortar = f.n_cells;
    }
    CaseConfig cfg;
    cfg.name = "convergence";
    cfg.fluid.heavy.ref_density = 1.0;
    cfg.fluid.light.ref_density = 0.5;
    cfg.fluid.heavy.viscosity = cfg.fluid.light.viscosity = 1.0;
    cfg.fluid.heavy.compressibility = cfg.fluid.light.compressibility = 1e-5;
    cfg.gravity = 1.0;
    cfg.t_end = 1.0;
    cfg.dt_max = 1.0;
    cfg.tol = 1e-9;

    CaseSetup setup = build_case(m, {f}, cfg);
    setup.initial = smooth_cell_averages(setup.domain);
    return setup;
}

struct LevelSolution {
    CaseSetup setup;
    UnknownMap map;
    State state;
};

LevelSolution solve_one_step(Scheme scheme, int n, bool conforming, double dt) {
    LevelSolution sol{make_level_case(n, conforming), {}, {}};
    Discretization disc(sol.setup.domain, scheme);
    sol.map = disc.unknowns();
    State st = build_state(sol.setup.domain, sol.map, sol.setup.initial);
    const State prev = st;
    NewtonOptions opts;
    opts.tol = sol.setup.config.tol;
    opts.max_iter = 30;
    NewtonResult nr = newton_solve(disc, sol.setup.config.fluid, sol.setup.config.gravity, st,
                                   prev, dt, opts);
    if (!nr.converged)
        throw std::runtime_error("convergence study: Newton failed on level n=" +
                                 std::to_string(n) + ": " + nr.failure);
    sol.state = st;
    return sol;
}

//! Measure-weighted averages of the reference solution over coarse cells.
//! Matrix cells nest exactly (n divides reference n); fracture cells are
//! projected by interval overlap, which also covers mismatched resolutions.
void project_reference(const LevelSolution& ref, const LevelSolution& coarse,
                       std::vector<std::vector<double>>& p_out,
                       std::vector<std::vector<double>>& s_out) {
    const auto& cg = coarse.setup.domain.grids;
    p_out.assign(cg.size(), {});
    s_out.assign(cg.size(), {});

    // matrix: structured row-major quads
    {
        const auto& fine = ref.setup.domain.grids[0];
        const auto& crs = cg[0];
        const int nf = static_cast<int>(std::lround(std::sqrt(fine.n_cells())));
        const int nc = static_cast<int>(std::lround(std::sqrt(crs.n_cells())));
        if (nf % nc != 0) throw std::invalid_argument("reference grid must nest coarse grids");
        const int r = nf / nc;
        p_out[0].resize(crs.n_cells());
        s_out[0].resize(crs.n_cells());
        for (int j = 0; j < nc; ++j)
            for (int i = 0; i < nc; ++i) {
                double wp = 0.0, ws = 0.0, wm = 0.0;
                for (int jj = 0; jj < r; ++jj)
                    for (int ii = 0; ii < r; ++ii) {
                        const int fc = (j * r + jj) * nf + (i * r + ii);
                        const double meas = fine.cell_measure[fc];
                        wp += meas * ref.state.at(ref.map.p(0, fc));
                        ws += meas * ref.state.at(ref.map.s(0, fc));
                        wm += meas;
                    }
                p_out[0][j * nc + i] = wp / wm;
                s_out[0][j * nc + i] = ws / wm;
            }
    }

    // fracture: 1D interval overlaps along the common arclength axis
    {
        const auto& fine = ref.setup.domain.grids[1];
        const auto& crs = cg[1];
        const double dl_f = fine.cell_measure[0];
        const double dl_c = crs.cell_measure[0];
        p_out[1].resize(crs.n_cells());
        s_out[1].resize(crs.n_cells());
        for (int c = 0; c < crs.n_cells(); ++c) {
            const double lo = c * dl_c, hi = (c + 1) * dl_c;
            double wp = 0.0, ws = 0.0, wm = 0.0;
            const int k0 = std::max(0, static_cast<int>(lo / dl_f) - 1);
            for (int k = k0; k < fine.n_cells(); ++k) {
                const double a = std::max(lo, k * dl_f);
                const double b = std::min(hi, (k + 1) * dl_f);
                if (b <= a) {
                    if (k * dl_f > hi) break;
                    continue;
                }
                wp += (b - a) * ref.state.at(ref.map.p(1, k));
                ws += (b - a) * ref.state.at(ref.map.s(1, k));
                wm += b - a;
            }
            p_out[1][c] = wp / wm;
            s_out[1][c] = ws / wm;
        }
    }
}

} // namespace

ConvergenceStudy convergence_study(Scheme scheme, const std::vector<int>& levels,
                                   int reference_n, bool conforming, double dt) {
    ConvergenceStudy study;
    study.conforming = conforming;
    study.scheme = scheme_name(scheme);

    const LevelSolution ref = solve_one_step(scheme, reference_n, true, dt);

    double prev_err = 0.0, prev_h = 0.0;
    for (int n : levels) {
        const LevelSolution sol = solve_one_step(scheme, n, conforming, dt);
        std::vector<std::vector<double>> p_ref, s_ref;
        project_reference(ref, sol, p_ref, s_ref);

        double e2p = 0.0, e2s = 0.0;
        for (std::size_t i = 0; i < sol.setup.domain.subdomains.size(); ++i) {
            const auto& g = sol.setup.domain.grids[i];
            const double ext = sol.setup.domain.subdomains[i].codim_extension();
            for (int c = 0; c < g.n_cells(); ++c) {
                const double dp = sol.state.at(sol.map.p(i, c)) - p_ref[i][c];
                const double ds = sol.state.at(sol.map.s(i, c)) - s_ref[i][c];
                e2p += ext * g.cell_measure[c] * dp * dp;
                e2s += ext * g.cell_measure[c] * ds * ds;
            }
        }
        ConvergenceLevel lvl;
        lvl.n = n;
        lvl.h = 1.0 / n;
        lvl.err_p = std::sqrt(e2p);
        lvl.err_s = std::sqrt(e2s);
        lvl.err = std::sqrt(e2p + e2s);
        if (prev_err > 0.0) lvl.order = std::log(prev_err / lvl.err) / std::log(prev_h / lvl.h);
        study.levels.push_back(lvl);
        prev_err = lvl.err;
        prev_h = lvl.h;
    }
    return study;
}

} // namespace mdflow
