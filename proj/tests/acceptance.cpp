// Acceptance suite: end-to-end checks of the mixed-dimensional two-phase
// simulator. Each criterion prints one [PASS]/[FAIL] line; the exit code is
// the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdflow/cases.hpp"
#include "mdflow/convergence.hpp"
#include "mdflow/newton.hpp"
#include "mdflow/report.hpp"

using namespace mdflow;

namespace {

// the discretization points into the setup's domain, so both live on the heap
// and move together without relocating
struct CompletedRun {
    std::unique_ptr<CaseSetup> setup_ptr;
    std::unique_ptr<Discretization> disc;
    RunResult result;

    const CaseSetup& setup() const { return *setup_ptr; }
};

CompletedRun run_case(const std::string& name, Scheme scheme, double t_end_override = -1.0) {
    CompletedRun run;
    run.setup_ptr = std::make_unique<CaseSetup>(load_case(name));
    CaseSetup& setup = *run.setup_ptr;
    if (t_end_override > 0.0) setup.config.t_end = t_end_override;
    run.disc = std::make_unique<Discretization>(setup.domain, scheme);
    const State initial = build_state(setup.domain, run.disc->unknowns(), setup.initial);
    TimeController tc;
    tc.dt_max = setup.config.dt_max;
    tc.t_end = setup.config.t_end;
    NewtonOptions opts;
    opts.tol = setup.config.tol;
    run.result = advance(*run.disc, setup.config.fluid, setup.config.gravity, tc,
                         initial, opts);
    run.result.report.case_name = setup.config.name;
    return run;
}

int n_pass = 0, n_fail = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s  (%s)\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    (ok ? n_pass : n_fail)++;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

// ---------------------------------------------------------------------------

void criterion1_conservation(const std::map<std::string, const CompletedRun*>& runs) {
    bool ok = true;
    std::string detail;
    double worst = 0.0;
    for (const auto& [key, runp] : runs) {
        const CompletedRun& run = *runp;
        if (!run.result.completed()) {
            ok = false;
            detail += key + " did not complete; ";
            continue;
        }
        const double m0 = run.disc->total_mass(run.setup().config.fluid, run.result.states[0], 0);
        const double m1 = run.disc->total_mass(run.setup().config.fluid, run.result.states[0], 1);
        for (const auto& row : run.result.report.rows) {
            worst = std::max(worst, std::abs(row.mass_phase0 - m0) / m0);
            worst = std::max(worst, std::abs(row.mass_phase1 - m1) / m1);
        }
    }
    ok = ok && worst < 1e-10;

    // slanted-case initial heavy mass close to the reported value
    const auto it = runs.find("case1c/hu");
    double mass_1c = 0.0;
    if (it != runs.end())
        mass_1c = it->second->disc->total_mass(it->second->setup().config.fluid,
                                               it->second->result.states[0], 0);
    const bool mass_ok = std::abs(mass_1c - 0.127) / 0.127 <= 0.05;
    ok = ok && mass_ok;
    report(1, "mass conservation on all bundled cases, both schemes", ok,
           "max |m(t)-m(0)|/m(0) = " + fmt(worst) + ", slanted initial heavy mass = " +
               fmt(mass_1c) + (detail.empty() ? "" : ("; " + detail)));
}

void criterion2_segregation(const std::map<std::string, const CompletedRun*>& runs) {
    bool ok = true;
    std::string detail;
    for (const char* scheme : {"ppu", "hu"}) {
        const CompletedRun& run = *runs.at(std::string("case1a/") + scheme);
        if (!run.result.completed()) {
            ok = false;
            detail += std::string(scheme) + " incomplete; ";
            continue;
        }
        const auto& grid = run.setup().domain.grids[0];
        const auto& map = run.disc->unknowns();
        const State& final_state = run.result.states.back();
        double lower = 0.0, upper = 0.0;
        int nl = 0, nu = 0;
        for (int c = 0; c < grid.n_cells(); ++c) {
            const double s = final_state.at(map.s(0, c));
            if (grid.cell_elevation[c] < 0.5) {
                lower += s;
                ++nl;
            } else {
                upper += s;
                ++nu;
            }
        }
        lower /= nl;
        upper /= nu;
        detail += std::string(scheme) + ": lower=" + fmt(lower) + " upper=" + fmt(upper) + "; ";
        ok = ok && lower > 0.9 && upper < 0.1;
    }
    report(2, "case1a gravity segregation swaps the phases by t = 20", ok, detail);
}

void criterion3_single_phase_reduction() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FluidPair fl;  // constant densities: the two schemes must coincide exactly
    fl.heavy.ref_density = 1.0;
    fl.light.ref_density = 0.5;
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const double pm = 4 * u(rng) - 2, pn = 4 * u(rng) - 2;
        const double T = 0.1 + 2 * u(rng), dz = 2 * u(rng) - 1, g = 2 * u(rng);
        const double s = rep % 2 ? 1.0 : 0.0;
        const FaceState st{Dual(pm), Dual(pn), Dual(s), Dual(s)};
        const auto pp = ppu_face_flux(fl, g, T, dz, st);
        const auto hu = hu_face_flux(fl, g, T, dz, st);
        const double scale = std::max(1.0, std::abs(pp.total_mass.value()));
        worst = std::max(worst,
                         std::abs(pp.total_mass.value() - hu.total_mass.value()) / scale);
        worst = std::max(worst, std::abs(pp.phase_mass[0].value() - hu.viscous.value() -
                                         hu.gravity.value()) / scale);
    }
    report(3, "single-phase states: HU and PPU face fluxes agree", worst <= 1e-12,
           "max scaled mismatch over 1000 random two-cell configurations = " + fmt(worst));
}

void criterion4_jacobian() {
    MatrixSpec m;
    m.kind = MatrixSpec::Kind::quad;
    m.nx = 4;
    m.ny = 2;
    m.permeability = 1.0;
    m.porosity = 0.25;
    FractureSpec f;
    f.p0 = {0.0, 0.5, 0.0};
    f.p1 = {1.0, 0.5, 0.0};
    f.permeability = 2.0;
    f.normal_permeability = 0.1;
    f.aperture = 0.01;
    f.porosity = 0.25;
    CaseConfig cfg;
    cfg.fluid.heavy.ref_density = 1.0;
    cfg.fluid.light.ref_density = 0.5;
    cfg.fluid.heavy.compressibility = cfg.fluid.light.compressibility = 1e-2;
    cfg.gravity = 1.0;
    cfg.t_end = 1.0;
    cfg.dt_max = 0.1;
    CaseSetup setup = build_case(m, {f}, cfg);

    double worst = 0.0;
    bool enough = true;
    for (const Scheme scheme : {Scheme::ppu, Scheme::hu}) {
        Discretization disc(setup.domain, scheme);
        const UnknownMap& map = disc.unknowns();
        std::mt19937 rng(1234);
        std::uniform_real_distribution<double> up(0.5, 2.0), us(0.05, 0.95), uz(-0.5, 0.5),
            ud(-1.0, 1.0);
        auto sample = [&]() {
            State st;
            st.x.assign(map.size, 0.0);
            for (std::size_t i = 0; i < setup.domain.subdomains.size(); ++i)
                for (int c = 0; c < setup.domain.grids[i].n_cells(); ++c) {
                    st.x[map.p(i, c)] = up(rng);
                    st.x[map.s(i, c)] = us(rng);
                }
            for (std::size_t j = 0; j < setup.domain.mortars.size(); ++j)
                for (int l = 0; l < 2; ++l)
                    for (int c = 0; c < setup.domain.mortars[j].n_cells(); ++c) {
                        double z = uz(rng);
                        if (std::abs(z) < 1e-3) z = 1e-3;
                        st.x[map.zeta(j, l, c)] = z;
                    }
            return st;
        };
        int accepted = 0;
        for (int rep = 0; rep < 500 && accepted < 100; ++rep) {
            const State st = sample();
            const State prev = sample();
            const auto sys = disc.assemble_residual(cfg.fluid, 1.0, st, prev, 0.05);
            Eigen::VectorXd dir(map.size);
            for (int k = 0; k < map.size; ++k) dir[k] = ud(rng);
            dir.normalize();
            const double h = 1e-8;
            State plus = st, minus = st;
            for (int k = 0; k < map.size; ++k) {
                plus.x[k] += h * dir[k];
                minus.x[k] -= h * dir[k];
            }
            const auto rp = disc.assemble_residual(cfg.fluid, 1.0, plus, prev, 0.05);
            const auto rm = disc.assemble_residual(cfg.fluid, 1.0, minus, prev, 0.05);
            if (rp.choices != sys.choices || rm.choices != sys.choices) continue;
            const Eigen::VectorXd fd = (rp.residual - rm.residual) / (2.0 * h);
            const Eigen::VectorXd jd = sys.jacobian * dir;
            worst = std::max(worst, (jd - fd).norm() / std::max(1e-12, jd.norm()));
            ++accepted;
        }
        enough = enough && accepted == 100;
    }
    report(4, "automatic differentiation matches central finite differences",
           enough && worst < 1e-6,
           "max relative error over 100 random states per scheme = " + fmt(worst));
}

void criterion5_newton_effort(const std::map<std::string, const CompletedRun*>& runs) {
    bool ok = true;
    std::string detail;
    for (const char* cname : {"case1c", "case1c-hc"}) {
        const RunReport& ppu = runs.at(std::string(cname) + "/ppu")->result.report;
        const RunReport& hu = runs.at(std::string(cname) + "/hu")->result.report;
        const bool newton_ok = hu.cum_newton_iters() <= ppu.cum_newton_iters();
        const bool flips_ok = hu.total_flips_2d() < ppu.total_flips_2d();
        ok = ok && newton_ok && flips_ok && ppu.status == "completed" &&
             hu.status == "completed";
        detail += std::string(cname) + ": newton hu/ppu = " + fmt(hu.cum_newton_iters()) +
                  "/" + fmt(ppu.cum_newton_iters()) + ", flips2d hu/ppu = " +
                  fmt(hu.total_flips_2d()) + "/" + fmt(ppu.total_flips_2d()) + "; ";
    }
    {
        const RunReport& ppu = runs.at("case2-standin/ppu")->result.report;
        const RunReport& hu = runs.at("case2-standin/hu")->result.report;
        ok = ok && hu.cum_newton_iters() < ppu.cum_newton_iters() &&
             ppu.status == "completed" && hu.status == "completed";
        detail += "case2-standin: newton hu/ppu = " + fmt(hu.cum_newton_iters()) + "/" +
                  fmt(ppu.cum_newton_iters());
    }
    report(5, "hybrid upwinding needs fewer Newton iterations and 2D flips", ok, detail);
}

void criterion6_convergence() {
    std::string detail;
    bool ok = true;
    double final_err[2] = {0.0, 0.0};
    for (const bool conforming : {true, false}) {
        const ConvergenceStudy study =
            convergence_study(Scheme::hu, {8, 16, 32}, 64, conforming);
        const ConvergenceLevel& last = study.levels.back();
        final_err[conforming ? 0 : 1] = last.err;
        ok = ok && last.order >= 0.8 && last.order <= 1.3;
        detail += std::string(conforming ? "conforming" : "non-conforming") + ": order " +
                  fmt(last.order) + ", err " + fmt(last.err) + "; ";
    }
    const double ratio = std::max(final_err[0], final_err[1]) /
                         std::max(1e-300, std::min(final_err[0], final_err[1]));
    ok = ok && ratio <= 2.0;
    report(6, "single-step spatial convergence is first order on both mesh families", ok,
           detail + "error ratio = " + fmt(ratio));
}

void criterion7_robustness() {
    CaseSetup setup = load_case("case1a");
    Discretization disc(setup.domain, Scheme::ppu);
    const State initial = build_state(setup.domain, disc.unknowns(), setup.initial);
    TimeController tc;
    tc.dt_max = 0.4;
    tc.t_end = 0.8;
    NewtonOptions opts;
    opts.tol = 1e-14;  // unattainable in double precision
    opts.max_iter = 2;
    RunResult run = advance(disc, setup.config.fluid, setup.config.gravity, tc, initial, opts);

    // halvings from 0.4 down to the 1e-12 floor, two iterations per attempt
    const bool status_ok = run.report.status == "dt_underflow";
    const bool no_steps = run.report.rows.empty();
    const bool halvings_ok = run.report.wasted_newton_iters >= 2 * 38;

    // the failure report must survive the output path
    const std::string dir =
        (std::filesystem::temp_directory_path() / "mdflow_acceptance_c7").string();
    std::filesystem::remove_all(dir);
    write_outputs(run, setup, disc.unknowns(), dir);
    std::ifstream in(dir + "/summary.json");
    std::stringstream buf;
    buf << in.rdbuf();
    const bool summary_ok = buf.str().find("dt_underflow") != std::string::npos;
    std::filesystem::remove_all(dir);

    report(7, "forced Newton failure halves dt to the floor and reports dt_underflow",
           status_ok && no_steps && halvings_ok && summary_ok,
           "status = " + run.report.status + ", wasted iterations = " +
               fmt(run.report.wasted_newton_iters));
}

void criterion8_blend_properties() {
    bool ok = true;
    std::string detail;
    ok = ok && blend_weight(0.0, 2.0) == 0.5;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_sym = 0.0;
    bool monotone = true, bounded = true;
    for (int rep = 0; rep < 2000; ++rep) {
        const double c = u(rng) * 5.0;
        const double x = 40.0 * (u(rng) - 0.5);
        const double b1 = blend_weight(x, c);
        const double b2 = blend_weight(x + 0.1 + u(rng), c);
        bounded = bounded && b1 > 0.0 && b1 < 1.0;
        monotone = monotone && b2 >= b1;
        worst_sym = std::max(worst_sym, std::abs(blend_weight(-x, c) - (1.0 - b1)));
    }
    ok = ok && monotone && bounded && worst_sym < 1e-12;

    const BlendParams bp;
    bool coeff_ok = true;
    for (int rep = 0; rep < 2000; ++rep) {
        const double rho = std::pow(10.0, -9.0 * u(rng));  // 1 down to 1e-9
        const double expected = std::min(2.0 / rho, 1e6);
        coeff_ok = coeff_ok && std::abs(blend_coefficient(rho, bp) - expected) <=
                                   1e-12 * expected;
    }
    ok = ok && coeff_ok;

    // G0 vanishes for equal densities or horizontal faces
    FluidPair same;
    same.heavy.ref_density = same.light.ref_density = 0.8;
    FluidPair diff;
    diff.heavy.ref_density = 1.0;
    diff.light.ref_density = 0.5;
    double worst_g = 0.0;
    for (int rep = 0; rep < 2000; ++rep) {
        const double pm = u(rng), pn = u(rng), sm = u(rng), sn = u(rng);
        const double dz = 2 * u(rng) - 1;
        const auto a = hu_face_flux(same, 1.0, 1.0, dz, {Dual(pm), Dual(pn), Dual(sm), Dual(sn)});
        worst_g = std::max(worst_g, std::abs(a.gravity.value()));
        const auto b = hu_face_flux(diff, 1.0, 1.0, 0.0, {Dual(pm), Dual(pn), Dual(sm), Dual(sn)});
        worst_g = std::max(worst_g, std::abs(b.gravity.value()));
    }
    ok = ok && worst_g <= 1e-14;
    report(8, "blend weight/coefficient shape and buoyancy-flux zero cases", ok,
           "max antisymmetry defect = " + fmt(worst_sym) + ", max spurious G0 = " + fmt(worst_g));
}

void criterion9_case1b(const std::map<std::string, const CompletedRun*>& runs) {
    bool ok = true;
    std::string detail;
    for (const char* scheme : {"ppu", "hu"}) {
        const CompletedRun& run = *runs.at(std::string("case1b-transient/") + scheme);
        if (!run.result.completed()) {
            ok = false;
            detail += std::string(scheme) + " incomplete; ";
            continue;
        }
        const auto& grid = run.setup().domain.grids[0];
        const auto& map = run.disc->unknowns();
        // vertical sampling line just right of the fracture: x = 0.525
        std::vector<int> column;
        for (int c = 0; c < grid.n_cells(); ++c)
            if (std::abs(grid.cell_center[c][0] - 0.525) < 1e-9) column.push_back(c);
        std::sort(column.begin(), column.end(), [&](int a, int b) {
            return grid.cell_elevation[a] < grid.cell_elevation[b];
        });
        bool dip = false, bump = false;
        for (std::size_t k = 1; k < run.result.states.size(); ++k) {
            if (run.result.times[k] > 1.5) break;
            std::vector<double> s(column.size());
            for (std::size_t r = 0; r < column.size(); ++r)
                s[r] = run.result.states[k].at(map.s(0, column[r]));
            // drainage dip: top cells fall well below the plateau beneath them
            double plateau = 0.0, top = 1e300;
            for (std::size_t r = 0; r < column.size(); ++r) {
                const double y = grid.cell_elevation[column[r]];
                if (y >= 0.65 && y <= 0.85) plateau = std::max(plateau, s[r]);
                if (y >= 0.9) top = std::min(top, s[r]);
            }
            const bool dip_now = plateau - top >= 0.05;
            // release bump: interior local maximum near the immersed tip
            bool bump_now = false;
            for (std::size_t r = 1; r + 1 < column.size(); ++r) {
                const double y = grid.cell_elevation[column[r]];
                if (y < 0.2 || y > 0.4) continue;
                if (s[r] >= s[r - 1] + 0.02 && s[r] >= s[r + 1] + 0.02) bump_now = true;
            }
            if (dip_now && bump_now) {
                dip = bump = true;
                detail += std::string(scheme) + ": dip and tip bump at t = " +
                          fmt(run.result.times[k]) + "; ";
                break;
            }
        }
        ok = ok && dip && bump;
        if (!(dip && bump)) detail += std::string(scheme) + ": feature missing; ";
    }
    report(9, "case1b transient shows top drainage and a release bump at the tip", ok, detail);
}

} // namespace

int main() {
    std::printf("mdflow acceptance suite\n");
    std::fflush(stdout);

    // shared runs used by several criteria
    std::map<std::string, CompletedRun> store;
    const std::vector<std::pair<std::string, double>> jobs = {
        {"case1a", -1.0},        {"case1b", -1.0},        {"case1c", -1.0},
        {"case1c-hc", -1.0},     {"case2-standin", -1.0},
    };
    for (const auto& [name, t_end] : jobs) {
        for (const Scheme scheme : {Scheme::ppu, Scheme::hu}) {
            const std::string key = name + "/" + scheme_name(scheme);
            std::printf("  running %s ...\n", key.c_str());
            std::fflush(stdout);
            store[key] = run_case(name, scheme, t_end);
        }
    }
    // the short transient run of case1b used by criterion 9
    for (const Scheme scheme : {Scheme::ppu, Scheme::hu}) {
        const std::string key = std::string("case1b-transient/") + scheme_name(scheme);
        std::printf("  running %s ...\n", key.c_str());
        std::fflush(stdout);
        store[key] = run_case("case1b", scheme, 1.5);
    }

    std::map<std::string, const CompletedRun*> runs;
    for (const auto& [k, v] : store) runs[k] = &v;

    criterion1_conservation(runs);
    criterion2_segregation(runs);
    criterion3_single_phase_reduction();
    criterion4_jacobian();
    criterion5_newton_effort(runs);
    criterion6_convergence();
    criterion7_robustness();
    criterion8_blend_properties();
    criterion9_case1b(runs);

    std::printf("%d passed, %d failed\n", n_pass, n_fail);
    return n_fail;
}
