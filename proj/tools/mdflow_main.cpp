#include <exception>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "mdflow/convergence.hpp"
#include "mdflow/newton.hpp"
#include "mdflow/report.hpp"

namespace {

using namespace mdflow;

struct RunArgs {
    std::string case_name;
    std::string scheme = "hu";
    std::string out_dir = "out";
    std::optional<double> dt_max, tol, t_end;
    int vtk_every = 0;
};

Scheme parse_scheme(const std::string& s) {
    if (s == "ppu") return Scheme::ppu;
    if (s == "hu") return Scheme::hu;
    throw CLI::ValidationError("scheme must be 'ppu' or 'hu'");
}

RunResult run_one(CaseSetup& setup, const Discretization& disc, const RunArgs& args) {
    if (args.dt_max) setup.config.dt_max = *args.dt_max;
    if (args.tol) setup.config.tol = *args.tol;
    if (args.t_end) setup.config.t_end = *args.t_end;

    const State initial = build_state(setup.domain, disc.unknowns(), setup.initial);
    TimeController tc;
    tc.dt_max = setup.config.dt_max;
    tc.t_end = setup.config.t_end;
    NewtonOptions opts;
    opts.tol = setup.config.tol;

    RunResult run = advance(disc, setup.config.fluid, setup.config.gravity, tc, initial, opts);
    run.report.case_name = setup.config.name;
    run.report.E_A = compute_EA(setup.config);
    return run;
}

void print_summary_line(const RunReport& r) {
    std::cout << "  scheme=" << r.scheme << " status=" << r.status
              << " steps=" << r.rows.size() << " newton=" << r.cum_newton_iters()
              << " cuts=" << r.cum_cuts() << " flips2d=" << r.total_flips_2d()
              << " flips1d=" << r.total_flips_1d() << " flipsMortar=" << r.total_flips_mortar()
              << "\n";
}

int cmd_run(const RunArgs& args) {
    CaseSetup setup = load_case(args.case_name);
    const Scheme scheme = parse_scheme(args.scheme);
    std::cout << "case " << setup.config.name << " (E_A = " << compute_EA(setup.config)
              << "), scheme " << args.scheme << "\n";
    const Discretization disc(setup.domain, scheme);
    const RunResult run = run_one(setup, disc, args);
    write_outputs(run, setup, disc.unknowns(), args.out_dir, args.vtk_every);
    print_summary_line(run.report);
    std::cout << "outputs written to " << args.out_dir << "\n";
    return run.completed() ? 0 : 2;
}

int cmd_compare(const RunArgs& args) {
    const Scheme schemes[2] = {Scheme::ppu, Scheme::hu};
    RunReport reports[2];
    bool all_ok = true;
    for (int k = 0; k < 2; ++k) {
        CaseSetup setup = load_case(args.case_name);
        std::cout << "case " << setup.config.name << ", scheme " << scheme_name(schemes[k])
                  << "\n";
        const Discretization disc(setup.domain, schemes[k]);
        const RunResult run = run_one(setup, disc, args);
        write_outputs(run, setup, disc.unknowns(),
                      args.out_dir + "/" + scheme_name(schemes[k]), args.vtk_every);
        print_summary_line(run.report);
        reports[k] = run.report;
        all_ok = all_ok && run.completed();
    }
    std::cout << "\ncomparison (" << args.case_name << "):\n";
    std::cout << std::left << std::setw(26) << "metric" << std::setw(14) << "ppu"
              << std::setw(14) << "hu" << "\n";
    auto row = [&](const char* name, long a, long b) {
        std::cout << std::left << std::setw(26) << name << std::setw(14) << a << std::setw(14)
                  << b << "\n";
    };
    row("newton iterations", reports[0].cum_newton_iters(), reports[1].cum_newton_iters());
    row("timestep cuts", reports[0].cum_cuts(), reports[1].cum_cuts());
    row("upwind flips (2d)", reports[0].total_flips_2d(), reports[1].total_flips_2d());
    row("upwind flips (1d)", reports[0].total_flips_1d(), reports[1].total_flips_1d());
    row("upwind flips (mortar)", reports[0].total_flips_mortar(),
        reports[1].total_flips_mortar());
    return all_ok ? 0 : 2;
}

int cmd_converge(const std::string& scheme_str, bool nonconforming, int reference_n,
                 std::vector<int> levels, double dt) {
    if (levels.empty()) levels = {8, 16, 32};
    const Scheme scheme = parse_scheme(scheme_str);
    const ConvergenceStudy study =
        convergence_study(scheme, levels, reference_n, !nonconforming, dt);
    std::cout << "single-step convergence, scheme " << scheme_str << ", "
              << (nonconforming ? "non-conforming" : "conforming") << " interfaces\n";
    std::cout << std::left << std::setw(8) << "n" << std::setw(12) << "h" << std::setw(16)
              << "L2(p)" << std::setw(16) << "L2(S0)" << std::setw(16) << "combined"
              << std::setw(10) << "order" << "\n";
    for (const auto& lvl : study.levels) {
        std::cout << std::left << std::setw(8) << lvl.n << std::setw(12) << lvl.h
                  << std::setw(16) << lvl.err_p << std::setw(16) << lvl.err_s << std::setw(16)
                  << lvl.err << std::setw(10);
        if (lvl.order != 0.0) std::cout << lvl.order;
        else std::cout << "-";
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mdflow: two-phase flow in fractured porous media "
                 "(mixed-dimensional finite volumes, PPU and hybrid upwinding)"};
    app.require_subcommand(1);

    RunArgs args;
    double conv_dt = 0.04;
    int conv_ref = 64;
    std::vector<int> conv_levels;
    std::string conv_scheme = "hu";
    bool conv_nonconforming = false;

    auto* run = app.add_subcommand("run", "advance one case with one scheme");
    run->add_option("--case", args.case_name, "builtin case name or case-file path")->required();
    run->add_option("--scheme", args.scheme, "ppu or hu")->check(CLI::IsMember({"ppu", "hu"}));
    run->add_option("--out", args.out_dir, "output directory");
    run->add_option("--dt-max", args.dt_max, "override the case's maximum timestep");
    run->add_option("--tol", args.tol, "override the Newton tolerance");
    run->add_option("--t-end", args.t_end, "override the final time");
    run->add_option("--vtk-every", args.vtk_every,
                    "write fields every k-th accepted step (0: first and last only)");

    auto* cmp = app.add_subcommand("compare", "run both schemes and print a side-by-side table");
    cmp->add_option("--case", args.case_name, "builtin case name or case-file path")->required();
    cmp->add_option("--out", args.out_dir, "output directory (per-scheme subdirectories)");
    cmp->add_option("--dt-max", args.dt_max, "override the case's maximum timestep");
    cmp->add_option("--tol", args.tol, "override the Newton tolerance");
    cmp->add_option("--t-end", args.t_end, "override the final time");
    cmp->add_option("--vtk-every", args.vtk_every, "write fields every k-th accepted step");

    auto* cnv = app.add_subcommand("converge", "single-step spatial convergence study");
    cnv->add_option("--scheme", conv_scheme, "ppu or hu")->check(CLI::IsMember({"ppu", "hu"}));
    cnv->add_flag("--non-conforming", conv_nonconforming,
                  "mismatch fracture/mortar grids against the matrix trace");
    cnv->add_option("--levels", conv_levels, "matrix resolutions (default 8 16 32)");
    cnv->add_option("--reference", conv_ref, "reference resolution");
    cnv->add_option("--dt", conv_dt, "size of the single implicit step");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(args);
        if (cmp->parsed()) return cmd_compare(args);
        if (cnv->parsed())
            return cmd_converge(conv_scheme, conv_nonconforming, conv_ref, conv_levels, conv_dt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
