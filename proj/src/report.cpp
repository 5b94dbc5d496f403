#include "mdflow/report.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mdflow/errors.hpp"

namespace mdflow {

namespace {
constexpr const char* kCsvHeader =
    "t,dt,newton_iters,cum_newton_iters,cuts,cum_cuts,flips_2d,flips_1d,flips_mortar,"
    "cum_flips_2d,cum_flips_1d,cum_flips_mortar,mass_phase0,mass_phase1,clip_events";
}

void write_report_csv(const RunReport& report, std::ostream& out) {
    out << kCsvHeader << "\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const StepRecord& r : report.rows) {
        out << r.t << ',' << r.dt << ',' << r.newton_iters << ',' << r.cum_newton_iters << ','
            << r.cuts << ',' << r.cum_cuts << ',' << r.flips_2d << ',' << r.flips_1d << ','
            << r.flips_mortar << ',' << r.cum_flips_2d << ',' << r.cum_flips_1d << ','
            << r.cum_flips_mortar << ',' << r.mass_phase0 << ',' << r.mass_phase1 << ','
            << r.clip_events << "\n";
    }
}

void write_report_csv_file(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report: " + path);
    write_report_csv(report, out);
}

std::vector<StepRecord> read_report_csv(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw IoError(origin + ": empty report");
    if (line != kCsvHeader) throw IoError(origin + ": unexpected CSV header");
    std::vector<StepRecord> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        StepRecord r;
        char comma;
        if (!(ss >> r.t >> comma >> r.dt >> comma >> r.newton_iters >> comma >>
              r.cum_newton_iters >> comma >> r.cuts >> comma >> r.cum_cuts >> comma >>
              r.flips_2d >> comma >> r.flips_1d >> comma >> r.flips_mortar >> comma >>
              r.cum_flips_2d >> comma >> r.cum_flips_1d >> comma >> r.cum_flips_mortar >>
              comma >> r.mass_phase0 >> comma >> r.mass_phase1 >> comma >> r.clip_events))
            throw IoError(origin + ":" + std::to_string(lineno) + ": malformed CSV row");
        rows.push_back(r);
    }
    return rows;
}

namespace {

int vtk_cell_type(int dim, std::size_t n_vertices) {
    if (dim == 0) return 1;                      // VTK_VERTEX
    if (dim == 1) return 3;                      // VTK_LINE
    if (n_vertices == 3) return 5;               // VTK_TRIANGLE
    if (n_vertices == 4) return 9;               // VTK_QUAD
    return 7;                                    // VTK_POLYGON
}

} // namespace

void write_vtk(const MixedDimDomain& domain, const UnknownMap& map, const State& state,
               std::ostream& out, const std::string& title) {
    std::size_t n_points = 0, n_cells = 0, conn = 0;
    for (const auto& g : domain.grids) {
        n_points += g.points.size();
        n_cells += g.cell_vertices.size();
        for (const auto& cv : g.cell_vertices) conn += cv.size() + 1;
    }
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "POINTS " << n_points << " double\n";
    for (const auto& g : domain.grids)
        for (const auto& p : g.points) out << p[0] << ' ' << p[1] << ' ' << p[2] << "\n";

    out << "CELLS " << n_cells << ' ' << conn << "\n";
    std::size_t offset = 0;
    for (const auto& g : domain.grids) {
        for (const auto& cv : g.cell_vertices) {
            out << cv.size();
            for (int v : cv) out << ' ' << offset + v;
            out << "\n";
        }
        offset += g.points.size();
    }
    out << "CELL_TYPES " << n_cells << "\n";
    for (const auto& g : domain.grids)
        for (const auto& cv : g.cell_vertices) out << vtk_cell_type(g.dim, cv.size()) << "\n";

    out << "CELL_DATA " << n_cells << "\n";
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < domain.grids.size(); ++i)
        for (int c = 0; c < domain.grids[i].n_cells(); ++c) out << state.at(map.p(i, c)) << "\n";
    out << "SCALARS saturation0 double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < domain.grids.size(); ++i)
        for (int c = 0; c < domain.grids[i].n_cells(); ++c) out << state.at(map.s(i, c)) << "\n";
    out << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < domain.grids.size(); ++i)
        for (int c = 0; c < domain.grids[i].n_cells(); ++c) out << i << "\n";
}

void write_vtk_file(const MixedDimDomain& domain, const UnknownMap& map, const State& state,
                    const std::string& path, const std::string& title) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write VTK file: " + path);
    write_vtk(domain, map, state, out, title);
}

VtkSummary check_vtk(std::istream& in) {
    VtkSummary s;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0)
        throw IoError("VTK: missing header line");
    std::getline(in, line);  // title
    if (!std::getline(in, line) || line != "ASCII") throw IoError("VTK: expected ASCII format");
    if (!std::getline(in, line) || line != "DATASET UNSTRUCTURED_GRID")
        throw IoError("VTK: expected unstructured grid");

    std::string word;
    while (in >> word) {
        if (word == "POINTS") {
            int n;
            std::string type;
            if (!(in >> n >> type)) throw IoError("VTK: malformed POINTS");
            s.n_points = n;
            for (int k = 0; k < 3 * n; ++k) {
                double v;
                if (!(in >> v)) throw IoError("VTK: truncated POINTS data");
            }
        } else if (word == "CELLS") {
            int n;
            long total;
            if (!(in >> n >> total)) throw IoError("VTK: malformed CELLS");
            s.n_cells = n;
            long read = 0;
            for (int c = 0; c < n; ++c) {
                int cnt;
                if (!(in >> cnt)) throw IoError("VTK: truncated CELLS");
                ++read;
                for (int k = 0; k < cnt; ++k) {
                    int idx;
                    if (!(in >> idx)) throw IoError("VTK: truncated cell connectivity");
                    if (idx < 0 || idx >= s.n_points)
                        throw IoError("VTK: vertex index out of range");
                    ++read;
                }
            }
            if (read != total) throw IoError("VTK: CELLS size field inconsistent");
        } else if (word == "CELL_TYPES") {
            int n;
            if (!(in >> n)) throw IoError("VTK: malformed CELL_TYPES");
            if (n != s.n_cells) throw IoError("VTK: CELL_TYPES count mismatch");
            s.cell_types.resize(n);
            for (int& t : s.cell_types)
                if (!(in >> t)) throw IoError("VTK: truncated CELL_TYPES");
        } else if (word == "CELL_DATA") {
            int n;
            if (!(in >> n)) throw IoError("VTK: malformed CELL_DATA");
            if (n != s.n_cells) throw IoError("VTK: CELL_DATA count mismatch");
        } else if (word == "SCALARS") {
            std::string name, type;
            int comps = 1;
            if (!(in >> name >> type >> comps)) throw IoError("VTK: malformed SCALARS");
            std::string lut, def;
            if (!(in >> lut >> def) || lut != "LOOKUP_TABLE")
                throw IoError("VTK: SCALARS without lookup table");
            int count = 0;
            for (int k = 0; k < s.n_cells * comps; ++k) {
                double v;
                if (!(in >> v)) throw IoError("VTK: truncated data array " + name);
                ++count;
            }
            s.cell_arrays.push_back(name);
            s.cell_array_lengths.push_back(count);
        }
    }
    return s;
}

std::string summary_json(const RunReport& report, const CaseConfig& config) {
    nlohmann::json j;
    j["case"] = config.name;
    j["scheme"] = report.scheme;
    j["status"] = report.status;
    j["E_A"] = compute_EA(config);
    j["t_final"] = report.rows.empty() ? 0.0 : report.rows.back().t;
    j["steps"] = report.rows.size();
    j["cum_newton_iters"] = report.cum_newton_iters();
    j["cum_cuts"] = report.cum_cuts();
    j["wasted_newton_iters"] = report.wasted_newton_iters;
    j["cum_flips"] = {{"dim2", report.rows.empty() ? 0 : report.rows.back().cum_flips_2d},
                      {"dim1", report.rows.empty() ? 0 : report.rows.back().cum_flips_1d},
                      {"mortar", report.rows.empty() ? 0 : report.rows.back().cum_flips_mortar}};
    j["wasted_flips"] = {{"dim2", report.wasted_flips_2d},
                         {"dim1", report.wasted_flips_1d},
                         {"mortar", report.wasted_flips_mortar}};
    j["total_flips"] = {{"dim2", report.total_flips_2d()},
                        {"dim1", report.total_flips_1d()},
                        {"mortar", report.total_flips_mortar()}};
    if (!report.rows.empty()) {
        j["mass_phase0_final"] = report.rows.back().mass_phase0;
        j["mass_phase1_final"] = report.rows.back().mass_phase1;
    }
    return j.dump(2) + "\n";
}

void write_summary_file(const RunReport& report, const CaseConfig& config,
                        const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write summary: " + path);
    out << summary_json(report, config);
}

void write_outputs(const RunResult& run, const CaseSetup& setup, const UnknownMap& map,
                   const std::string& dir, int vtk_every) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    write_report_csv_file(run.report, (base / "report.csv").string());
    write_summary_file(run.report, setup.config, (base / "summary.json").string());

    auto dump = [&](std::size_t idx) {
        std::ostringstream name;
        name << "fields_" << std::fixed << std::setprecision(6) << run.times[idx] << ".vtk";
        write_vtk_file(setup.domain, map, run.states[idx], (base / name.str()).string(),
                       setup.config.name + " t=" + std::to_string(run.times[idx]));
    };
    if (run.states.empty()) return;
    dump(0);
    if (vtk_every > 0)
        for (std::size_t k = vtk_every; k + 1 < run.states.size(); k += vtk_every) dump(k);
    if (run.states.size() > 1) dump(run.states.size() - 1);
}

} // namespace mdflow
