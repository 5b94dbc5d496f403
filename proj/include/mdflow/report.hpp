#ifndef MDFLOW_REPORT_HPP
#define MDFLOW_REPORT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mdflow/cases.hpp"
#include "mdflow/newton.hpp"

namespace mdflow {

//! One row per accepted step; exact round-trip through max-precision decimals.
void write_report_csv(const RunReport& report, std::ostream& out);
void write_report_csv_file(const RunReport& report, const std::string& path);
std::vector<StepRecord> read_report_csv(std::istream& in, const std::string& origin = "<csv>");

//! Legacy ASCII VTK unstructured grid with all subdomains merged; cell data
//! arrays: pressure, saturation0, subdomain.
void write_vtk(const MixedDimDomain& domain, const UnknownMap& map, const State& state,
               std::ostream& out, const std::string& title = "mdflow fields");
void write_vtk_file(const MixedDimDomain& domain, const UnknownMap& map, const State& state,
                    const std::string& path, const std::string& title = "mdflow fields");

//! Structural facts about a legacy VTK file, for validity checks.
struct VtkSummary {
    int n_points = 0;
    int n_cells = 0;
    std::vector<int> cell_types;
    std::vector<std::string> cell_arrays;
    std::vector<int> cell_array_lengths;
};
VtkSummary check_vtk(std::istream& in);

//! Final-count summary as JSON text.
std::string summary_json(const RunReport& report, const CaseConfig& config);
void write_summary_file(const RunReport& report, const CaseConfig& config,
                        const std::string& path);

//! Write the full output bundle of a run into a directory: report.csv,
//! summary.json, and fields_<t>.vtk at the initial and final accepted times
//! plus every `vtk_every`-th step when vtk_every > 0.
void write_outputs(const RunResult& run, const CaseSetup& setup, const UnknownMap& map,
                   const std::string& dir, int vtk_every = 0);

} // namespace mdflow

#endif
