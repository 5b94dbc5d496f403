#ifndef MDFLOW_CASES_HPP
#define MDFLOW_CASES_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdflow/assembly.hpp"
#include "mdflow/fluid.hpp"
#include "mdflow/topology.hpp"

namespace mdflow {

//! One planar fracture given by its trace segment. Negative cell counts mean
//! "conform to the higher-side grid trace".
struct FractureSpec {
    Point p0{0, 0, 0}, p1{0, 0, 0};
    double permeability = 1.0;
    double normal_permeability = 0.1;
    double aperture = 0.01;  // eps
    double porosity = 0.25;
    int n_cells = -1;
    int n_mortar = -1;
};

struct MatrixSpec {
    enum class Kind { quad, tri, mesh };
    Kind kind = Kind::quad;
    int nx = 20, ny = 20;
    double width = 1.0, height = 1.0;
    double x0 = 0.0, y0 = 0.0;
    std::string mesh_path;  // when kind == mesh
    double permeability = 1.0;
    double porosity = 0.25;
};

struct IntersectionDefaults {
    double aperture = 0.01;
    double porosity = 0.25;
};

//! Full description of a runnable benchmark.
struct CaseConfig {
    std::string name = "case";
    Scheme scheme = Scheme::hu;
    double gravity = 1.0;
    double t_end = 1.0;
    double dt_max = 0.1;
    double tol = 1e-6;
    FluidPair fluid;
    double interface_elevation = 0.5;  // heavy phase above this level initially

    // reference values for the gravity/viscous dimensionless group
    double ref_porosity = 0.25;
    double ref_density = 0.5;  // density difference of the phases
    double ref_length = 1.0;   // vertical extent of the matrix
    double ref_permeability = 1.0;
    double ref_viscosity = 1.0;
};

//! Per-subdomain initial fields (pressures and heavy saturations per cell).
struct InitialValues {
    std::vector<std::vector<double>> p, s0;
};

struct CaseSetup {
    MixedDimDomain domain;
    CaseConfig config;
    InitialValues initial;
};

//! Ratio of gravity to viscous forces, phi rho^2 g L K / mu^2.
double compute_EA(const CaseConfig& config);

//! Assemble a mixed-dimensional domain from a matrix description and fracture traces.
//! Fracture segments must follow grid edges; X-type crossings and L-type
//! endpoint meetings spawn 0D subdomains, anything else is rejected.
CaseSetup build_case(const MatrixSpec& matrix, const std::vector<FractureSpec>& fractures,
                     const CaseConfig& config,
                     const IntersectionDefaults& isect = IntersectionDefaults{});

//! Initial fields from the sharp heavy-above-light configuration with
//! hydrostatic pressure, zero at the top of the column.
InitialValues segregated_initial(const MixedDimDomain& domain, const CaseConfig& config,
                                 double z_top);

//! Initial fields from arbitrary smooth functions of position.
InitialValues functional_initial(const MixedDimDomain& domain,
                                 const std::function<double(double, double)>& pressure,
                                 const std::function<double(double, double)>& saturation);

//! Flatten initial fields into a state vector (mortar fluxes start at zero).
State build_state(const MixedDimDomain& domain, const UnknownMap& map,
                  const InitialValues& init);

//! Bundled benchmarks: case1a, case1b, case1c, case1c-hc, case2-standin.
//! Anything else is treated as a case-file path.
CaseSetup load_case(const std::string& name_or_path);
std::vector<std::string> builtin_case_names();

//! Parse the sectioned key-value case format (docs/case_format.md).
CaseSetup load_case_file(const std::string& path);

} // namespace mdflow

#endif
