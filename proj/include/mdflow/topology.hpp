#ifndef MDFLOW_TOPOLOGY_HPP
#define MDFLOW_TOPOLOGY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "mdflow/grid.hpp"

namespace mdflow {

//! Sparse linear map with one row per mortar cell. Applied forward it carries
//! subdomain-side values onto the mortar; the transpose goes back.
struct SparseMap {
    int cols = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;

    int n_rows() const { return static_cast<int>(rows.size()); }

    template <class S>
    std::vector<S> apply(const std::vector<S>& x) const {
        std::vector<S> out(rows.size(), S{});
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (const auto& [c, w] : rows[r]) out[r] += w * x[c];
        return out;
    }

    template <class S>
    std::vector<S> apply_transpose(const std::vector<S>& y) const {
        std::vector<S> out(cols, S{});
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (const auto& [c, w] : rows[r]) out[c] += w * y[r];
        return out;
    }
};

//! One subdomain of the mixed-dimensional decomposition.
struct Subdomain {
    int id = -1;
    int dim = 2;
    double eps = 1.0;  // collapsed thickness, m; 1 for full-dimensional domains
    int codim = 0;     // a_i = d - dim
    std::vector<int> higher_mortars;  // S-hat: mortars toward higher-dimensional neighbors
    std::vector<int> lower_mortars;   // S-check: mortars toward lower-dimensional neighbors
    std::string name;

    double codim_extension() const { return std::pow(eps, codim); }
};

//! Interval [a, b] on a mortar's intrinsic arclength axis, tagged with the
//! element (mortar cell, boundary face, or lower cell) it belongs to.
struct Span {
    double a = 0.0;
    double b = 0.0;
    int elem = -1;
};

//! Codimension-one coupling surface between one higher-dimensional subdomain
//! and one lower-dimensional subdomain, carrying the mortar flux unknowns.
struct MortarInterface {
    int id = -1;
    int dim = 1;
    int higher_side = -1;  // subdomain id
    int lower_side = -1;   // subdomain id
    double normal_permeability = 0.0;  // k_perp, m^2
    double eps_low = 1.0;              // eps of the lower-side subdomain
    int b = 1;                         // d - dim(mortar)
    double z_dircos = 0.0;             // grad z . outward normal of the higher boundary

    std::vector<double> cell_measure;  // mortar cells
    std::vector<int> higher_faces;     // boundary face ids in the higher-side grid
    std::vector<int> lower_cells;      // cell ids in the lower-side grid

    // intrinsic-coordinate spans used to build projections
    std::vector<Span> mortar_spans, higher_spans, lower_spans;

    // area-weighted averaging onto the mortar and measure-partition maps;
    // transposes serve the reverse direction
    SparseMap high_avg, high_sum, low_avg, low_sum;

    double codim_factor() const { return std::pow(eps_low, b - 1); }
    int n_cells() const { return static_cast<int>(cell_measure.size()); }
};

//! The full graph of subdomains and mortar interfaces.
struct MixedDimDomain {
    int ambient_dim = 2;
    std::vector<Subdomain> subdomains;
    std::vector<SubdomainGrid> grids;  // parallel to subdomains
    std::vector<MortarInterface> mortars;

    const SubdomainGrid& grid(int subdomain_id) const { return grids[subdomain_id]; }
};

//! Populate the four projection maps of a mortar from its spans by exact
//! interval intersection. Throws TopologyError when a mortar cell is not
//! fully covered on either side (tolerance 1e-10 of the cell measure).
void build_projections(MortarInterface& mortar, const SubdomainGrid& high_grid,
                       const SubdomainGrid& low_grid);

//! Check every structural invariant; returns human-readable violations
//! (empty means the domain is well-formed). Never throws.
std::vector<std::string> validate(const MixedDimDomain& domain);

} // namespace mdflow

#endif
