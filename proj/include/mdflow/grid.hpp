#ifndef MDFLOW_GRID_HPP
#define MDFLOW_GRID_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace mdflow {

using Point = std::array<double, 3>;

//! A face of a cell-centered grid. Interior faces connect `left` and `right`;
//! boundary faces have right == -1 and carry an outward normal. A boundary
//! face with mortar_id >= 0 feeds a mortar interface instead of being no-flow.
struct Face {
    int left = -1;
    int right = -1;
    double area = 0.0;  // measure in m^(dim-1); 1 for the point faces of 1D grids
    Point normal{0.0, 0.0, 0.0};
    Point center{0.0, 0.0, 0.0};
    int mortar_id = -1;
    // end vertices of the face edge (2D grids only, used for interface geometry)
    int v0 = -1, v1 = -1;
};

//! Cell-centered finite-volume grid of a single subdomain.
//!
//! 0D subdomains hold one synthetic cell of unit measure and no faces, so the
//! generic accumulation assembly covers them as well.
struct SubdomainGrid {
    int dim = 2;

    std::vector<Point> cell_center;
    std::vector<double> cell_measure;    // m^dim
    std::vector<double> cell_elevation;  // z per cell, m
    std::vector<double> permeability;    // per-cell scalar K, m^2
    std::vector<double> porosity;        // dimensionless in (0,1]

    std::vector<Face> faces;

    // Vertex payload for output and interface cutting.
    std::vector<Point> points;
    std::vector<std::vector<int>> cell_vertices;

    int n_cells() const { return static_cast<int>(cell_center.size()); }
    int n_faces() const { return static_cast<int>(faces.size()); }

    void set_uniform_rock(double K, double phi) {
        permeability.assign(cell_center.size(), K);
        porosity.assign(cell_center.size(), phi);
    }
};

//! Per-face TPFA transmissibilities T = area / (d_m/K_m + d_n/K_n) with the
//! center-to-face distances measured along the face normal. Boundary faces get 0.
std::vector<double> tpfa_transmissibilities(const SubdomainGrid& grid);

//! Sparse signed incidence structure: row m holds (face, +-1/|c_m|) pairs.
struct DiscreteDivergence {
    std::vector<std::vector<std::pair<int, double>>> rows;
};

DiscreteDivergence build_divergence(const SubdomainGrid& grid);

//! Net outflow per unit cell measure for a per-face flux field (positive flux
//! flows left -> right through each face).
std::vector<double> divergence_apply(const DiscreteDivergence& div,
                                     const std::vector<double>& face_flux);

// --- grid construction -----------------------------------------------------

//! Structured axis-aligned quadrilateral grid on [x0,x0+w] x [y0,y0+h].
SubdomainGrid make_quad_grid(int nx, int ny, double w = 1.0, double h = 1.0,
                             double x0 = 0.0, double y0 = 0.0);

//! Structured triangle grid: each quad of the nx-by-ny lattice split along its
//! SW-NE diagonal, so the line y = x (when square) follows cell edges.
SubdomainGrid make_tri_grid(int nx, int ny, double w = 1.0, double h = 1.0,
                            double x0 = 0.0, double y0 = 0.0);

//! 1D grid of n equal cells along the segment p0 -> p1; faces are points of
//! unit measure with normals along the tangent.
SubdomainGrid make_segment_grid(const Point& p0, const Point& p1, int n);

//! Synthetic single-point grid backing a 0D subdomain (one cell, measure 1).
SubdomainGrid make_point_grid(const Point& p);

//! Build faces/centers/measures from vertex polygons (2D simplex/quad cells).
SubdomainGrid grid_from_polygons(std::vector<Point> points,
                                 std::vector<std::vector<int>> cells);

//! Plain-text simplex mesh: see docs/mesh_format.md.
SubdomainGrid read_simplex_mesh(std::istream& in, const std::string& origin = "<stream>");
SubdomainGrid read_simplex_mesh_file(const std::string& path);

} // namespace mdflow

#endif
