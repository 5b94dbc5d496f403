#include "mdflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mdflow/errors.hpp"

namespace mdflow {

namespace {

double dot(const Point& a, const Point& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Point sub(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

} // namespace

std::vector<double> tpfa_transmissibilities(const SubdomainGrid& grid) {
    if (grid.permeability.size() != grid.cell_center.size())
        throw GeometryError("tpfa: grid has no per-cell permeability");
    std::vector<double> trans(grid.faces.size(), 0.0);
    for (std::size_t f = 0; f < grid.faces.size(); ++f) {
        const Face& face = grid.faces[f];
        if (face.right < 0) continue;  // boundary: no-flow unless a mortar feeds it
        const double km = grid.permeability[face.left];
        const double kn = grid.permeability[face.right];
        if (km <= 0.0 || kn <= 0.0)
            throw GeometryError("tpfa: nonpositive permeability at face " + std::to_string(f));
        const double dm = std::abs(dot(sub(face.center, grid.cell_center[face.left]), face.normal));
        const double dn = std::abs(dot(sub(face.center, grid.cell_center[face.right]), face.normal));
        if (dm <= 0.0 || dn <= 0.0)
            throw GeometryError("tpfa: zero center-to-face distance at face " + std::to_string(f));
        trans[f] = face.area / (dm / km + dn / kn);
    }
    return trans;
}

DiscreteDivergence build_divergence(const SubdomainGrid& grid) {
    DiscreteDivergence div;
    div.rows.resize(grid.cell_center.size());
    for (int f = 0; f < grid.n_faces(); ++f) {
        const Face& face = grid.faces[f];
        if (face.right < 0) continue;
        div.rows[face.left].emplace_back(f, 1.0 / grid.cell_measure[face.left]);
        div.rows[face.right].emplace_back(f, -1.0 / grid.cell_measure[face.right]);
    }
    return div;
}

std::vector<double> divergence_apply(const DiscreteDivergence& div,
                                     const std::vector<double>& face_flux) {
    std::vector<double> out(div.rows.size(), 0.0);
    for (std::size_t c = 0; c < div.rows.size(); ++c)
        for (const auto& [f, w] : div.rows[c])
            out[c] += w * face_flux[f];
    return out;
}

SubdomainGrid grid_from_polygons(std::vector<Point> points,
                                 std::vector<std::vector<int>> cells) {
    SubdomainGrid g;
    g.dim = 2;
    g.points = std::move(points);
    g.cell_vertices = std::move(cells);
    const int nc = static_cast<int>(g.cell_vertices.size());
    g.cell_center.resize(nc);
    g.cell_measure.resize(nc);
    g.cell_elevation.resize(nc);

    for (int c = 0; c < nc; ++c) {
        const auto& vs = g.cell_vertices[c];
        if (vs.size() < 3)
            throw GeometryError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        // shoelace area and centroid
        double area2 = 0.0, cx = 0.0, cy = 0.0;
        for (std::size_t k = 0; k < vs.size(); ++k) {
            const Point& a = g.points[vs[k]];
            const Point& b = g.points[vs[(k + 1) % vs.size()]];
            const double cross = a[0] * b[1] - b[0] * a[1];
            area2 += cross;
            cx += (a[0] + b[0]) * cross;
            cy += (a[1] + b[1]) * cross;
        }
        if (area2 <= 0.0)
            throw GeometryError("cell " + std::to_string(c) + " is degenerate or not CCW");
        const double area = 0.5 * area2;
        g.cell_measure[c] = area;
        g.cell_center[c] = {cx / (6.0 * area), cy / (6.0 * area), 0.0};
        g.cell_elevation[c] = g.cell_center[c][1];
    }

    // Edges -> faces. Interior edges appear twice with opposite orientation.
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // (vmin,vmax) -> (cell, +1 CCW order flag)
    for (int c = 0; c < nc; ++c) {
        const auto& vs = g.cell_vertices[c];
        for (std::size_t k = 0; k < vs.size(); ++k) {
            const int a = vs[k], b = vs[(k + 1) % vs.size()];
            const std::pair<int, int> key = std::minmax(a, b);
            auto it = edges.find(key);
            if (it == edges.end()) {
                edges[key] = {c, a < b ? +1 : -1};
            } else {
                Face face;
                // first cell traversed the edge (a2->b2); normal is its outward direction
                const int c0 = it->second.first;
                face.left = c0;
                face.right = c;
                face.v0 = key.first;
                face.v1 = key.second;
                const Point& pa = g.points[key.first];
                const Point& pb = g.points[key.second];
                face.area = norm(sub(pb, pa));
                face.center = {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]), 0.0};
                // outward normal of left cell: rotate edge direction as traversed by left
                Point dir = sub(pb, pa);
                if (it->second.second < 0) dir = {-dir[0], -dir[1], 0.0};
                face.normal = {dir[1] / face.area, -dir[0] / face.area, 0.0};
                g.faces.push_back(face);
                it->second.first = -1;  // consumed
            }
        }
    }
    // remaining singly-owned edges are boundary faces
    for (int c = 0; c < nc; ++c) {
        const auto& vs = g.cell_vertices[c];
        for (std::size_t k = 0; k < vs.size(); ++k) {
            const int a = vs[k], b = vs[(k + 1) % vs.size()];
            const std::pair<int, int> key = std::minmax(a, b);
            auto it = edges.find(key);
            if (it == edges.end() || it->second.first < 0) continue;
            Face face;
            face.left = c;
            face.right = -1;
            face.v0 = key.first;
            face.v1 = key.second;
            const Point& pa = g.points[a];
            const Point& pb = g.points[b];
            face.area = norm(sub(pb, pa));
            face.center = {0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]), 0.0};
            Point dir = sub(pb, pa);  // CCW traversal of the owning cell
            face.normal = {dir[1] / face.area, -dir[0] / face.area, 0.0};
            g.faces.push_back(face);
            edges.erase(it);
        }
    }
    return g;
}

SubdomainGrid make_quad_grid(int nx, int ny, double w, double h, double x0, double y0) {
    if (nx < 1 || ny < 1) throw GeometryError("quad grid needs nx, ny >= 1");
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    const double dx = w / nx, dy = h / ny;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            pts.push_back({x0 + i * dx, y0 + j * dy, 0.0});
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::vector<int>> cells;
    cells.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    return grid_from_polygons(std::move(pts), std::move(cells));
}

SubdomainGrid make_tri_grid(int nx, int ny, double w, double h, double x0, double y0) {
    if (nx < 1 || ny < 1) throw GeometryError("tri grid needs nx, ny >= 1");
    std::vector<Point> pts;
    const double dx = w / nx, dy = h / ny;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            pts.push_back({x0 + i * dx, y0 + j * dy, 0.0});
    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            // SW-NE diagonal: lower-right and upper-left triangles
            cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    return grid_from_polygons(std::move(pts), std::move(cells));
}

SubdomainGrid make_segment_grid(const Point& p0, const Point& p1, int n) {
    if (n < 1) throw GeometryError("segment grid needs n >= 1");
    SubdomainGrid g;
    g.dim = 1;
    const Point d = sub(p1, p0);
    const double len = norm(d);
    if (len <= 0.0) throw GeometryError("segment grid with zero length");
    const Point tang = {d[0] / len, d[1] / len, d[2] / len};
    const double dl = len / n;
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) * dl;
        Point c = {p0[0] + tang[0] * s, p0[1] + tang[1] * s, p0[2] + tang[2] * s};
        g.cell_center.push_back(c);
        g.cell_measure.push_back(dl);
        g.cell_elevation.push_back(c[1]);
    }
    for (int i = 0; i <= n; ++i) {
        const double s = i * dl;
        Face f;
        f.area = 1.0;
        f.center = {p0[0] + tang[0] * s, p0[1] + tang[1] * s, p0[2] + tang[2] * s};
        f.normal = tang;
        if (i == 0) {
            f.left = 0;
            f.right = -1;
            f.normal = {-tang[0], -tang[1], -tang[2]};  // outward at the start
        } else if (i == n) {
            f.left = n - 1;
            f.right = -1;
        } else {
            f.left = i - 1;
            f.right = i;
        }
        g.faces.push_back(f);
    }
    // endpoints as vertex payload for output
    g.points.push_back(p0);
    for (int i = 1; i <= n; ++i) {
        const double s = i * dl;
        g.points.push_back({p0[0] + tang[0] * s, p0[1] + tang[1] * s, p0[2] + tang[2] * s});
    }
    for (int i = 0; i < n; ++i) g.cell_vertices.push_back({i, i + 1});
    return g;
}

SubdomainGrid make_point_grid(const Point& p) {
    SubdomainGrid g;
    g.dim = 0;
    g.cell_center.push_back(p);
    g.cell_measure.push_back(1.0);
    g.cell_elevation.push_back(p[1]);
    g.points.push_back(p);
    g.cell_vertices.push_back({0});
    return g;
}

SubdomainGrid read_simplex_mesh(std::istream& in, const std::string& origin) {
    std::vector<Point> pts;
    std::vector<std::vector<int>> cells;
    std::string line;
    int nv = -1, nc = -1;
    int lineno = 0;
    enum { Header, Vertices, Cells, Done } stage = Header;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        if (stage == Header) {
            if (!(ss >> nv >> nc)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                throw IoError(origin + ":" + std::to_string(lineno) + ": expected '<n_vertices> <n_cells>'");
            }
            stage = Vertices;
        } else if (stage == Vertices) {
            double x, y;
            if (!(ss >> x >> y)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                throw IoError(origin + ":" + std::to_string(lineno) + ": expected 'x y' vertex line");
            }
            pts.push_back({x, y, 0.0});
            if (static_cast<int>(pts.size()) == nv) stage = Cells;
        } else if (stage == Cells) {
            int a, b, c;
            if (!(ss >> a >> b >> c)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                throw IoError(origin + ":" + std::to_string(lineno) + ": expected 'v0 v1 v2' cell line");
            }
            if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv)
                throw IoError(origin + ":" + std::to_string(lineno) + ": vertex index out of range");
            cells.push_back({a, b, c});
            if (static_cast<int>(cells.size()) == nc) stage = Done;
        }
    }
    if (stage != Done)
        throw IoError(origin + ": truncated mesh (" + std::to_string(pts.size()) + "/" +
                      std::to_string(nv) + " vertices, " + std::to_string(cells.size()) + "/" +
                      std::to_string(nc) + " cells)");
    // accept either orientation in the file; flip clockwise triangles
    for (auto& cv : cells) {
        const Point& a = pts[cv[0]];
        const Point& b = pts[cv[1]];
        const Point& c = pts[cv[2]];
        const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if (det < 0.0) std::swap(cv[1], cv[2]);
    }
    return grid_from_polygons(std::move(pts), std::move(cells));
}

SubdomainGrid read_simplex_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh file: " + path);
    return read_simplex_mesh(in, path);
}

} // namespace mdflow
