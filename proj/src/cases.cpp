#include "mdflow/cases.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mdflow/errors.hpp"

namespace mdflow {

namespace {

constexpr double kGeomTol = 1e-9;

struct Segment {
    Point p0, p1;
    Point tangent{0, 0, 0};
    double length = 0.0;

    explicit Segment(const Point& a, const Point& b) : p0(a), p1(b) {
        const double dx = b[0] - a[0], dy = b[1] - a[1];
        length = std::hypot(dx, dy);
        if (length <= kGeomTol) throw GeometryError("zero-length fracture segment");
        tangent = {dx / length, dy / length, 0.0};
    }

    double arclength(const Point& q) const {
        return (q[0] - p0[0]) * tangent[0] + (q[1] - p0[1]) * tangent[1];
    }
    double offset(const Point& q) const {
        // signed distance along the left-pointing normal (-ty, tx)... rotated
        return -(q[0] - p0[0]) * tangent[1] + (q[1] - p0[1]) * tangent[0];
    }
    bool contains(const Point& q, double tol = kGeomTol) const {
        const double s = arclength(q);
        return std::abs(offset(q)) <= tol && s >= -tol && s <= length + tol;
    }
    Point at(double s) const {
        return {p0[0] + tangent[0] * s, p0[1] + tangent[1] * s, 0.0};
    }
};

struct CutFace {
    int face = -1;     // id in the evolving matrix face list
    double s_lo = 0.0, s_hi = 0.0;
};

struct FractureBuild {
    Segment seg;
    std::vector<int> plus_faces, minus_faces;  // matrix boundary faces per side
    std::vector<double> plus_lo, plus_hi, minus_lo, minus_hi;
    std::vector<double> interior_cuts;  // arclengths of X-type crossings
    std::vector<std::pair<double, int>> point_touches;  // (arclength 0 or L, point id)
};

//! Split every interior matrix face lying on the segment into two boundary
//! faces, one per side. Fills per-side face ids with their span coverage and
//! returns the old-id -> new-id map for faces that survived the rebuild.
std::vector<int> cut_matrix_along(SubdomainGrid& grid, FractureBuild& fb) {
    const Segment& seg = fb.seg;
    std::vector<Face> new_faces;
    new_faces.reserve(grid.faces.size() + 8);
    std::vector<int> remap(grid.faces.size(), -1);
    double covered = 0.0;
    for (std::size_t old_id = 0; old_id < grid.faces.size(); ++old_id) {
        const Face& face = grid.faces[old_id];
        bool on_segment = false;
        if (face.v0 >= 0 && face.v1 >= 0)
            on_segment = seg.contains(grid.points[face.v0]) && seg.contains(grid.points[face.v1]);
        if (!on_segment) {
            remap[old_id] = static_cast<int>(new_faces.size());
            new_faces.push_back(face);
            continue;
        }
        if (face.right < 0)
            throw GeometryError("fracture segment lies on the outer boundary");
        const double sa = seg.arclength(grid.points[face.v0]);
        const double sb = seg.arclength(grid.points[face.v1]);
        const double lo = std::min(sa, sb), hi = std::max(sa, sb);
        covered += hi - lo;

        const double side_left = seg.offset(grid.cell_center[face.left]);
        const int cell_plus = side_left > 0.0 ? face.left : face.right;
        const int cell_minus = side_left > 0.0 ? face.right : face.left;

        // outward normal of each side's cell points toward the fracture
        const Point n_plus = {seg.tangent[1], -seg.tangent[0], 0.0};   // toward minus side
        const Point n_minus = {-seg.tangent[1], seg.tangent[0], 0.0};  // toward plus side

        Face fa = face;
        fa.left = cell_plus;
        fa.right = -1;
        fa.normal = n_plus;
        new_faces.push_back(fa);
        fb.plus_faces.push_back(static_cast<int>(new_faces.size()) - 1);
        fb.plus_lo.push_back(lo);
        fb.plus_hi.push_back(hi);

        Face fm = face;
        fm.left = cell_minus;
        fm.right = -1;
        fm.normal = n_minus;
        new_faces.push_back(fm);
        fb.minus_faces.push_back(static_cast<int>(new_faces.size()) - 1);
        fb.minus_lo.push_back(lo);
        fb.minus_hi.push_back(hi);
    }
    if (std::abs(covered - seg.length) > 1e-7 * std::max(1.0, seg.length))
        throw GeometryError("fracture does not align with grid edges (covered " +
                            std::to_string(covered) + " of " + std::to_string(seg.length) + ")");
    grid.faces = std::move(new_faces);
    return remap;
}

//! Renumber face ids after earlier cuts shifted the list. Sort side faces by
//! midpoint arclength so mortar-local ordering is stable.
void sort_side(std::vector<int>& faces, std::vector<double>& lo, std::vector<double>& hi) {
    std::vector<std::size_t> order(faces.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lo[a] < lo[b]; });
    std::vector<int> f2(faces.size());
    std::vector<double> l2(faces.size()), h2(faces.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        f2[k] = faces[order[k]];
        l2[k] = lo[order[k]];
        h2[k] = hi[order[k]];
    }
    faces = std::move(f2);
    lo = std::move(l2);
    hi = std::move(h2);
}

struct IntersectionPoint {
    Point p;
    std::vector<int> fractures;  // incident fracture indices
};

//! Classify pairwise fracture intersections: interior crossings are X-type,
//! endpoint-endpoint meetings are L-type, anything else is unsupported.
std::vector<IntersectionPoint> find_intersections(const std::vector<Segment>& segs) {
    std::vector<IntersectionPoint> points;
    auto register_point = [&](const Point& q, int fa, int fb) {
        for (auto& ip : points) {
            if (std::hypot(ip.p[0] - q[0], ip.p[1] - q[1]) < kGeomTol) {
                for (int f : {fa, fb})
                    if (std::find(ip.fractures.begin(), ip.fractures.end(), f) ==
                        ip.fractures.end())
                        ip.fractures.push_back(f);
                return;
            }
        }
        points.push_back({q, {fa, fb}});
    };

    for (std::size_t a = 0; a < segs.size(); ++a) {
        for (std::size_t b = a + 1; b < segs.size(); ++b) {
            const Segment& A = segs[a];
            const Segment& B = segs[b];
            const double d1x = A.p1[0] - A.p0[0], d1y = A.p1[1] - A.p0[1];
            const double d2x = B.p1[0] - B.p0[0], d2y = B.p1[1] - B.p0[1];
            const double den = d1x * d2y - d1y * d2x;
            if (std::abs(den) < kGeomTol) {
                // parallel: only disjoint segments are allowed
                if (A.contains(B.p0) || A.contains(B.p1) || B.contains(A.p0) ||
                    B.contains(A.p1))
                    throw GeometryError("overlapping collinear fractures are not supported");
                continue;
            }
            const double ex = B.p0[0] - A.p0[0], ey = B.p0[1] - A.p0[1];
            const double ta = (ex * d2y - ey * d2x) / den;
            const double tb = (ex * d1y - ey * d1x) / den;
            const double tol_a = kGeomTol / A.length, tol_b = kGeomTol / B.length;
            if (ta < -tol_a || ta > 1.0 + tol_a || tb < -tol_b || tb > 1.0 + tol_b) continue;
            const bool end_a = ta < tol_a || ta > 1.0 - tol_a;
            const bool end_b = tb < tol_b || tb > 1.0 - tol_b;
            const Point q = {A.p0[0] + ta * d1x, A.p0[1] + ta * d1y, 0.0};
            if (end_a != end_b)
                throw GeometryError(
                    "T-type fracture intersection at (" + std::to_string(q[0]) + ", " +
                    std::to_string(q[1]) + ") is not supported (only X and L types)");
            register_point(q, static_cast<int>(a), static_cast<int>(b));
        }
    }
    return points;
}

//! Cut a 1D fracture grid at an interior arclength; the face there becomes two
//! boundary point-faces. Returns (face_before, face_after) ids.
std::pair<int, int> cut_segment_grid(SubdomainGrid& g, const Segment& seg, double s) {
    const double dl = g.cell_measure[0];
    const double kf = s / dl;
    const int k = static_cast<int>(std::lround(kf));
    if (std::abs(kf - k) > 1e-6 || k <= 0 || k >= g.n_cells())
        throw GeometryError("fracture intersection does not align with fracture cells (s = " +
                            std::to_string(s) + ")");
    int interior = -1;
    for (int f = 0; f < g.n_faces(); ++f) {
        const Face& face = g.faces[f];
        if (face.right < 0) continue;
        if (std::abs(seg.arclength(face.center) - s) < 1e-9) {
            interior = f;
            break;
        }
    }
    if (interior < 0) throw GeometryError("no interior fracture face at intersection");
    Face before = g.faces[interior];
    Face after = g.faces[interior];
    before.right = -1;  // keeps left = cell before the cut; outward = +tangent
    after.left = g.faces[interior].right;
    after.right = -1;
    after.normal = {-g.faces[interior].normal[0], -g.faces[interior].normal[1],
                    -g.faces[interior].normal[2]};
    g.faces[interior] = before;
    g.faces.push_back(after);
    return {interior, g.n_faces() - 1};
}

MortarInterface make_line_mortar(int id, int higher, int lower, const FractureSpec& fs,
                                 const Segment& seg, const std::vector<int>& faces,
                                 const std::vector<double>& lo, const std::vector<double>& hi,
                                 double z_dircos, int n_mortar, int n_frac_cells) {
    MortarInterface mt;
    mt.id = id;
    mt.dim = 1;
    mt.b = 1;
    mt.higher_side = higher;
    mt.lower_side = lower;
    mt.normal_permeability = fs.normal_permeability;
    mt.eps_low = fs.aperture;
    mt.z_dircos = z_dircos;
    mt.higher_faces = faces;
    for (std::size_t k = 0; k < faces.size(); ++k)
        mt.higher_spans.push_back({lo[k], hi[k], faces[k]});
    const double dl_m = seg.length / n_mortar;
    for (int p = 0; p < n_mortar; ++p) {
        mt.cell_measure.push_back(dl_m);
        mt.mortar_spans.push_back({p * dl_m, (p + 1) * dl_m, p});
    }
    const double dl_f = seg.length / n_frac_cells;
    for (int c = 0; c < n_frac_cells; ++c) {
        mt.lower_cells.push_back(c);
        mt.lower_spans.push_back({c * dl_f, (c + 1) * dl_f, c});
    }
    return mt;
}

MortarInterface make_point_mortar(int id, int higher, int lower, double k_perp, double eps_low,
                                  int frac_face, double z_dircos) {
    MortarInterface mt;
    mt.id = id;
    mt.dim = 0;
    mt.b = 2;
    mt.higher_side = higher;
    mt.lower_side = lower;
    mt.normal_permeability = k_perp;
    mt.eps_low = eps_low;
    mt.z_dircos = z_dircos;
    mt.higher_faces = {frac_face};
    mt.higher_spans = {{0.0, 1.0, frac_face}};
    mt.cell_measure = {1.0};
    mt.mortar_spans = {{0.0, 1.0, 0}};
    mt.lower_cells = {0};
    mt.lower_spans = {{0.0, 1.0, 0}};
    return mt;
}

} // namespace

double compute_EA(const CaseConfig& c) {
    return c.ref_porosity * c.ref_density * c.ref_density * c.gravity * c.ref_length *
           c.ref_permeability / (c.ref_viscosity * c.ref_viscosity);
}

CaseSetup build_case(const MatrixSpec& matrix, const std::vector<FractureSpec>& fractures,
                     const CaseConfig& config, const IntersectionDefaults& isect) {
    CaseSetup setup;
    setup.config = config;
    MixedDimDomain& dom = setup.domain;
    dom.ambient_dim = 2;

    // matrix subdomain
    SubdomainGrid mg;
    switch (matrix.kind) {
        case MatrixSpec::Kind::quad:
            mg = make_quad_grid(matrix.nx, matrix.ny, matrix.width, matrix.height, matrix.x0,
                                matrix.y0);
            break;
        case MatrixSpec::Kind::tri:
            mg = make_tri_grid(matrix.nx, matrix.ny, matrix.width, matrix.height, matrix.x0,
                               matrix.y0);
            break;
        case MatrixSpec::Kind::mesh:
            mg = read_simplex_mesh_file(matrix.mesh_path);
            break;
    }
    mg.set_uniform_rock(matrix.permeability, matrix.porosity);

    std::vector<Segment> segs;
    segs.reserve(fractures.size());
    for (const auto& fs : fractures) segs.emplace_back(fs.p0, fs.p1);

    // cut the matrix along every fracture; each rebuild shifts face ids, so
    // apply the remap to the sides recorded for earlier fractures
    std::vector<FractureBuild> builds;
    for (std::size_t f = 0; f < fractures.size(); ++f) {
        FractureBuild fb{segs[f], {}, {}, {}, {}, {}, {}, {}, {}};
        const std::vector<int> remap = cut_matrix_along(mg, fb);
        for (auto& prev : builds) {
            for (int& id : prev.plus_faces) id = remap[id];
            for (int& id : prev.minus_faces) id = remap[id];
        }
        builds.push_back(std::move(fb));
    }
    for (auto& fb : builds) {
        sort_side(fb.plus_faces, fb.plus_lo, fb.plus_hi);
        sort_side(fb.minus_faces, fb.minus_lo, fb.minus_hi);
    }

    Subdomain matrix_sd;
    matrix_sd.id = 0;
    matrix_sd.dim = 2;
    matrix_sd.eps = 1.0;
    matrix_sd.codim = 0;
    matrix_sd.name = "matrix";
    dom.subdomains.push_back(matrix_sd);
    dom.grids.push_back(std::move(mg));

    // fracture subdomains
    std::vector<int> frac_sd(fractures.size());
    for (std::size_t f = 0; f < fractures.size(); ++f) {
        const FractureSpec& fs = fractures[f];
        const int n_default = static_cast<int>(builds[f].plus_faces.size());
        const int n_cells = fs.n_cells > 0 ? fs.n_cells : n_default;
        SubdomainGrid fg = make_segment_grid(fs.p0, fs.p1, n_cells);
        fg.set_uniform_rock(fs.permeability, fs.porosity);
        Subdomain sd;
        sd.id = static_cast<int>(dom.subdomains.size());
        sd.dim = 1;
        sd.eps = fs.aperture;
        sd.codim = 1;
        sd.name = "fracture" + std::to_string(f + 1);
        frac_sd[f] = sd.id;
        dom.subdomains.push_back(sd);
        dom.grids.push_back(std::move(fg));
    }

    // fracture-fracture intersections -> 0D subdomains
    const std::vector<IntersectionPoint> xpoints = find_intersections(segs);
    std::vector<int> point_sd(xpoints.size());
    for (std::size_t q = 0; q < xpoints.size(); ++q) {
        Subdomain sd;
        sd.id = static_cast<int>(dom.subdomains.size());
        sd.dim = 0;
        sd.eps = isect.aperture;
        sd.codim = 2;
        sd.name = "intersection" + std::to_string(q + 1);
        point_sd[q] = sd.id;
        dom.subdomains.push_back(sd);
        SubdomainGrid pg = make_point_grid(xpoints[q].p);
        pg.porosity = {isect.porosity};
        pg.permeability = {1.0};  // unused: no internal faces
        dom.grids.push_back(std::move(pg));
    }

    auto add_mortar = [&](MortarInterface mt) -> int {
        mt.id = static_cast<int>(dom.mortars.size());
        dom.subdomains[mt.higher_side].lower_mortars.push_back(mt.id);
        dom.subdomains[mt.lower_side].higher_mortars.push_back(mt.id);
        dom.mortars.push_back(std::move(mt));
        return dom.mortars.back().id;
    };

    // matrix-fracture mortars, one per side of each fracture
    for (std::size_t f = 0; f < fractures.size(); ++f) {
        const FractureSpec& fs = fractures[f];
        const FractureBuild& fb = builds[f];
        const int n_cells = dom.grids[frac_sd[f]].n_cells();
        const int n_mortar = fs.n_mortar > 0 ? fs.n_mortar : n_cells;
        const Point n_plus = {segs[f].tangent[1], -segs[f].tangent[0], 0.0};
        add_mortar(make_line_mortar(0, 0, frac_sd[f], fs, segs[f], fb.plus_faces, fb.plus_lo,
                                    fb.plus_hi, n_plus[1], n_mortar, n_cells));
        add_mortar(make_line_mortar(0, 0, frac_sd[f], fs, segs[f], fb.minus_faces, fb.minus_lo,
                                    fb.minus_hi, -n_plus[1], n_mortar, n_cells));
    }

    // fracture-point mortars
    for (std::size_t q = 0; q < xpoints.size(); ++q) {
        const IntersectionPoint& ip = xpoints[q];
        // intersection coupling: 1/(1/k_a + 1/k_b) of the crossing fractures
        double k_perp = 0.0;
        if (ip.fractures.size() >= 2) {
            double inv = 0.0;
            for (int f : ip.fractures) inv += 1.0 / fractures[f].normal_permeability;
            k_perp = 1.0 / inv;
        } else {
            k_perp = fractures[ip.fractures[0]].normal_permeability;
        }
        for (int f : ip.fractures) {
            SubdomainGrid& fg = dom.grids[frac_sd[f]];
            const Segment& seg = segs[f];
            const double s = seg.arclength(ip.p);
            const double tol = 1e-9 * std::max(1.0, seg.length);
            if (s < -tol || s > seg.length + tol)
                throw GeometryError("intersection point off fracture " + std::to_string(f + 1));
            if (s < tol || s > seg.length - tol) {
                // L-type: tag the existing end face
                const bool at_start = s < tol;
                int end_face = -1;
                for (int ff = 0; ff < fg.n_faces(); ++ff) {
                    const Face& face = fg.faces[ff];
                    if (face.right >= 0) continue;
                    const double sf = seg.arclength(face.center);
                    if (at_start ? sf < tol : sf > seg.length - tol) {
                        end_face = ff;
                        break;
                    }
                }
                if (end_face < 0) throw GeometryError("missing end face for L intersection");
                add_mortar(make_point_mortar(0, frac_sd[f], point_sd[q], k_perp, isect.aperture,
                                             end_face, fg.faces[end_face].normal[1]));
            } else {
                // X-type: sever the fracture grid at the crossing
                const auto [before, after] = cut_segment_grid(fg, seg, s);
                add_mortar(make_point_mortar(0, frac_sd[f], point_sd[q], k_perp, isect.aperture,
                                             before, fg.faces[before].normal[1]));
                add_mortar(make_point_mortar(0, frac_sd[f], point_sd[q], k_perp, isect.aperture,
                                             after, fg.faces[after].normal[1]));
            }
        }
    }

    for (auto& mt : dom.mortars)
        build_projections(mt, dom.grids[mt.higher_side], dom.grids[mt.lower_side]);

    const auto violations = validate(dom);
    if (!violations.empty())
        throw TopologyError("case construction produced an invalid domain: " + violations[0] +
                            (violations.size() > 1
                                 ? " (+" + std::to_string(violations.size() - 1) + " more)"
                                 : ""));

    setup.initial = segregated_initial(dom, config, matrix.y0 + matrix.height);
    return setup;
}

InitialValues segregated_initial(const MixedDimDomain& domain, const CaseConfig& config,
                                 double z_top) {
    InitialValues init;
    const double zi = config.interface_elevation;
    const double g = config.gravity;
    const double rho0 = config.fluid.heavy.ref_density;
    const double rho1 = config.fluid.light.ref_density;
    init.p.resize(domain.subdomains.size());
    init.s0.resize(domain.subdomains.size());
    for (std::size_t i = 0; i < domain.subdomains.size(); ++i) {
        const auto& grid = domain.grids[i];
        for (int c = 0; c < grid.n_cells(); ++c) {
            const double z = grid.cell_elevation[c];
            const bool heavy = z >= zi - kGeomTol;
            init.s0[i].push_back(heavy ? 1.0 : 0.0);
            const double p = heavy ? g * rho0 * (z_top - z)
                                   : g * (rho0 * (z_top - zi) + rho1 * (zi - z));
            init.p[i].push_back(p);
        }
    }
    return init;
}

InitialValues functional_initial(const MixedDimDomain& domain,
                                 const std::function<double(double, double)>& pressure,
                                 const std::function<double(double, double)>& saturation) {
    InitialValues init;
    init.p.resize(domain.subdomains.size());
    init.s0.resize(domain.subdomains.size());
    for (std::size_t i = 0; i < domain.subdomains.size(); ++i) {
        const auto& grid = domain.grids[i];
        for (int c = 0; c < grid.n_cells(); ++c) {
            const double x = grid.cell_center[c][0], y = grid.cell_center[c][1];
            init.p[i].push_back(pressure(x, y));
            init.s0[i].push_back(saturation(x, y));
        }
    }
    return init;
}

State build_state(const MixedDimDomain& domain, const UnknownMap& map,
                  const InitialValues& init) {
    State st;
    st.x.assign(map.size, 0.0);
    for (std::size_t i = 0; i < domain.subdomains.size(); ++i)
        for (int c = 0; c < domain.grids[i].n_cells(); ++c) {
            st.x[map.p(i, c)] = init.p[i][c];
            st.x[map.s(i, c)] = init.s0[i][c];
        }
    return st;
}

namespace {

FluidPair bundled_fluids() {
    FluidPair fl;
    fl.heavy.ref_density = 1.0;
    fl.heavy.viscosity = 1.0;
    fl.light.ref_density = 0.5;
    fl.light.viscosity = 1.0;
    // a whiff of compressibility keeps the all-no-flow pressure level pinned
    fl.heavy.compressibility = 1e-5;
    fl.light.compressibility = 1e-5;
    return fl;
}

CaseConfig bundled_config(const std::string& name, double t_end, double dt_max, double K_ref) {
    CaseConfig c;
    c.name = name;
    c.fluid = bundled_fluids();
    c.gravity = 1.0;
    c.t_end = t_end;
    c.dt_max = dt_max;
    c.tol = 1e-6;
    c.interface_elevation = 0.5;
    c.ref_porosity = 0.25;
    c.ref_density = 0.5;
    c.ref_length = 1.0;
    c.ref_permeability = K_ref;
    c.ref_viscosity = 1.0;
    return c;
}

CaseSetup make_case1a() {
    MatrixSpec m;
    m.kind = MatrixSpec::Kind::quad;
    m.nx = m.ny = 20;
    m.permeability = 1.0;
    m.porosity = 0.25;
    FractureSpec f;
    f.p0 = {0.0, 0.5, 0.0};
    f.p1 = {1.0, 0.5, 0.0};
    f.permeability = 1.0;
    f.normal_permeability = 0.1;
    f.aperture = 0.01;
    f.porosity = 0.25;
    return build_case(m, {f}, bundled_config("case1a", 20.0, 0.4, 1.0));
}

CaseSetup make_case1b() {
    MatrixSpec m;
    m.kind = MatrixSpec::Kind::quad;
    m.nx = m.ny = 20;
    m.permeability = 1.0;
    m.porosity = 0.25;
    FractureSpec f;
    f.p0 = {0.5, 0.3, 0.0};  // immersed tip
    f.p1 = {0.5, 1.0, 0.0};
    f.permeability = 10.0;
    f.normal_permeability = 0.1;
    f.aperture = 0.01;
    f.porosity = 0.25;
    return build_case(m, {f}, bundled_config("case1b", 5.0, 0.1, 1.0));
}

CaseSetup make_case1c(bool high_contrast) {
    MatrixSpec m;
    m.kind = MatrixSpec::Kind::tri;
    m.nx = m.ny = 16;
    m.permeability = 1.0;
    m.porosity = 0.25;
    FractureSpec f;
    f.p0 = {0.0, 0.0, 0.0};
    f.p1 = {1.0, 1.0, 0.0};
    f.permeability = high_contrast ? 1e-6 : 1.0;
    f.normal_permeability = high_contrast ? 1e-8 : 0.01;
    f.aperture = 0.01;
    f.porosity = 0.25;
    // non-conforming interface: fracture and mortar grids coarser than the trace
    f.n_cells = 12;
    f.n_mortar = 12;
    return build_case(m, {f},
                      bundled_config(high_contrast ? "case1c-hc" : "case1c", 10.0, 0.1, 1.0));
}

CaseSetup make_case2_standin() {
    MatrixSpec m;
    m.kind = MatrixSpec::Kind::quad;
    m.nx = m.ny = 40;
    m.permeability = 100.0;
    m.porosity = 0.25;

    auto frac = [](double x0, double y0, double x1, double y1, double K, double kp) {
        FractureSpec f;
        f.p0 = {x0, y0, 0.0};
        f.p1 = {x1, y1, 0.0};
        f.permeability = K;
        f.normal_permeability = kp;
        f.aperture = 0.01;
        f.porosity = 0.25;
        return f;
    };
    const double hi = 100.0, lo = 0.01;
    std::vector<FractureSpec> fr = {
        frac(0.10, 0.75, 0.90, 0.75, hi, hi),  // 1: long horizontal channel
        frac(0.25, 0.55, 0.25, 0.95, hi, hi),  // 2: X with 1
        frac(0.50, 0.60, 0.50, 0.90, hi, hi),  // 3: X with 1
        frac(0.15, 0.50, 0.55, 0.50, lo, lo),  // 4: low-permeable barrier
        frac(0.55, 0.20, 0.55, 0.50, lo, lo),  // 5: low-permeable, L with 4
        frac(0.30, 0.30, 0.70, 0.30, hi, hi),  // 6: X with 5 and 10
        frac(0.80, 0.40, 0.80, 0.80, hi, hi),  // 7: X with 1 and 8
        frac(0.70, 0.60, 0.95, 0.60, hi, hi),  // 8: X with 7
        frac(0.10, 0.15, 0.45, 0.15, hi, hi),  // 9: L with 10
        frac(0.45, 0.15, 0.45, 0.40, hi, hi),  // 10: X with 6
    };
    return build_case(m, fr, bundled_config("case2-standin", 0.05, 2e-3, 100.0));
}

} // namespace

std::vector<std::string> builtin_case_names() {
    return {"case1a", "case1b", "case1c", "case1c-hc", "case2-standin"};
}

CaseSetup load_case(const std::string& name_or_path) {
    if (name_or_path == "case1a") return make_case1a();
    if (name_or_path == "case1b") return make_case1b();
    if (name_or_path == "case1c") return make_case1c(false);
    if (name_or_path == "case1c-hc") return make_case1c(true);
    if (name_or_path == "case2-standin") return make_case2_standin();
    return load_case_file(name_or_path);
}

// --- case-file parsing -------------------------------------------------------

namespace {

struct IniSection {
    std::string name;
    std::map<std::string, std::string> kv;
    int lineno = 0;
};

std::vector<IniSection> parse_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open case file: " + path);
    std::vector<IniSection> sections;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw IoError(path + ":" + std::to_string(lineno) + ": malformed section header");
            sections.push_back({trim(line.substr(1, line.size() - 2)), {}, lineno});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(path + ":" + std::to_string(lineno) + ": expected key = value");
        if (sections.empty())
            throw IoError(path + ":" + std::to_string(lineno) + ": key outside any section");
        sections.back().kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return sections;
}

double get_num(const IniSection& s, const std::string& key, const std::string& path,
               std::optional<double> fallback = std::nullopt) {
    const auto it = s.kv.find(key);
    if (it == s.kv.end()) {
        if (fallback) return *fallback;
        throw IoError(path + ": [" + s.name + "] missing key '" + key + "'");
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        return v;
    } catch (...) {
        throw IoError(path + ": [" + s.name + "] key '" + key + "' is not a number: " +
                      it->second);
    }
}

std::array<double, 2> get_pair(const IniSection& s, const std::string& key,
                               const std::string& path) {
    const auto it = s.kv.find(key);
    if (it == s.kv.end()) throw IoError(path + ": [" + s.name + "] missing key '" + key + "'");
    std::istringstream ss(it->second);
    double a, b;
    if (!(ss >> a >> b))
        throw IoError(path + ": [" + s.name + "] key '" + key + "' needs two numbers");
    return {a, b};
}

} // namespace

CaseSetup load_case_file(const std::string& path) {
    const auto sections = parse_ini(path);
    CaseConfig cfg;
    MatrixSpec m;
    std::vector<FractureSpec> fractures;
    IntersectionDefaults isect;
    bool have_case = false, have_matrix = false;

    for (const auto& s : sections) {
        if (s.name == "case") {
            have_case = true;
            if (auto it = s.kv.find("name"); it != s.kv.end()) cfg.name = it->second;
            cfg.gravity = get_num(s, "gravity", path, 1.0);
            cfg.t_end = get_num(s, "t_end", path);
            cfg.dt_max = get_num(s, "dt_max", path);
            cfg.tol = get_num(s, "tol", path, 1e-6);
            if (auto it = s.kv.find("scheme"); it != s.kv.end()) {
                if (it->second == "ppu") cfg.scheme = Scheme::ppu;
                else if (it->second == "hu") cfg.scheme = Scheme::hu;
                else throw IoError(path + ": unknown scheme '" + it->second + "'");
            }
        } else if (s.name == "fluid.heavy" || s.name == "fluid.light") {
            Phase& ph = s.name == "fluid.heavy" ? cfg.fluid.heavy : cfg.fluid.light;
            ph.ref_density = get_num(s, "density", path);
            ph.viscosity = get_num(s, "viscosity", path, 1.0);
            ph.compressibility = get_num(s, "compressibility", path, 0.0);
            ph.ref_pressure = get_num(s, "ref_pressure", path, 0.0);
        } else if (s.name == "matrix") {
            have_matrix = true;
            const auto it = s.kv.find("type");
            const std::string type = it == s.kv.end() ? "quad" : it->second;
            if (type == "quad") m.kind = MatrixSpec::Kind::quad;
            else if (type == "tri") m.kind = MatrixSpec::Kind::tri;
            else if (type == "mesh") m.kind = MatrixSpec::Kind::mesh;
            else throw IoError(path + ": unknown matrix type '" + type + "'");
            if (m.kind == MatrixSpec::Kind::mesh) {
                const auto mp = s.kv.find("mesh");
                if (mp == s.kv.end()) throw IoError(path + ": [matrix] mesh type needs 'mesh ='");
                std::filesystem::path p(mp->second);
                if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
                m.mesh_path = p.string();
            } else {
                m.nx = static_cast<int>(get_num(s, "nx", path));
                m.ny = static_cast<int>(get_num(s, "ny", path));
                m.width = get_num(s, "width", path, 1.0);
                m.height = get_num(s, "height", path, 1.0);
                m.x0 = get_num(s, "x0", path, 0.0);
                m.y0 = get_num(s, "y0", path, 0.0);
            }
            m.permeability = get_num(s, "permeability", path);
            m.porosity = get_num(s, "porosity", path);
        } else if (s.name == "fracture") {
            FractureSpec f;
            const auto a = get_pair(s, "p0", path);
            const auto b = get_pair(s, "p1", path);
            f.p0 = {a[0], a[1], 0.0};
            f.p1 = {b[0], b[1], 0.0};
            f.permeability = get_num(s, "permeability", path);
            f.normal_permeability = get_num(s, "normal_permeability", path);
            f.aperture = get_num(s, "aperture", path, 0.01);
            f.porosity = get_num(s, "porosity", path, 0.25);
            f.n_cells = static_cast<int>(get_num(s, "cells", path, -1.0));
            f.n_mortar = static_cast<int>(get_num(s, "mortar_cells", path, -1.0));
            fractures.push_back(f);
        } else if (s.name == "intersections") {
            isect.aperture = get_num(s, "aperture", path, 0.01);
            isect.porosity = get_num(s, "porosity", path, 0.25);
        } else if (s.name == "initial") {
            cfg.interface_elevation = get_num(s, "interface_elevation", path, 0.5);
        } else {
            throw IoError(path + ":" + std::to_string(s.lineno) + ": unknown section [" +
                          s.name + "]");
        }
    }
    if (!have_case) throw IoError(path + ": missing [case] section");
    if (!have_matrix) throw IoError(path + ": missing [matrix] section");

    cfg.ref_porosity = m.porosity;
    cfg.ref_density = cfg.fluid.heavy.ref_density - cfg.fluid.light.ref_density;
    cfg.ref_length = m.height;
    cfg.ref_permeability = m.permeability;
    cfg.ref_viscosity = cfg.fluid.heavy.viscosity;
    if (cfg.name == "case") cfg.name = std::filesystem::path(path).stem().string();
    return build_case(m, fractures, cfg, isect);
}

} // namespace mdflow
