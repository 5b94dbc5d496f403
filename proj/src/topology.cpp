#include "mdflow/topology.hpp"

#include <algorithm>
#include <cmath>

#include "mdflow/errors.hpp"

namespace mdflow {

namespace {

void fill_maps(const std::vector<Span>& mortar_spans, const std::vector<Span>& side_spans,
               const std::vector<double>& mortar_measure,
               const std::vector<double>& side_measure, SparseMap& avg, SparseMap& sum,
               const std::string& side_name, int mortar_id) {
    const int np = static_cast<int>(mortar_spans.size());
    avg.rows.assign(np, {});
    sum.rows.assign(np, {});
    int max_elem = -1;
    for (const auto& s : side_spans) max_elem = std::max(max_elem, s.elem);
    avg.cols = sum.cols = max_elem + 1;

    for (int p = 0; p < np; ++p) {
        const Span& mp = mortar_spans[p];
        double covered = 0.0;
        for (const Span& es : side_spans) {
            const double lo = std::max(mp.a, es.a);
            const double hi = std::min(mp.b, es.b);
            const double overlap = hi - lo;
            if (overlap <= 1e-10 * mortar_measure[mp.elem]) continue;
            covered += overlap;
            avg.rows[p].emplace_back(es.elem, overlap / mortar_measure[mp.elem]);
            sum.rows[p].emplace_back(es.elem, overlap / side_measure[es.elem]);
        }
        if (covered < (1.0 - 1e-10) * mortar_measure[mp.elem])
            throw TopologyError("mortar " + std::to_string(mortar_id) + " cell " +
                                std::to_string(p) + " not covered by " + side_name +
                                " elements (covered " + std::to_string(covered) + " of " +
                                std::to_string(mortar_measure[mp.elem]) + ")");
        std::sort(avg.rows[p].begin(), avg.rows[p].end());
        std::sort(sum.rows[p].begin(), sum.rows[p].end());
    }
}

} // namespace

void build_projections(MortarInterface& mortar, const SubdomainGrid& high_grid,
                       const SubdomainGrid& low_grid) {
    if (mortar.mortar_spans.size() != mortar.cell_measure.size())
        throw TopologyError("mortar " + std::to_string(mortar.id) + ": span/cell count mismatch");

    // re-key spans onto local element numbering so the maps stay compact
    std::vector<Span> high_local = mortar.higher_spans;
    for (auto& s : high_local) {
        const auto it = std::find(mortar.higher_faces.begin(), mortar.higher_faces.end(), s.elem);
        if (it == mortar.higher_faces.end())
            throw TopologyError("mortar " + std::to_string(mortar.id) +
                                ": span references face not in higher_faces");
        s.elem = static_cast<int>(it - mortar.higher_faces.begin());
    }
    std::vector<double> high_local_measures(mortar.higher_faces.size());
    for (std::size_t k = 0; k < mortar.higher_faces.size(); ++k)
        high_local_measures[k] = high_grid.faces[mortar.higher_faces[k]].area;

    std::vector<Span> low_local = mortar.lower_spans;
    for (auto& s : low_local) {
        const auto it = std::find(mortar.lower_cells.begin(), mortar.lower_cells.end(), s.elem);
        if (it == mortar.lower_cells.end())
            throw TopologyError("mortar " + std::to_string(mortar.id) +
                                ": span references cell not in lower_cells");
        s.elem = static_cast<int>(it - mortar.lower_cells.begin());
    }
    std::vector<double> low_local_measures(mortar.lower_cells.size());
    for (std::size_t k = 0; k < mortar.lower_cells.size(); ++k)
        low_local_measures[k] = low_grid.cell_measure[mortar.lower_cells[k]];

    std::vector<Span> mortar_local = mortar.mortar_spans;
    for (std::size_t p = 0; p < mortar_local.size(); ++p) mortar_local[p].elem = static_cast<int>(p);

    fill_maps(mortar_local, high_local, mortar.cell_measure, high_local_measures,
              mortar.high_avg, mortar.high_sum, "higher-side", mortar.id);
    fill_maps(mortar_local, low_local, mortar.cell_measure, low_local_measures,
              mortar.low_avg, mortar.low_sum, "lower-side", mortar.id);
    mortar.high_avg.cols = mortar.high_sum.cols = static_cast<int>(mortar.higher_faces.size());
    mortar.low_avg.cols = mortar.low_sum.cols = static_cast<int>(mortar.lower_cells.size());
}

std::vector<std::string> validate(const MixedDimDomain& domain) {
    std::vector<std::string> v;
    const int d = domain.ambient_dim;

    for (const auto& sd : domain.subdomains) {
        const std::string tag = "subdomain " + std::to_string(sd.id);
        if (sd.dim > d) v.push_back(tag + ": dim exceeds ambient dimension");
        if (sd.eps <= 0.0) v.push_back(tag + ": nonpositive codimension thickness");
        if (sd.codim != d - sd.dim) v.push_back(tag + ": codim inconsistent with ambient dim");
        for (int m : sd.higher_mortars)
            if (std::find(sd.lower_mortars.begin(), sd.lower_mortars.end(), m) !=
                sd.lower_mortars.end())
                v.push_back(tag + ": mortar " + std::to_string(m) +
                            " listed as both higher and lower");
        const auto& g = domain.grids[sd.id];
        if (sd.dim > 0) {
            for (int c = 0; c < g.n_cells(); ++c)
                if (g.cell_measure[c] <= 0.0)
                    v.push_back(tag + ": cell " + std::to_string(c) + " has nonpositive measure");
            for (int f = 0; f < g.n_faces(); ++f) {
                const Face& face = g.faces[f];
                if (face.area <= 0.0)
                    v.push_back(tag + ": face " + std::to_string(f) + " has nonpositive area");
                const double n2 = face.normal[0] * face.normal[0] +
                                  face.normal[1] * face.normal[1] +
                                  face.normal[2] * face.normal[2];
                if (std::abs(n2 - 1.0) > 1e-12)
                    v.push_back(tag + ": face " + std::to_string(f) + " normal not unit length");
                if (face.right >= 0 && face.left == face.right)
                    v.push_back(tag + ": face " + std::to_string(f) + " joins a cell to itself");
            }
        }
    }

    for (const auto& mt : domain.mortars) {
        const std::string tag = "mortar " + std::to_string(mt.id);
        if (mt.higher_side < 0 || mt.higher_side >= static_cast<int>(domain.subdomains.size()) ||
            mt.lower_side < 0 || mt.lower_side >= static_cast<int>(domain.subdomains.size())) {
            v.push_back(tag + ": dangling subdomain reference");
            continue;
        }
        const auto& hi = domain.subdomains[mt.higher_side];
        const auto& lo = domain.subdomains[mt.lower_side];
        if (hi.dim != lo.dim + 1)
            v.push_back(tag + ": codimension gap (" + std::to_string(hi.dim) + "D vs " +
                        std::to_string(lo.dim) + "D)");
        if (mt.dim != lo.dim)
            v.push_back(tag + ": mortar dim differs from lower-side dim");
        if (mt.normal_permeability <= 0.0) v.push_back(tag + ": nonpositive normal permeability");
        if (mt.b != d - mt.dim) v.push_back(tag + ": codim factor exponent inconsistent");
        if (std::find(hi.lower_mortars.begin(), hi.lower_mortars.end(), mt.id) ==
            hi.lower_mortars.end())
            v.push_back(tag + ": not registered in higher side's lower_mortars");
        if (std::find(lo.higher_mortars.begin(), lo.higher_mortars.end(), mt.id) ==
            lo.higher_mortars.end())
            v.push_back(tag + ": not registered in lower side's higher_mortars");

        auto check_rows = [&](const SparseMap& map, const char* name, bool rows_sum_to_one) {
            if (map.n_rows() != mt.n_cells()) {
                v.push_back(tag + ": " + name + " row count differs from mortar cells");
                return;
            }
            for (int p = 0; p < map.n_rows(); ++p) {
                double s = 0.0;
                for (const auto& [c, w] : map.rows[p]) {
                    s += w;
                    if (w < -1e-12 || w > 1.0 + 1e-9)
                        v.push_back(tag + ": " + name + " entry outside [0,1] at row " +
                                    std::to_string(p));
                }
                if (rows_sum_to_one && std::abs(s - 1.0) > 1e-12)
                    v.push_back(tag + ": " + name + " row " + std::to_string(p) +
                                " violates partition of unity (sum " + std::to_string(s) + ")");
            }
        };
        check_rows(mt.high_avg, "high_avg", true);
        check_rows(mt.low_avg, "low_avg", true);
        check_rows(mt.high_sum, "high_sum", false);
        check_rows(mt.low_sum, "low_sum", false);

        for (int f : mt.higher_faces) {
            const auto& g = domain.grids[mt.higher_side];
            if (f < 0 || f >= g.n_faces() || g.faces[f].right >= 0)
                v.push_back(tag + ": higher face " + std::to_string(f) + " is not a boundary face");
        }
        for (int c : mt.lower_cells)
            if (c < 0 || c >= domain.grids[mt.lower_side].n_cells())
                v.push_back(tag + ": lower cell " + std::to_string(c) + " out of range");
    }
    return v;
}

} // namespace mdflow
