#include "mdflow/mortar.hpp"

#include "mdflow/errors.hpp"

namespace mdflow {

namespace {

Dual project_row(const SparseMap& map, int row, const std::vector<Dual>& vals) {
    Dual out(0.0);
    for (const auto& [c, w] : map.rows[row]) out += w * vals[c];
    return out;
}

} // namespace

Dual interface_upwind(const MortarInterface& mortar, int cell, double zeta,
                      const std::vector<Dual>& high_vals, const std::vector<Dual>& low_vals) {
    if (mortar.high_avg.rows.empty() || mortar.low_avg.rows.empty())
        throw TopologyError("mortar " + std::to_string(mortar.id) + ": projections not built");
    if (zeta < 0.0) return project_row(mortar.low_avg, cell, low_vals);
    return project_row(mortar.high_avg, cell, high_vals);
}

Dual mortar_claw_residual(const MortarInterface& mortar, int cell, const Dual& zeta,
                          double gravity, const std::vector<Dual>& p_high_adj,
                          const std::vector<Dual>& p_low, const Dual& rho_up) {
    if (mortar.high_avg.rows.empty() || mortar.low_avg.rows.empty())
        throw TopologyError("mortar " + std::to_string(mortar.id) + ": projections not built");
    const Dual p_h = project_row(mortar.high_avg, cell, p_high_adj);
    const Dual p_l = project_row(mortar.low_avg, cell, p_low);
    const double scale = mortar.codim_factor() * mortar.normal_permeability *
                         mortar.cell_measure[cell];
    const Dual bracket =
        (2.0 / mortar.eps_low) * (p_h - p_l) - rho_up * (gravity * mortar.z_dircos);
    return zeta - scale * bracket;
}

std::vector<Dual> mortar_mass_flux(const MortarInterface& mortar,
                                   const std::vector<double>& zeta_current,
                                   const std::vector<Dual>& zeta,
                                   const std::vector<Dual>& rho_high,
                                   const std::vector<Dual>& rho_low,
                                   const std::vector<Dual>& lam_high,
                                   const std::vector<Dual>& lam_low) {
    std::vector<Dual> flux(mortar.n_cells());
    for (int p = 0; p < mortar.n_cells(); ++p) {
        const Dual rho = interface_upwind(mortar, p, zeta_current[p], rho_high, rho_low);
        const Dual lam = interface_upwind(mortar, p, zeta_current[p], lam_high, lam_low);
        flux[p] = rho * lam * zeta[p];
    }
    return flux;
}

std::vector<Dual> distribute_to_higher_faces(const MortarInterface& mortar,
                                             const std::vector<Dual>& cell_flux) {
    return mortar.high_avg.apply_transpose(cell_flux);
}

std::vector<Dual> distribute_to_lower_cells(const MortarInterface& mortar,
                                            const std::vector<Dual>& cell_flux) {
    return mortar.low_avg.apply_transpose(cell_flux);
}

} // namespace mdflow
