#ifndef MDFLOW_MORTAR_HPP
#define MDFLOW_MORTAR_HPP

#include <cstdint>
#include <vector>

#include "mdflow/ad.hpp"
#include "mdflow/topology.hpp"

namespace mdflow {

//! Interface upwinding N_j for one mortar cell: projects the lower-side cell
//! value when the mortar flux is negative, the higher-side boundary-adjacent
//! cell value otherwise (the >= branch takes the higher side).
//!
//! `high_vals` are indexed like mortar.higher_faces (value of the cell behind
//! each boundary face); `low_vals` like mortar.lower_cells.
Dual interface_upwind(const MortarInterface& mortar, int cell, double zeta,
                      const std::vector<Dual>& high_vals, const std::vector<Dual>& low_vals);

//! Residual of the mortar-flux constitutive law for one cell and one phase:
//!   zeta - eps_l^(b-1) k_perp |c| [ (2/eps_l)(Pi_h tr p_h - Pi_l p_l) - rho_up g dz_cos ]
//! with tr p_h the adjacent higher-dimensional cell-center pressure.
Dual mortar_claw_residual(const MortarInterface& mortar, int cell, const Dual& zeta,
                          double gravity, const std::vector<Dual>& p_high_adj,
                          const std::vector<Dual>& p_low, const Dual& rho_up);

//! Mass flux carried by each mortar cell for one phase: rho_up lam_up zeta,
//! all interface-upwinded by the sign of the current zeta iterate.
std::vector<Dual> mortar_mass_flux(const MortarInterface& mortar,
                                   const std::vector<double>& zeta_current,
                                   const std::vector<Dual>& zeta,
                                   const std::vector<Dual>& rho_high,
                                   const std::vector<Dual>& rho_low,
                                   const std::vector<Dual>& lam_high,
                                   const std::vector<Dual>& lam_low);

//! Fractions of each mortar cell's extensive flux received by the higher-side
//! boundary faces (partition of the mortar cell measure); conserves the total.
//! Output indexed like mortar.higher_faces.
std::vector<Dual> distribute_to_higher_faces(const MortarInterface& mortar,
                                             const std::vector<Dual>& cell_flux);

//! Same partition toward the lower-side cells; output indexed like
//! mortar.lower_cells. The two distributions move identical totals, which is
//! what makes the interface exchange exactly conservative.
std::vector<Dual> distribute_to_lower_cells(const MortarInterface& mortar,
                                            const std::vector<Dual>& cell_flux);

} // namespace mdflow

#endif
