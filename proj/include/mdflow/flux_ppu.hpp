#ifndef MDFLOW_FLUX_PPU_HPP
#define MDFLOW_FLUX_PPU_HPP

#include <cstdint>

#include "mdflow/ad.hpp"
#include "mdflow/fluid.hpp"

namespace mdflow {

//! Discrete upwind operator: the m-side value when the driving value is
//! nonnegative (ties go to m), the n-side value otherwise.
template <class S>
const S& upwind(const S& x_m, const S& x_n, double driving) {
    return driving >= 0.0 ? x_m : x_n;
}

//! Pressure/saturation pair of the two cells sharing a face, as AD scalars.
struct FaceState {
    Dual p_m, p_n;
    Dual s_m, s_n;  // heavy-phase saturation S0
};

//! Upwind sides, one byte per decision. A driving value of exactly zero has
//! no direction (the associated flux term vanishes); it is tracked separately
//! so that a tie resolving into a definite side does not count as a flip.
enum : std::uint8_t { kSideM = 0, kSideN = 1, kSideTie = 2 };

inline std::uint8_t upwind_side(double driving) {
    if (driving == 0.0) return kSideTie;
    return driving > 0.0 ? kSideM : kSideN;
}

struct PpuFaceFlux {
    Dual phase_mass[2];  // Q_0, Q_1 (integrated mass flux, positive m -> n)
    Dual total_mass;     // Q_T = Q_0 + Q_1
    std::uint8_t side[2];
};

//! Phase-potential upstreaming: per-phase mobility and density upwinded by the
//! sign of the phase driving value T dp + T g rho_avg dz. The density inside
//! the driving value is the arithmetic cell average; the upwinded density
//! multiplies outside.
inline PpuFaceFlux ppu_face_flux(const FluidPair& fluid, double gravity, double trans,
                                 double dz, const FaceState& st) {
    PpuFaceFlux out;
    out.total_mass = Dual(0.0);
    const Dual dp = st.p_m - st.p_n;
    for (int l = 0; l < 2; ++l) {
        const Phase& ph = fluid.phase(l);
        const Dual rho_m = density(ph, st.p_m);
        const Dual rho_n = density(ph, st.p_n);
        const Dual sat_m = l == 0 ? st.s_m : 1.0 - st.s_m;
        const Dual sat_n = l == 0 ? st.s_n : 1.0 - st.s_n;
        const Dual lam_m = mobility(sat_m, ph.viscosity);
        const Dual lam_n = mobility(sat_n, ph.viscosity);
        const Dual rho_avg = 0.5 * (rho_m + rho_n);
        const Dual driving = trans * dp + (trans * gravity * dz) * rho_avg;
        out.side[l] = upwind_side(driving.value());
        const Dual& lam_up = upwind(lam_m, lam_n, driving.value());
        const Dual& rho_up = upwind(rho_m, rho_n, driving.value());
        out.phase_mass[l] = rho_up * lam_up * driving;
        out.total_mass += out.phase_mass[l];
    }
    return out;
}

} // namespace mdflow

#endif
