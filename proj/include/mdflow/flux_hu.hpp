#ifndef MDFLOW_FLUX_HU_HPP
#define MDFLOW_FLUX_HU_HPP

#include <cmath>
#include <cstdint>

#include "mdflow/ad.hpp"
#include "mdflow/flux_ppu.hpp"
#include "mdflow/fluid.hpp"

namespace mdflow {

//! Parameters of the blended centred/upwind mobility average.
struct BlendParams {
    double cap = 1e6;  // upper bound on the blending coefficient
    RelPermCurvature curvature;
};

//! Face density weighted by the phase saturations on both sides. Falls back to
//! the arithmetic mean when the phase is (numerically) absent on both sides:
//! the value is then multiplied by a vanishing mobility, but it must stay
//! finite and must not derail the Jacobian with near-singular quotients.
template <class S>
S saturation_weighted_density(const S& s_m, const S& rho_m, const S& s_n, const S& rho_n) {
    if (value(s_m) + value(s_n) <= 1e-12) return 0.5 * (rho_m + rho_n);
    return (s_m * rho_m + s_n * rho_n) / (s_m + s_n);
}

//! Arctan-shaped weight in (0,1): 0.5 at zero potential jump, monotone
//! increasing, approaching pure upwinding for large jumps.
template <class S>
S blend_weight(const S& dphi, const S& c) {
    using std::atan;
    constexpr double inv_pi = 0.3183098861837906715;
    return 0.5 + inv_pi * atan(c * dphi);
}

//! Blending coefficient min(max|k_r''| / (k_r(1) rho_face), cap).
template <class S>
S blend_coefficient(const S& rho_face, const BlendParams& bp) {
    using std::min;
    return min((bp.curvature.max_second_derivative / bp.curvature.kr_at_one) / rho_face, bp.cap);
}

struct HuFaceFlux {
    Dual total_mass;     // Q_T entering the pressure equation
    Dual viscous;        // V_0
    Dual gravity;        // G_0
    Dual q_total;        // total volumetric flux q_T = q_0^WA + q_1^WA
    Dual q_wa[2];        // per-phase weighted-average volumetric fluxes
    Dual rho_face[2];    // saturation-weighted face densities
    std::uint8_t side_qt;      // upwind side of the viscous split
    std::uint8_t side_omega[2];  // upwind sides of the buoyant mobilities
};

//! Hybrid-upwind face fluxes: weighted-average total flux for the pressure
//! equation, and a viscous/buoyant splitting of the heavy-phase flux for the
//! mass balance. Division guards keep the fractional flow finite when the
//! upwinded total mobility degenerates; there the numerator vanishes too.
inline HuFaceFlux hu_face_flux(const FluidPair& fluid, double gravity, double trans,
                               double dz, const FaceState& st,
                               const BlendParams& bp = BlendParams{}) {
    HuFaceFlux out;
    const Dual dp = st.p_m - st.p_n;

    Dual rho_m[2], rho_n[2], lam_m[2], lam_n[2];
    for (int l = 0; l < 2; ++l) {
        const Phase& ph = fluid.phase(l);
        rho_m[l] = density(ph, st.p_m);
        rho_n[l] = density(ph, st.p_n);
        const Dual sat_m = l == 0 ? st.s_m : 1.0 - st.s_m;
        const Dual sat_n = l == 0 ? st.s_n : 1.0 - st.s_n;
        lam_m[l] = mobility(sat_m, ph.viscosity);
        lam_n[l] = mobility(sat_n, ph.viscosity);
    }

    out.total_mass = Dual(0.0);
    out.q_total = Dual(0.0);
    for (int l = 0; l < 2; ++l) {
        const Dual sat_m = l == 0 ? st.s_m : 1.0 - st.s_m;
        const Dual sat_n = l == 0 ? st.s_n : 1.0 - st.s_n;
        out.rho_face[l] = saturation_weighted_density(sat_m, rho_m[l], sat_n, rho_n[l]);
        const Dual dphi = dp + (gravity * dz) * out.rho_face[l];
        const Dual c = blend_coefficient(out.rho_face[l], bp);
        const Dual beta = blend_weight(dphi, c);
        const Dual lam_wa = beta * lam_m[l] + (1.0 - beta) * lam_n[l];
        out.q_wa[l] = lam_wa * (trans * dphi);
        out.q_total += out.q_wa[l];
        out.total_mass += out.rho_face[l] * out.q_wa[l];
    }

    // viscous flux: all quantities upwinded by the total volumetric flux
    out.side_qt = upwind_side(out.q_total.value());
    {
        const Dual& rho_v = upwind(rho_m[0], rho_n[0], out.q_total.value());
        const Dual& lam0_v = upwind(lam_m[0], lam_n[0], out.q_total.value());
        const Dual lam_t_v = upwind(lam_m[0], lam_n[0], out.q_total.value()) +
                             upwind(lam_m[1], lam_n[1], out.q_total.value());
        out.viscous = rho_v * (lam0_v / max(lam_t_v, 1e-12)) * out.q_total;
    }

    // buoyant flux: each phase's mobility comes from the cell it leaves under
    // the countercurrent motion. theta_l is the buoyant driving of phase l
    // (positive: l pushed from m to n); the counter-phase moves the other way,
    // so its mobility inside omega is taken at its own upstream side.
    Dual lam_g[2];
    for (int l = 0; l < 2; ++l) {
        const int k = 1 - l;
        const Dual theta = (out.rho_face[l] - out.rho_face[k]) * (gravity * dz);
        const Dual& lam_k = upwind(lam_m[k], lam_n[k], -theta.value());
        const Dual omega = lam_k * theta;
        out.side_omega[l] = upwind_side(omega.value());
        lam_g[l] = upwind(lam_m[l], lam_n[l], omega.value());
    }
    const Dual lam_t_g = lam_g[0] + lam_g[1];
    const Dual q0_g = trans * (lam_g[0] * lam_g[1] / max(lam_t_g, 1e-12)) *
                      ((out.rho_face[0] - out.rho_face[1]) * (gravity * dz));
    const Dual& rho_g = upwind(rho_m[0], rho_n[0], q0_g.value());
    out.gravity = rho_g * q0_g;
    return out;
}

} // namespace mdflow

#endif
