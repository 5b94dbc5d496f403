#ifndef MDFLOW_FLUID_HPP
#define MDFLOW_FLUID_HPP

#include <cassert>
#include <cmath>
#include <utility>

#include "mdflow/ad.hpp"

namespace mdflow {

//! Slightly compressible phase: rho(p) = rho_ref * exp(c * (p - p_ref)),
//! constant viscosity, quadratic relative permeability k_r(S) = S^2.
struct Phase {
    double ref_density = 1.0;      // kg/m^3
    double compressibility = 0.0;  // 1/Pa
    double ref_pressure = 0.0;     // Pa
    double viscosity = 1.0;        // Pa s
};

//! Two-phase bundle; index 0 is the heavy phase, index 1 the light one.
struct FluidPair {
    Phase heavy;
    Phase light;

    const Phase& phase(int l) const { return l == 0 ? heavy : light; }
};

template <class S>
S density(const Phase& ph, const S& p) {
    using std::exp;
    if (ph.compressibility == 0.0) return S(ph.ref_density);
    return ph.ref_density * exp(ph.compressibility * (p - ph.ref_pressure));
}

//! Quadratic mobility S^2/mu. Callers clip saturations to [0,1] beforehand.
template <class S>
S mobility(const S& sat, double viscosity) {
    assert(value(sat) >= -1e-12 && value(sat) <= 1.0 + 1e-12);
    return sat * sat / viscosity;
}

template <class S>
S phase_potential(const S& p, const S& rho, double gravity, double z) {
    return p + rho * (gravity * z);
}

//! Storage contents per unit pore-free bulk volume: (phi rho0 S0, phi rho1 (1-S0)).
template <class S>
std::pair<S, S> accumulation(double porosity, const S& rho0, const S& rho1, const S& s0) {
    return {porosity * (rho0 * s0), porosity * (rho1 * (1.0 - s0))};
}

//! Curvature data of the configured relative-permeability law, used by the
//! hybrid-upwind blending coefficient. For k_r = S^2: k_r(1) = 1, max|k_r''| = 2.
struct RelPermCurvature {
    double kr_at_one = 1.0;
    double max_second_derivative = 2.0;
};

} // namespace mdflow

#endif
