#ifndef MDFLOW_ASSEMBLY_HPP
#define MDFLOW_ASSEMBLY_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cstdint>
#include <vector>

#include "mdflow/fluid.hpp"
#include "mdflow/flux_hu.hpp"
#include "mdflow/flux_ppu.hpp"
#include "mdflow/mortar.hpp"
#include "mdflow/topology.hpp"

namespace mdflow {

enum class Scheme { ppu, hu };

const char* scheme_name(Scheme s);

//! How the per-entity unknown blocks are laid out in the global vector.
enum class BlockOrdering {
    per_entity,     // [p_i, S_i] per subdomain, then [z0_j, z1_j] per mortar
    variable_major  // all pressures, then all saturations, then all mortar fluxes
};

//! Offsets of each entity's unknown blocks in the flat vector.
struct UnknownMap {
    std::vector<int> p_base, s_base;    // per subdomain
    std::vector<int> z0_base, z1_base;  // per mortar
    int size = 0;

    static UnknownMap build(const MixedDimDomain& domain, BlockOrdering ordering);

    int p(int subdomain, int cell) const { return p_base[subdomain] + cell; }
    int s(int subdomain, int cell) const { return s_base[subdomain] + cell; }
    int zeta(int mortar, int phase, int cell) const {
        return (phase == 0 ? z0_base : z1_base)[mortar] + cell;
    }
};

//! Flat vector of all unknowns: per-cell (p, S0) and per-mortar-cell (z0, z1).
struct State {
    std::vector<double> x;

    double& at(int idx) { return x[idx]; }
    double at(int idx) const { return x[idx]; }
};

//! Per-subdomain constant phase sources f_0, f_1 (mass rate densities).
struct Sources {
    std::vector<std::array<double, 2>> per_subdomain;  // empty means zero everywhere
};

//! Offsets into the flat upwind-choice signature, used for flip counting.
//! Subdomain groups come first (2 or 3 bytes per face depending on scheme),
//! then mortar groups (2 bytes per mortar cell).
struct ChoiceLayout {
    std::vector<int> subdomain_base;
    std::vector<int> mortar_base;
    int size = 0;
};

//! Residual vector, exact Jacobian, and the upwind-choice signature of the
//! state the assembly was evaluated at.
struct AssemblyResult {
    Eigen::VectorXd residual;
    Eigen::SparseMatrix<double> jacobian;
    std::vector<std::uint8_t> choices;
};

//! Everything immutable a run needs: domain, per-subdomain transmissibilities,
//! unknown layout, and choice layout for the selected scheme.
class Discretization {
public:
    Discretization(const MixedDimDomain& domain, Scheme scheme,
                   BlockOrdering ordering = BlockOrdering::per_entity);

    const MixedDimDomain& domain() const { return *domain_; }
    Scheme scheme() const { return scheme_; }
    const UnknownMap& unknowns() const { return unknowns_; }
    const ChoiceLayout& choice_layout() const { return choices_; }
    const std::vector<double>& transmissibilities(int subdomain) const {
        return trans_[subdomain];
    }

    //! Fully-implicit residual of one Euler step with exact AD Jacobian.
    AssemblyResult assemble_residual(const FluidPair& fluid, double gravity,
                                     const State& current, const State& previous, double dt,
                                     const Sources* sources = nullptr) const;

    //! Total mass of one phase over all subdomains (codim-extended measures).
    double total_mass(const FluidPair& fluid, const State& state, int phase) const;

private:
    const MixedDimDomain* domain_;
    Scheme scheme_;
    UnknownMap unknowns_;
    ChoiceLayout choices_;
    std::vector<std::vector<double>> trans_;
};

//! Number of upwind decisions recorded per face for a scheme.
int choices_per_face(Scheme scheme);

} // namespace mdflow

#endif
