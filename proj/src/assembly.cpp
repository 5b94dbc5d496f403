#include "mdflow/assembly.hpp"

#include <cmath>

#include "mdflow/errors.hpp"

namespace mdflow {

const char* scheme_name(Scheme s) { return s == Scheme::ppu ? "ppu" : "hu"; }

namespace {

// saturations enter constitutive laws clamped to [0,1]; the raw values stay in
// the accumulation so the converged update's bound overshoot is not lost
Dual clamped_saturation(const Dual& s) {
    if (s.value() < 0.0) return Dual(0.0);
    if (s.value() > 1.0) return Dual(1.0);
    return s;
}

} // namespace

int choices_per_face(Scheme scheme) { return scheme == Scheme::ppu ? 2 : 3; }

UnknownMap UnknownMap::build(const MixedDimDomain& domain, BlockOrdering ordering) {
    UnknownMap map;
    const int ns = static_cast<int>(domain.subdomains.size());
    const int nm = static_cast<int>(domain.mortars.size());
    map.p_base.resize(ns);
    map.s_base.resize(ns);
    map.z0_base.resize(nm);
    map.z1_base.resize(nm);
    int off = 0;
    if (ordering == BlockOrdering::per_entity) {
        for (int i = 0; i < ns; ++i) {
            const int n = domain.grids[i].n_cells();
            map.p_base[i] = off;
            map.s_base[i] = off + n;
            off += 2 * n;
        }
        for (int j = 0; j < nm; ++j) {
            const int n = domain.mortars[j].n_cells();
            map.z0_base[j] = off;
            map.z1_base[j] = off + n;
            off += 2 * n;
        }
    } else {
        for (int i = 0; i < ns; ++i) {
            map.p_base[i] = off;
            off += domain.grids[i].n_cells();
        }
        for (int i = 0; i < ns; ++i) {
            map.s_base[i] = off;
            off += domain.grids[i].n_cells();
        }
        for (int j = 0; j < nm; ++j) {
            map.z0_base[j] = off;
            off += domain.mortars[j].n_cells();
        }
        for (int j = 0; j < nm; ++j) {
            map.z1_base[j] = off;
            off += domain.mortars[j].n_cells();
        }
    }
    map.size = off;
    return map;
}

Discretization::Discretization(const MixedDimDomain& domain, Scheme scheme,
                               BlockOrdering ordering)
    : domain_(&domain), scheme_(scheme), unknowns_(UnknownMap::build(domain, ordering)) {
    trans_.resize(domain.subdomains.size());
    for (std::size_t i = 0; i < domain.subdomains.size(); ++i)
        if (domain.subdomains[i].dim > 0) trans_[i] = tpfa_transmissibilities(domain.grids[i]);

    const int per_face = choices_per_face(scheme);
    int off = 0;
    choices_.subdomain_base.resize(domain.subdomains.size());
    for (std::size_t i = 0; i < domain.subdomains.size(); ++i) {
        choices_.subdomain_base[i] = off;
        for (const Face& f : domain.grids[i].faces)
            if (f.right >= 0) off += per_face;
    }
    choices_.mortar_base.resize(domain.mortars.size());
    for (std::size_t j = 0; j < domain.mortars.size(); ++j) {
        choices_.mortar_base[j] = off;
        off += 2 * domain.mortars[j].n_cells();
    }
    choices_.size = off;
}

double Discretization::total_mass(const FluidPair& fluid, const State& state, int phase) const {
    double mass = 0.0;
    for (std::size_t i = 0; i < domain_->subdomains.size(); ++i) {
        const auto& sd = domain_->subdomains[i];
        const auto& g = domain_->grids[i];
        const double ext = sd.codim_extension();
        for (int c = 0; c < g.n_cells(); ++c) {
            const double p = state.at(unknowns_.p(i, c));
            const double s0 = state.at(unknowns_.s(i, c));
            const double rho = density(fluid.phase(phase), p);
            const double sat = phase == 0 ? s0 : 1.0 - s0;
            mass += ext * g.cell_measure[c] * g.porosity[c] * rho * sat;
        }
    }
    return mass;
}

AssemblyResult Discretization::assemble_residual(const FluidPair& fluid, double gravity,
                                                 const State& current, const State& previous,
                                                 double dt, const Sources* sources) const {
    const MixedDimDomain& dom = *domain_;
    const int n = unknowns_.size;
    std::vector<Dual> res(n, Dual(0.0));
    AssemblyResult out;
    out.choices.assign(choices_.size, 0);

    const double inv_dt = 1.0 / dt;

    // per-subdomain AD fields, reused by the mortar loop; sc = clamped to [0,1]
    std::vector<std::vector<Dual>> p_all(dom.subdomains.size()), s_all(dom.subdomains.size()),
        sc_all(dom.subdomains.size());
    std::vector<std::array<std::vector<Dual>, 2>> rho_all(dom.subdomains.size()),
        lam_all(dom.subdomains.size());

    for (std::size_t i = 0; i < dom.subdomains.size(); ++i) {
        const auto& g = dom.grids[i];
        const int nc = g.n_cells();
        auto& p = p_all[i];
        auto& s = s_all[i];
        auto& sc = sc_all[i];
        p.reserve(nc);
        s.reserve(nc);
        sc.reserve(nc);
        for (int c = 0; c < nc; ++c) {
            p.push_back(Dual::leaf(current.at(unknowns_.p(i, c)), unknowns_.p(i, c)));
            s.push_back(Dual::leaf(current.at(unknowns_.s(i, c)), unknowns_.s(i, c)));
            sc.push_back(clamped_saturation(s.back()));
        }
        for (int l = 0; l < 2; ++l) {
            auto& rho = rho_all[i][l];
            auto& lam = lam_all[i][l];
            rho.reserve(nc);
            lam.reserve(nc);
            const Phase& ph = fluid.phase(l);
            for (int c = 0; c < nc; ++c) {
                rho.push_back(density(ph, p[c]));
                lam.push_back(mobility(l == 0 ? sc[c] : 1.0 - sc[c], ph.viscosity));
            }
        }
    }

    for (std::size_t i = 0; i < dom.subdomains.size(); ++i) {
        const auto& sd = dom.subdomains[i];
        const auto& g = dom.grids[i];
        const double ext = sd.codim_extension();
        const auto& p = p_all[i];
        const auto& s = s_all[i];

        // accumulation (implicit Euler) and sources
        for (int c = 0; c < g.n_cells(); ++c) {
            const auto [u0, u1] = accumulation(g.porosity[c], rho_all[i][0][c],
                                               rho_all[i][1][c], s[c]);
            const double p_prev = previous.at(unknowns_.p(i, c));
            const double s_prev = previous.at(unknowns_.s(i, c));
            const auto [u0p, u1p] =
                accumulation(g.porosity[c], density(fluid.phase(0), p_prev),
                             density(fluid.phase(1), p_prev), s_prev);
            const double w = ext * g.cell_measure[c] * inv_dt;
            res[unknowns_.p(i, c)] += w * ((u0 - u0p) + (u1 - u1p));
            res[unknowns_.s(i, c)] += w * (u0 - u0p);
            if (sources && !sources->per_subdomain.empty()) {
                const auto& f = sources->per_subdomain[i];
                res[unknowns_.p(i, c)] -= g.cell_measure[c] * (f[0] + f[1]);
                res[unknowns_.s(i, c)] -= g.cell_measure[c] * f[0];
            }
        }

        // interior face fluxes
        int face_choice = choices_.subdomain_base[i];
        const int per_face = choices_per_face(scheme_);
        for (int f = 0; f < g.n_faces(); ++f) {
            const Face& face = g.faces[f];
            if (face.right < 0) continue;
            const int m = face.left, nn = face.right;
            FaceState st{p[m], p[nn], sc_all[i][m], sc_all[i][nn]};
            const double T = trans_[i][f];
            const double dz = g.cell_elevation[m] - g.cell_elevation[nn];
            Dual q_total, q_mass;
            if (scheme_ == Scheme::ppu) {
                const PpuFaceFlux ff = ppu_face_flux(fluid, gravity, T, dz, st);
                q_total = ff.total_mass;
                q_mass = ff.phase_mass[0];
                out.choices[face_choice] = ff.side[0];
                out.choices[face_choice + 1] = ff.side[1];
            } else {
                const HuFaceFlux ff = hu_face_flux(fluid, gravity, T, dz, st);
                q_total = ff.total_mass;
                q_mass = ff.viscous + ff.gravity;
                out.choices[face_choice] = ff.side_qt;
                out.choices[face_choice + 1] = ff.side_omega[0];
                out.choices[face_choice + 2] = ff.side_omega[1];
            }
            face_choice += per_face;
            res[unknowns_.p(i, m)] += ext * q_total;
            res[unknowns_.p(i, nn)] -= ext * q_total;
            res[unknowns_.s(i, m)] += ext * q_mass;
            res[unknowns_.s(i, nn)] -= ext * q_mass;
        }
    }

    // mortar constitutive laws and interface exchange
    for (std::size_t j = 0; j < dom.mortars.size(); ++j) {
        const MortarInterface& mt = dom.mortars[j];
        const int hs = mt.higher_side, ls = mt.lower_side;
        const auto& hg = dom.grids[hs];
        const int np = mt.n_cells();

        // values behind the higher-side boundary faces, in mortar-local order
        std::vector<Dual> p_high(mt.higher_faces.size());
        std::vector<int> adj(mt.higher_faces.size());
        for (std::size_t k = 0; k < mt.higher_faces.size(); ++k) {
            adj[k] = hg.faces[mt.higher_faces[k]].left;
            p_high[k] = p_all[hs][adj[k]];
        }
        std::vector<Dual> p_low(mt.lower_cells.size());
        for (std::size_t k = 0; k < mt.lower_cells.size(); ++k)
            p_low[k] = p_all[ls][mt.lower_cells[k]];

        for (int l = 0; l < 2; ++l) {
            std::vector<Dual> rho_high(mt.higher_faces.size()), lam_high(mt.higher_faces.size());
            for (std::size_t k = 0; k < mt.higher_faces.size(); ++k) {
                rho_high[k] = rho_all[hs][l][adj[k]];
                lam_high[k] = lam_all[hs][l][adj[k]];
            }
            std::vector<Dual> rho_low(mt.lower_cells.size()), lam_low(mt.lower_cells.size());
            for (std::size_t k = 0; k < mt.lower_cells.size(); ++k) {
                rho_low[k] = rho_all[ls][l][mt.lower_cells[k]];
                lam_low[k] = lam_all[ls][l][mt.lower_cells[k]];
            }

            std::vector<Dual> zeta(np);
            std::vector<double> zeta_cur(np);
            for (int c = 0; c < np; ++c) {
                const int idx = unknowns_.zeta(j, l, c);
                zeta[c] = Dual::leaf(current.at(idx), idx);
                zeta_cur[c] = current.at(idx);
                out.choices[choices_.mortar_base[j] + 2 * c + l] =
                    upwind_side(zeta_cur[c]);
            }

            for (int c = 0; c < np; ++c) {
                const Dual rho_up = interface_upwind(mt, c, zeta_cur[c], rho_high, rho_low);
                res[unknowns_.zeta(j, l, c)] =
                    mortar_claw_residual(mt, c, zeta[c], gravity, p_high, p_low, rho_up);
            }

            const std::vector<Dual> flux =
                mortar_mass_flux(mt, zeta_cur, zeta, rho_high, rho_low, lam_high, lam_low);

            // higher side loses through its boundary faces, lower side gains
            const std::vector<Dual> to_faces = distribute_to_higher_faces(mt, flux);
            for (std::size_t k = 0; k < mt.higher_faces.size(); ++k) {
                res[unknowns_.p(hs, adj[k])] += to_faces[k];
                if (l == 0) res[unknowns_.s(hs, adj[k])] += to_faces[k];
            }
            const std::vector<Dual> to_cells = distribute_to_lower_cells(mt, flux);
            for (std::size_t k = 0; k < mt.lower_cells.size(); ++k) {
                res[unknowns_.p(ls, mt.lower_cells[k])] -= to_cells[k];
                if (l == 0) res[unknowns_.s(ls, mt.lower_cells[k])] -= to_cells[k];
            }
        }
    }

    // pack into dense residual + sparse Jacobian
    out.residual.resize(n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 8);
    for (int r = 0; r < n; ++r) {
        const double v = res[r].value();
        if (!std::isfinite(v)) {
            // locate the offending entity for the error message
            for (std::size_t i = 0; i < dom.subdomains.size(); ++i) {
                const int nc = dom.grids[i].n_cells();
                if (r >= unknowns_.p_base[i] && r < unknowns_.p_base[i] + nc)
                    throw AssemblyError("non-finite pressure residual at subdomain " +
                                        std::to_string(i) + " cell " +
                                        std::to_string(r - unknowns_.p_base[i]));
                if (r >= unknowns_.s_base[i] && r < unknowns_.s_base[i] + nc)
                    throw AssemblyError("non-finite mass-balance residual at subdomain " +
                                        std::to_string(i) + " cell " +
                                        std::to_string(r - unknowns_.s_base[i]));
            }
            throw AssemblyError("non-finite mortar residual at row " + std::to_string(r));
        }
        out.residual[r] = v;
        for (const auto& [c, w] : res[r].gradient()) trips.emplace_back(r, c, w);
    }
    out.jacobian.resize(n, n);
    out.jacobian.setFromTriplets(trips.begin(), trips.end());
    return out;
}

} // namespace mdflow
