#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mdflow/cases.hpp"
#include "mdflow/errors.hpp"
#include "mdflow/topology.hpp"
#include "toy_interface.hpp"

using namespace mdflow;
using mdflow::testing::make_toy;

namespace {

// independent interval-intersection oracle
double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

} // namespace

TEST_CASE("conforming 1-to-1 interface gives identity maps") {
    testing::ToyInterface t = make_toy({0, 0.5, 1.0}, {0, 0.5, 1.0}, {0, 0.5, 1.0});
    build_projections(t.mortar, t.high, t.low);
    for (const SparseMap* m :
         {&t.mortar.high_avg, &t.mortar.high_sum, &t.mortar.low_avg, &t.mortar.low_sum}) {
        REQUIRE(m->n_rows() == 2);
        for (int p = 0; p < 2; ++p) {
            REQUIRE(m->rows[p].size() == 1);
            CHECK(m->rows[p][0].first == p);
            CHECK(m->rows[p][0].second == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("one mortar cell over two half faces: avg row (0.5, 0.5)") {
    // expected entries from the segment-intersection oracle
    const double e0 = overlap(0, 1, 0, 0.5) / 1.0;
    const double e1 = overlap(0, 1, 0.5, 1.0) / 1.0;
    testing::ToyInterface t = make_toy({0, 1.0}, {0, 0.5, 1.0}, {0, 1.0});
    build_projections(t.mortar, t.high, t.low);
    REQUIRE(t.mortar.high_avg.rows[0].size() == 2);
    CHECK(t.mortar.high_avg.rows[0][0].second == doctest::Approx(e0));
    CHECK(t.mortar.high_avg.rows[0][1].second == doctest::Approx(e1));
    CHECK(e0 == 0.5);
    CHECK(e1 == 0.5);
}

TEST_CASE("two mortar cells against one unit face: sum-map column (0.4, 0.6)") {
    const double e0 = overlap(0, 0.4, 0, 1) / 1.0;
    const double e1 = overlap(0.4, 1.0, 0, 1) / 1.0;
    testing::ToyInterface t = make_toy({0, 0.4, 1.0}, {0, 1.0}, {0, 1.0});
    build_projections(t.mortar, t.high, t.low);
    REQUIRE(t.mortar.high_sum.n_rows() == 2);
    CHECK(t.mortar.high_sum.rows[0][0].second == doctest::Approx(e0));
    CHECK(t.mortar.high_sum.rows[1][0].second == doctest::Approx(e1));
    CHECK(e0 == 0.4);
    CHECK(e1 == 0.6);
}

TEST_CASE("uncovered mortar cell is a topology error") {
    testing::ToyInterface t = make_toy({0, 1.0, 2.0}, {0, 1.0}, {0, 2.0});
    CHECK_THROWS_AS(build_projections(t.mortar, t.high, t.low), TopologyError);
}

TEST_CASE("avg rows sum to one and sum columns partition, random meshes") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        auto edges = [&](int n) {
            std::vector<double> e{0.0};
            for (int k = 0; k < n; ++k) e.push_back(e.back() + u(rng));
            const double L = e.back();
            for (double& v : e) v /= L;  // normalize to [0,1]
            return e;
        };
        testing::ToyInterface t = make_toy(edges(3 + rep % 4), edges(2 + rep % 5), edges(1 + rep % 6));
        build_projections(t.mortar, t.high, t.low);
        for (const SparseMap* m : {&t.mortar.high_avg, &t.mortar.low_avg}) {
            for (const auto& row : m->rows) {
                double s = 0.0;
                for (const auto& [c, w] : row) s += w;
                CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
        // columns of the sum maps add to 1 when the element is fully covered
        for (int side = 0; side < 2; ++side) {
            const SparseMap& m = side == 0 ? t.mortar.high_sum : t.mortar.low_sum;
            std::vector<double> colsum(m.cols, 0.0);
            for (const auto& row : m.rows)
                for (const auto& [c, w] : row) colsum[c] += w;
            for (double s : colsum) CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("avg there, sum-transpose back conserves the measure-weighted integral") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    auto edges = [&](int n) {
        std::vector<double> e{0.0};
        for (int k = 0; k < n; ++k) e.push_back(e.back() + u(rng));
        const double L = e.back();
        for (double& v : e) v /= L;
        return e;
    };
    for (int rep = 0; rep < 20; ++rep) {
        testing::ToyInterface t = make_toy(edges(4), edges(5), edges(3));
        build_projections(t.mortar, t.high, t.low);
        std::vector<double> x(t.mortar.higher_faces.size());
        for (double& v : x) v = u(rng);
        const auto y = t.mortar.high_avg.apply(x);
        const auto back = t.mortar.high_sum.apply_transpose(y);
        double ix = 0.0, iback = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            ix += t.high.faces[t.mortar.higher_faces[k]].area * x[k];
            iback += t.high.faces[t.mortar.higher_faces[k]].area * back[k];
        }
        CHECK(iback == doctest::Approx(ix).epsilon(1e-12));
        // and the mortar integral itself matches
        double iy = 0.0;
        for (std::size_t p = 0; p < y.size(); ++p) iy += t.mortar.cell_measure[p] * y[p];
        CHECK(iy == doctest::Approx(ix).epsilon(1e-12));
    }
}

TEST_CASE("validate: single 2D subdomain with no mortars is clean") {
    MixedDimDomain dom;
    dom.ambient_dim = 2;
    Subdomain sd;
    sd.id = 0;
    sd.dim = 2;
    sd.eps = 1.0;
    sd.codim = 0;
    dom.subdomains.push_back(sd);
    dom.grids.push_back(make_quad_grid(3, 3));
    dom.grids[0].set_uniform_rock(1.0, 0.25);
    CHECK(validate(dom).empty());
}

TEST_CASE("validate: codimension gap is flagged") {
    MixedDimDomain dom;
    dom.ambient_dim = 2;
    Subdomain matrix;
    matrix.id = 0;
    matrix.dim = 2;
    matrix.codim = 0;
    Subdomain point;
    point.id = 1;
    point.dim = 0;
    point.codim = 2;
    point.eps = 0.01;
    dom.subdomains = {matrix, point};
    dom.grids.push_back(make_quad_grid(2, 2));
    dom.grids[0].set_uniform_rock(1.0, 0.25);
    dom.grids.push_back(make_point_grid({0.5, 0.5, 0}));

    MortarInterface mt;
    mt.id = 0;
    mt.dim = 0;
    mt.b = 2;
    mt.higher_side = 0;
    mt.lower_side = 1;  // 2D directly to 0D: forbidden
    mt.normal_permeability = 1.0;
    mt.eps_low = 0.01;
    mt.cell_measure = {1.0};
    dom.subdomains[0].lower_mortars.push_back(0);
    dom.subdomains[1].higher_mortars.push_back(0);
    dom.mortars.push_back(mt);

    const auto v = validate(dom);
    bool found = false;
    for (const auto& msg : v) found = found || msg.find("codimension gap") != std::string::npos;
    CHECK(found);
}

TEST_CASE("validate: broken partition of unity is flagged") {
    testing::ToyInterface t = make_toy({0, 1.0}, {0, 0.5, 1.0}, {0, 1.0});
    build_projections(t.mortar, t.high, t.low);
    t.mortar.high_avg.rows[0][0].second = 0.4;  // rows now sum to 0.9

    MixedDimDomain dom;
    dom.ambient_dim = 2;
    Subdomain hi;
    hi.id = 0;
    hi.dim = 2;
    hi.codim = 0;
    Subdomain lo;
    lo.id = 1;
    lo.dim = 1;
    lo.codim = 1;
    lo.eps = 0.01;
    dom.subdomains = {hi, lo};
    dom.grids.push_back(t.high);
    dom.grids.push_back(t.low);
    t.mortar.higher_side = 0;
    t.mortar.lower_side = 1;
    dom.subdomains[0].lower_mortars.push_back(0);
    dom.subdomains[1].higher_mortars.push_back(0);
    dom.mortars.push_back(t.mortar);

    const auto v = validate(dom);
    bool found = false;
    for (const auto& msg : v)
        found = found || msg.find("partition of unity") != std::string::npos;
    CHECK(found);
}

TEST_CASE("builtin cases validate cleanly") {
    for (const auto& name : builtin_case_names()) {
        const CaseSetup setup = load_case(name);
        CHECK_MESSAGE(validate(setup.domain).empty(), name);
    }
}
