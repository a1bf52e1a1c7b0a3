#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "spinbath.hpp"

using namespace spinbath;
using Catch::Approx;

namespace {

DotGeometry small_dot(std::size_t cells, std::uint64_t seed = 1) {
    DotGeometry g;
    g.l_perp_nm = 6.0;
    g.l_z_nm = 2.0;
    g.n_cells = cells;
    g.rng_seed = seed;
    return g;
}

}  // namespace

TEST_CASE("physical constants are fixed") {
    const PhysicalConstants c;
    CHECK(c.hbar == 0.6582119569);
    CHECK(c.bohr_magneton == 57.8838180);
}

TEST_CASE("zeeman splitting") {
    const PhysicalConstants c;
    const auto m = gaas();
    CHECK(zeeman_splitting(c, m, 1.0) == Approx(25.47).margin(0.005));
    CHECK(zeeman_splitting(c, m, 0.0) == 0.0);
    CHECK(zeeman_splitting(c, m, 2.0) == Approx(50.94).margin(0.01));
    CHECK(zeeman_splitting(c, m, 2.0) == Approx(2.0 * zeeman_splitting(c, m, 1.0)).epsilon(1e-15));
    CHECK(zeeman_splitting(c, m, -1.0) == zeeman_splitting(c, m, 1.0));
    // g < 0, so the signed coefficient is positive for B > 0.
    CHECK(zeeman_energy(c, m, 1.0) == Approx(zeeman_splitting(c, m, 1.0)));
    CHECK(zeeman_energy(c, m, -1.0) == Approx(-zeeman_splitting(c, m, 1.0)));
}

TEST_CASE("GaAs material table") {
    const auto m = gaas();
    REQUIRE_NOTHROW(m.validate());
    CHECK(m.unit_cell_coupling() == Approx(82.98).margin(0.1));
    CHECK(m.unit_cell_coupling() == Approx(83.0).margin(0.1));
    CHECK(m.g_factor == -0.44);
    CHECK(m.sublattices().size() == 2);

    auto bad = m;
    bad.isotopes[0].abundance = 0.7;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = m;
    bad.isotopes[2].a0_uev = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("uniform couplings") {
    const auto s = uniform_couplings(83.0, 50);
    REQUIRE(s.size() == 50);
    for (double a : s.a_uev) CHECK(a == Approx(1.66));
    CHECK(s.a_total_uev == 83.0);
    const auto one = uniform_couplings(83.0, 1);
    REQUIRE(one.size() == 1);
    CHECK(one.a_uev[0] == 83.0);
    CHECK_THROWS_AS(uniform_couplings(83.0, 0), std::invalid_argument);
}

TEST_CASE("geometry validation") {
    DotGeometry g;
    CHECK_NOTHROW(g.validate());
    g.l_z_nm = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = DotGeometry{};
    g.n_cells = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("single cell forces unit weight") {
    const auto m = gaas();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = generate_couplings(m, small_dot(1, seed));
        REQUIRE(s.size() == 2);
        const double sum = s.a_total_uev;
        const bool ok = std::abs(sum - (36.0 + 43.0)) < 1e-12 || std::abs(sum - (46.0 + 43.0)) < 1e-12;
        CHECK(ok);
    }
}

TEST_CASE("coupling set invariants") {
    const auto m = gaas();
    const auto s = generate_couplings(m, small_dot(20000, 7));
    REQUIRE(s.size() == 2 * 20000);
    REQUIRE(s.cell_positions.size() == 20000);

    detail::NeumaierSum total;
    for (double a : s.a_uev) {
        CHECK(a > 0.0);
        total.add(a);
    }
    CHECK(s.a_total_uev == Approx(total.value()).epsilon(1e-14));

    // Discrete normalization per sublattice.
    std::map<std::string, detail::NeumaierSum> per_sub;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto& iso = m.isotopes[s.isotope[k]];
        per_sub[iso.sublattice].add(s.a_uev[k] / iso.a0_uev);
    }
    for (auto& [sub, sum] : per_sub) CHECK(std::abs(sum.value() - 1.0) < 1e-12);

    CHECK(s.a_total_uev == Approx(m.unit_cell_coupling()).margin(0.5));
}

TEST_CASE("couplings decay away from the dot centre along each axis") {
    const auto m = gaas();
    const auto s = generate_couplings(m, small_dot(30000, 3));
    // As nuclei carry a fixed A0, so their couplings expose the envelope directly.
    for (int axis = 0; axis < 3; ++axis) {
        std::map<double, double> along;
        for (std::size_t cell = 0; cell < s.cell_positions.size(); ++cell) {
            const auto& p = s.cell_positions[cell];
            bool on_axis = true;
            for (int other = 0; other < 3; ++other)
                if (other != axis && std::abs(p[other]) > 1e-12) on_axis = false;
            if (!on_axis || p[axis] < 0.0) continue;
            for (std::size_t j = 0; j < s.nuclei_per_cell; ++j) {
                const std::size_t k = cell * s.nuclei_per_cell + j;
                if (m.isotopes[s.isotope[k]].name == "As75") along[p[axis]] = s.a_uev[k];
            }
        }
        REQUIRE(along.size() >= 3);
        double prev = INFINITY;
        for (const auto& [x, a] : along) {
            CHECK(a < prev);
            prev = a;
        }
    }
}

TEST_CASE("coupling generation is deterministic and seed-dependent only in isotopes") {
    const auto m = gaas();
    const auto a = generate_couplings(m, small_dot(12000, 11));
    const auto b = generate_couplings(m, small_dot(12000, 11));
    CHECK(a.a_uev == b.a_uev);
    CHECK(a.isotope == b.isotope);
    CHECK(a.cell_positions == b.cell_positions);

    const auto c = generate_couplings(m, small_dot(12000, 12));
    CHECK(a.cell_positions == c.cell_positions);
    CHECK(a.isotope != c.isotope);
    CHECK(std::abs(a.a_total_uev - c.a_total_uev) < 0.5);
}

TEST_CASE("isotope draws follow the abundances") {
    const auto m = gaas();
    const auto s = generate_couplings(m, small_dot(40000, 5));
    std::size_t ga69 = 0;
    std::size_t ga = 0;
    for (auto i : s.isotope) {
        if (m.isotopes[i].sublattice == "Ga") ++ga;
        if (m.isotopes[i].name == "Ga69") ++ga69;
    }
    REQUIRE(ga == 40000);
    // Binomial standard error is about 0.0025.
    CHECK(static_cast<double>(ga69) / static_cast<double>(ga) == Approx(0.604).margin(0.0125));
}

TEST_CASE("too many cells for the grid is rejected") {
    auto g = small_dot(1);
    g.grid_extent = 0.5;
    g.n_cells = 10'000'000;
    CHECK_THROWS_AS(generate_couplings(gaas(), g), std::invalid_argument);
}
