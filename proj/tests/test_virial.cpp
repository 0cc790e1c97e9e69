#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "cluvir/graphs.hpp"
#include "cluvir/mayer.hpp"
#include "cluvir/potential.hpp"
#include "cluvir/virial.hpp"

using namespace cluvir;

namespace {

// Independent count of integer partitions of n.
long partitions(int n) {
    std::vector<long> table(n + 1, 0);
    table[0] = 1;
    for (int part = 1; part <= n; ++part)
        for (int s = part; s <= n; ++s) table[s] += table[s - part];
    return table[n];
}

}  // namespace

TEST_SUITE("virial") {

TEST_CASE("composition vectors enumerate partitions of n - 1") {
    auto v2 = composition_vectors(2);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].m == std::vector<int>{1});

    auto v3 = composition_vectors(3);
    REQUIRE(v3.size() == 2);
    bool saw_20 = false, saw_01 = false;
    for (const auto& mv : v3) {
        saw_20 = saw_20 || mv.m == std::vector<int>{2, 0};
        saw_01 = saw_01 || mv.m == std::vector<int>{0, 1};
    }
    CHECK(saw_20);
    CHECK(saw_01);

    auto v4 = composition_vectors(4);
    REQUIRE(v4.size() == 3);

    for (int n = 2; n <= 12; ++n) {
        auto vectors = composition_vectors(n);
        CHECK(static_cast<long>(vectors.size()) == partitions(n - 1));
        for (const auto& mv : vectors) {
            int sum = 0;
            for (int j = 2; j <= n; ++j) sum += (j - 1) * mv.m_of(j);
            CHECK(sum == n - 1);
        }
    }
    CHECK_THROWS_AS(composition_vectors(1), std::invalid_argument);
}

TEST_CASE("a-coefficients are exact rationals") {
    CHECK(a_coefficient({3, {2, 0}}) == 2);
    CHECK(a_coefficient({4, {3, 0, 0}}) == Rational(20, 3));
    CHECK(a_coefficient({4, {1, 1, 0}}) == 6);
    for (int n = 2; n <= 12; ++n) {
        for (const auto& mv : composition_vectors(n)) {
            Rational a = a_coefficient(mv);
            CHECK(a > 0);
            if (mv.m_of(n) == 1 && mv.weight() == 1) CHECK(a == 1);
        }
    }
}

TEST_CASE("transform reproduces the low-order closed forms") {
    std::vector<double> b{0, 1.0, 0.37, -1.21, 0.64, 0.0, 0.0, 0.0, 0.0};
    CHECK(virial_from_mayer(b, 2) == doctest::Approx(b[2]).epsilon(1e-15));
    CHECK(virial_from_mayer(b, 3) ==
          doctest::Approx(b[3] - 2.0 * b[2] * b[2]).epsilon(1e-14));
    CHECK(virial_from_mayer(b, 4) ==
          doctest::Approx(b[4] - 6.0 * b[2] * b[3] +
                          (20.0 / 3.0) * b[2] * b[2] * b[2])
              .epsilon(1e-14));
}

TEST_CASE("first-order error propagation") {
    std::vector<double> b{0, 1.0, 0.8, 0.3, 0.0};
    std::vector<double> err{0, 0.0, 1e-3, 0.0, 0.0};
    // d_3 = b_3 - 2 b_2^2: |dd_3/db_2| = 4 |b_2|
    CHECK(virial_from_mayer_error(b, err, 3) ==
          doctest::Approx(4.0 * 0.8 * 1e-3).epsilon(1e-12));
}

TEST_CASE("series reversion closed forms") {
    SUBCASE("ideal gas") {
        std::vector<double> b{0, 1.0, 0.0, 0.0, 0.0};
        std::vector<double> c = invert_density_series(b);
        CHECK(c[1] == 1.0);
        CHECK(c[2] == 0.0);
        CHECK(c[3] == 0.0);
        CHECK(c[4] == 0.0);
    }
    SUBCASE("b_2 only, reversion to fourth order") {
        double B = 0.77;
        std::vector<double> b{0, 1.0, B, 0.0, 0.0};
        std::vector<double> c = invert_density_series(b);
        CHECK(c[2] == doctest::Approx(-B).epsilon(1e-14));
        CHECK(c[3] == doctest::Approx(4.0 * B * B).epsilon(1e-14));
        CHECK(c[4] == doctest::Approx(-20.0 * B * B * B).epsilon(1e-14));
    }
    SUBCASE("b_1 must be one") {
        std::vector<double> b{0, 0.9, 0.1};
        CHECK_THROWS_AS(invert_density_series(b), std::invalid_argument);
    }
}

TEST_CASE("transform and inversion are the same series: 100 random draws") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> b(9, 0.0);
        b[1] = 1.0;
        for (int k = 2; k <= 8; ++k) b[k] = uni(rng);
        std::vector<double> c = invert_density_series(b);
        for (int n = 2; n <= 8; ++n) {
            double lhs = c[n];
            double rhs = -(n - 1) * virial_from_mayer(b, n);
            double rel = std::abs(lhs - rhs) /
                         std::max({1.0, std::abs(lhs), std::abs(rhs)});
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("virial table construction and CSV round trip") {
    MayerTable mayer({1.0});
    mayer.set(2, 1.0, 0.5, 1e-4, "quadrature");
    mayer.set(3, 1.0, -0.2, 2e-4, "quadrature");
    mayer.set(4, 1.0, 0.1, 0.0, "quadrature");
    VirialTable table = build_virial_table(mayer, 4);
    CHECK(table.at(2, 1.0).d_n == doctest::Approx(0.5));
    CHECK(table.at(3, 1.0).d_n == doctest::Approx(-0.2 - 2 * 0.25));
    CHECK(table.at(2, 1.0).c_n == doctest::Approx(-0.5));
    CHECK(table.at(3, 1.0).propagated_error > 0.0);
    for (const auto& e : table.entries)
        CHECK(e.c_n == doctest::Approx(-(e.n - 1) * e.d_n).epsilon(1e-12));

    std::stringstream ss;
    write_virial_csv(ss, table, "test");
    VirialTable copy = read_virial_csv(ss);
    REQUIRE(copy.entries.size() == table.entries.size());
    for (std::size_t i = 0; i < copy.entries.size(); ++i) {
        CHECK(copy.entries[i].d_n == table.entries[i].d_n);
        CHECK(copy.entries[i].c_n == table.entries[i].c_n);
    }
    CHECK_THROWS_AS(build_virial_table(MayerTable{}, 3),
                    std::invalid_argument);
}

TEST_CASE("radius bounds") {
    GroundStateTable gs =
        table_from_energies({0, 0, -1, -2, -3, -4, -5, -6, -7});
    SUBCASE("square-well plug-in numbers") {
        std::vector<double> b{0, 1.0, 2.0, 1.0, 0.5};
        RadiusBounds rb = radius_bounds(b, gs, 1.0, 3.0);
        CHECK(rb.lower ==
              doctest::Approx(1.0 / (3.0 * std::exp(2.0))).epsilon(1e-12));
        // penrose at k = 2: 2 e^{-beta e_inf} / |b_2| = 2 e / 2 = e
        CHECK(rb.penrose_upper_per_k.front().second ==
              doctest::Approx(std::exp(1.0)).epsilon(1e-12));
        CHECK(rb.ratio_estimate == doctest::Approx(2.0));  // |b_3 / b_4|
    }
    SUBCASE("b_2-only table") {
        std::vector<double> b{0, 1.0, 0.5, 0.0, 0.0};
        RadiusBounds rb = radius_bounds(b, gs, 2.0, 3.0);
        CHECK(rb.penrose_upper_per_k.size() == 1);
        CHECK(rb.penrose_upper_per_k.front().second ==
              doctest::Approx(2.0 * std::exp(2.0) / 0.5).epsilon(1e-12));
    }
    SUBCASE("degenerate all-zero coefficients") {
        std::vector<double> b{0, 1.0, 0.0, 0.0};
        CHECK_THROWS_AS(radius_bounds(b, gs, 1.0, 3.0),
                        std::invalid_argument);
    }
}

TEST_CASE("remainder bound plug-ins and disk guard") {
    CHECK(remainder_bound(-1.0, 3.0, 1.0, 0.02) ==
          doctest::Approx((std::exp(1.0) - 1.0) * std::exp(1.0))
              .epsilon(1e-12));
    CHECK(remainder_bound(0.0, 2.0, 2.0, 0.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK_THROWS_AS(remainder_bound(-1.0, 3.0, 1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(remainder_bound(-1.0, 3.0, 1.0, -0.1), std::domain_error);
}

TEST_CASE("d rho / d z root") {
    SUBCASE("pure quadratic") {
        std::vector<double> b{0, 1.0, 1.0, 0.0, 0.0};
        RhoZeroRoot root = find_drho_dz_root(b, 1.0);
        CHECK(root.z0 == doctest::Approx(-0.25).epsilon(1e-12));
        CHECK(root.deviation <= 1e-10);
        CHECK(root.rho_at_z0 == doctest::Approx(-0.125).epsilon(1e-9));
    }
    SUBCASE("b_2 <= 0 is rejected") {
        std::vector<double> b{0, 1.0, -0.5, 0.0};
        CHECK_THROWS_AS(find_drho_dz_root(b, 1.0), std::invalid_argument);
    }
    SUBCASE("bracket stability under small perturbations") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> eps(-0.01, 0.01);
        std::vector<double> base{0, 1.0, 2.0, 0.05, -0.03, 0.01};
        RhoZeroRoot ref = find_drho_dz_root(base, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> b = base;
            for (int k = 2; k <= 5; ++k) b[k] *= 1.0 + eps(rng);
            RhoZeroRoot perturbed = find_drho_dz_root(b, 1.0);
            CHECK(std::abs(perturbed.z0 - ref.z0) <= 0.05 * std::abs(ref.z0));
        }
    }
}

TEST_CASE("biconnected-graph route reproduces d_3 on the square well") {
    // dual route for n = 3: the doubly-connected sum is the bare triangle,
    //   d_3 = integral over gaps of f(g1) f(g2) f(g1+g2)
    //       = -1/2 + 3/8 F - 1/4 F^2,  F = e^beta - 1,
    // which must equal b_3 - 2 b_2^2 from the composition-vector transform.
    auto sq = make_builtin(BuiltinKind::SquareWell);
    REQUIRE(biconnected_graphs(3).size() == 1);
    for (double beta : {1.0, 2.0, 4.0}) {
        double F = std::expm1(beta);
        double triangle = -0.5 + 0.375 * F - 0.25 * F * F;
        std::vector<double> b(4, 0.0);
        b[1] = 1.0;
        b[2] = b_k_quadrature(sq, 2, beta).value;
        b[3] = b_k_quadrature(sq, 3, beta).value;
        CHECK(virial_from_mayer(b, 3) ==
              doctest::Approx(triangle).epsilon(1e-10));
    }
}

TEST_CASE("sign pattern: gluing regime on the square-well fixture") {
    auto sq = make_builtin(BuiltinKind::SquareWell);
    GroundStateTable gs =
        table_from_energies({0, 0, -1, -2, -3, -4, -5, -6, -7});
    MayerTable mayer;
    for (double beta : {8.0, 10.0}) {
        for (int k = 2; k <= 4; ++k) {
            Estimate est = b_k_quadrature(sq, k, beta);
            mayer.set(k, beta, est.value, est.error, "quadrature");
        }
    }
    VirialTable table = build_virial_table(mayer, 4);
    SignPatternReport rep = sign_pattern(table, gs, &mayer);
    CHECK(rep.regime == SignRegime::Gluing);
    for (const auto& pk : rep.per_k) {
        CHECK(pk.target == -gs.energy(pk.k));
        CHECK(pk.slope_ok);  // limsup form
    }
    CHECK(rep.eksin_ok);
    CHECK_FALSE(rep.eksin_strict);  // affine table: equality everywhere
}

TEST_CASE("sign pattern: diatomic regime on the two-well fixture") {
    auto tw = make_builtin(BuiltinKind::TwoWell);
    GroundStateTable gs = table_from_energies(
        {0.0, 0.0, -4.0, -6.0, -8.25, -10.25, -12.5, -14.5, -16.75});
    MayerTable mayer;
    for (double beta : {8.0, 10.0}) {
        for (int k = 2; k <= 4; ++k) {
            Estimate est = b_k_quadrature(tw, k, beta);
            mayer.set(k, beta, est.value, est.error, "quadrature");
        }
    }
    VirialTable table = build_virial_table(mayer, 4);
    SignPatternReport rep = sign_pattern(table, gs, &mayer);
    CHECK(rep.regime == SignRegime::Diatomic);
    for (const auto& pk : rep.per_k) {
        CHECK(pk.sign_top == (pk.k % 2 == 0 ? 1 : -1));
        CHECK(pk.sign_ok);
        CHECK(pk.target == doctest::Approx(4.0 * (pk.k - 1)));
        CHECK(pk.slope_ok);
    }
    CHECK(rep.vircon_lemma_ok);
}

TEST_CASE("sign pattern rejects an undeterminable regime") {
    // gluing fails (E_3 < 2 E_2 fails) and the minimizer of E_k/(k-1)
    // sits at k = 3, not 2
    GroundStateTable gs = table_from_energies(
        {0.0, 0.0, -4.0, -9.0, -9.5, -10.0, -10.5, -11.0, -11.5});
    MayerTable mayer;
    mayer.set(2, 1.0, 1.0, 0.0, "analytic");
    mayer.set(2, 2.0, 2.0, 0.0, "analytic");
    VirialTable table = build_virial_table(mayer, 2);
    CHECK_THROWS_AS(sign_pattern(table, gs, nullptr), std::runtime_error);
}

}  // TEST_SUITE
