#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"

#include "cluvir/potential.hpp"

using namespace cluvir;

TEST_SUITE("potential") {

TEST_CASE("square well evaluates piecewise") {
    auto p = make_builtin(BuiltinKind::SquareWell,
                          {{"r_hc", 1.0}, {"b", 1.5}, {"depth", 1.0}});
    CHECK(std::isinf(p.evaluate(0.0)));
    CHECK(std::isinf(p.evaluate(0.5)));
    CHECK(p.evaluate(1.0) == -1.0);
    CHECK(p.evaluate(1.2) == -1.0);
    CHECK(p.evaluate(1.5) == 0.0);
    CHECK(p.evaluate(2.0) == 0.0);
    CHECK_THROWS_AS(p.evaluate(-0.1), std::invalid_argument);
}

TEST_CASE("square well rejects r_hc >= b") {
    CHECK_THROWS_AS(make_builtin(BuiltinKind::SquareWell,
                                 {{"r_hc", 1.0}, {"b", 0.5}}),
                    std::invalid_argument);
}

TEST_CASE("unknown parameters are rejected") {
    CHECK_THROWS_AS(make_builtin(BuiltinKind::SquareWell, {{"bogus", 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("mayer_f values and hard core convention") {
    auto p = make_builtin(BuiltinKind::SquareWell);
    CHECK(p.mayer_f(0.5, 1.0) == -1.0);
    CHECK(p.mayer_f(0.5, 17.0) == -1.0);
    CHECK(p.mayer_f(1.2, 2.0) ==
          doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-12));
    CHECK(p.mayer_f(2.0, 5.0) == 0.0);
    CHECK_THROWS_AS(p.mayer_f(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("mayer_f vanishes beyond the range for every beta") {
    auto p = make_builtin(BuiltinKind::TwoWell);
    for (double r = p.range(); r < p.range() + 5.0; r += 0.17) {
        for (double beta : {0.5, 1.0, 4.0, 16.0}) {
            CHECK(p.mayer_f(r, beta) == 0.0);
        }
    }
}

TEST_CASE("mayer_f is monotone decreasing in v at fixed beta") {
    auto p = make_builtin(BuiltinKind::TwoWell);
    for (double r1 = 0.95; r1 < 2.7; r1 += 0.08) {
        for (double r2 = 0.95; r2 < 2.7; r2 += 0.11) {
            double v1 = p.evaluate(r1), v2 = p.evaluate(r2);
            if (v1 < v2) CHECK(p.mayer_f(r1, 2.0) > p.mayer_f(r2, 2.0));
        }
    }
}

TEST_CASE("v_norm piecewise integrals in one dimension") {
    auto p = make_builtin(BuiltinKind::SquareWell);
    CHECK(p.v_norm() == doctest::Approx(3.0).epsilon(1e-14));

    PairPotential core_only(1.0, 1, {});
    CHECK(core_only.v_norm() == doctest::Approx(2.0).epsilon(1e-14));

    auto deeper = make_builtin(BuiltinKind::SquareWell,
                               {{"r_hc", 1.0}, {"b", 1.5}, {"depth", 2.0}});
    CHECK(deeper.v_norm() == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("v_norm is additive under piece refinement") {
    PairPotential coarse(1.0, 1,
                         {{1.0, 2.0, PieceShape::Constant, -0.7, -0.7}});
    PairPotential fine(1.0, 1,
                       {{1.0, 1.3, PieceShape::Constant, -0.7, -0.7},
                        {1.3, 2.0, PieceShape::Constant, -0.7, -0.7}});
    CHECK(coarse.v_norm() == doctest::Approx(fine.v_norm()).epsilon(1e-14));
}

TEST_CASE("v_norm splits a sign-changing ramp at its zero") {
    // v ramps from -1 to +1 on [1, 2): integral of |v| is 2 * (1/4 + 1/4)
    PairPotential p(1.0, 1, {{1.0, 2.0, PieceShape::Ramp, -1.0, 1.0}});
    CHECK(p.v_norm() == doctest::Approx(2.0 + 2.0 * 0.5).epsilon(1e-14));
}

TEST_CASE("v_norm in two dimensions uses the ring measure") {
    // constant -1 on [1, 2), d = 2: core pi plus ring area 3 pi
    PairPotential p(1.0, 2, {{1.0, 2.0, PieceShape::Constant, -1.0, -1.0}});
    CHECK(p.v_norm() ==
          doctest::Approx(4.0 * 3.14159265358979323846).epsilon(1e-12));
}

TEST_CASE("attractive tail and continuity flags") {
    auto sq = make_builtin(BuiltinKind::SquareWell);
    CHECK(sq.attractive_tail());
    CHECK_FALSE(sq.continuous_outside_core());  // jump at b

    auto ramp = make_builtin(BuiltinKind::RampWell);
    CHECK(ramp.attractive_tail());
    CHECK(ramp.continuous_outside_core());

    PairPotential repulsive(1.0, 1,
                            {{1.0, 1.5, PieceShape::Constant, 2.0, 2.0}});
    CHECK_FALSE(repulsive.attractive_tail());
}

TEST_CASE("potential report invariants") {
    for (auto kind : {BuiltinKind::SquareWell, BuiltinKind::RampWell,
                      BuiltinKind::TwoWell}) {
        auto p = make_builtin(kind);
        PotentialReport rep = analyze_potential(p, -1.0);
        CHECK(rep.v_norm >=
              ball_volume(p.dimension(), p.hard_core_radius()) - 1e-12);
        CHECK(rep.attractive_tail);
        CHECK(rep.v_norm > ball_volume(p.dimension(), p.hard_core_radius()));
        CHECK(rep.stability_constant_estimate == 1.0);
        bool negative_seen = false;
        for (double r = p.hard_core_radius(); r < p.range(); r += 1e-3)
            negative_seen = negative_seen || p.evaluate(r) < 0.0;
        CHECK(negative_seen);
    }
}

TEST_CASE("two_well fixture matches its documented pieces") {
    auto p = make_builtin(BuiltinKind::TwoWell);
    CHECK(p.hard_core_radius() == 0.9);
    CHECK(p.range() == 2.6);
    CHECK(p.evaluate(0.95) == 0.0);
    CHECK(p.evaluate(1.05) == -4.0);
    CHECK(p.evaluate(1.5) == 2.0);
    CHECK(p.evaluate(2.5) == -0.25);
    CHECK(p.v_norm() == doctest::Approx(7.9).epsilon(1e-14));
}

TEST_CASE("soft disk is continuous with attractive tail in d = 2") {
    auto p = make_builtin(BuiltinKind::SoftDisk);
    CHECK(p.dimension() == 2);
    CHECK(p.attractive_tail());
    CHECK(p.continuous_outside_core());
    CHECK(p.evaluate(1.0) == doctest::Approx(-1.0));
    CHECK(p.evaluate(1.0 + 1.0 / 24.0) == 0.0);
}

TEST_CASE("pieces must tile without gaps") {
    CHECK_THROWS_AS(
        PairPotential(1.0, 1,
                      {{1.0, 1.2, PieceShape::Constant, -1.0, -1.0},
                       {1.3, 1.5, PieceShape::Constant, -1.0, -1.0}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        PairPotential(1.0, 1, {{1.2, 1.5, PieceShape::Constant, -1.0, -1.0}}),
        std::invalid_argument);
}

}  // TEST_SUITE
