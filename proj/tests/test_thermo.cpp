#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "cluvir/mayer.hpp"
#include "cluvir/potential.hpp"
#include "cluvir/thermo.hpp"

using namespace cluvir;

namespace {

GroundStateTable square_table() {
    return table_from_energies({0, 0, -1, -2, -3, -4, -5, -6, -7});
}

GroundStateTable two_well_table() {
    return table_from_energies(
        {0.0, 0.0, -4.0, -6.0, -8.25, -10.25, -12.5, -14.5, -16.75});
}

}  // namespace

TEST_SUITE("thermo") {

TEST_CASE("nu_of_mu substitution examples") {
    GroundStateTable gs = square_table();
    VariationalValue v = nu_of_mu(gs, -2.0);
    CHECK(v.value == doctest::Approx(2.0));
    REQUIRE(v.minimizers.size() == 1);
    CHECK(v.minimizers[0] == 1);

    // at mu = e_inf every k ties: E_k + k = 1
    VariationalValue tie = nu_of_mu(gs, -1.0);
    CHECK(tie.value == doctest::Approx(1.0));
    CHECK(tie.minimizers.size() == 8);

    GroundStateTable tw = two_well_table();
    double mu_mid = 0.5 * (tw.thresholds.mu_one + tw.thresholds.e_inf_fit);
    VariationalValue diatomic = nu_of_mu(tw, mu_mid);
    REQUIRE(diatomic.minimizers.size() == 1);
    CHECK(diatomic.minimizers[0] == 2);
}

TEST_CASE("mu_of_nu substitution examples and the plateau") {
    GroundStateTable gs = square_table();
    VariationalValue v = mu_of_nu(gs, 2.0);
    CHECK(v.value == doctest::Approx(-2.0));
    REQUIRE(v.minimizers.size() == 1);
    CHECK(v.minimizers[0] == 1);
    CHECK_FALSE(v.no_finite_minimizer);

    // nu below nu_star: (E_k - nu)/k = -1 + (1 - nu)/k keeps decreasing
    VariationalValue plateau = mu_of_nu(gs, 0.5);
    CHECK(plateau.no_finite_minimizer);
    CHECK(plateau.value == doctest::Approx(-1.0).epsilon(1e-14));

    // reciprocity spot check
    CHECK(nu_of_mu(gs, -2.0).value == doctest::Approx(2.0));
    CHECK(mu_of_nu(gs, 2.0).value == doctest::Approx(-2.0));
}

TEST_CASE("appendix A grid suite at 1e-12 on both fixtures") {
    for (GroundStateTable gs : {square_table(), two_well_table()}) {
        const auto& th = gs.thresholds;
        const int N = 200;

        SUBCASE("nu(mu): strictly decreasing and concave") {
            double lo = th.mu_one - 3.0, hi = th.e_inf_fit;
            std::vector<double> values;
            for (int i = 0; i <= N; ++i) {
                double mu = lo + (hi - lo) * i / N;
                values.push_back(nu_of_mu(gs, mu).value);
            }
            for (int i = 1; i <= N; ++i) CHECK(values[i] < values[i - 1]);
            for (int i = 1; i < N; ++i) {
                double second =
                    values[i + 1] - 2.0 * values[i] + values[i - 1];
                CHECK(second <= 1e-12);
            }
        }
        SUBCASE("mu(nu): plateau at e_inf then strictly decreasing") {
            double hi = 2.0 * th.nu_one;
            std::vector<double> values;
            std::vector<double> xs;
            for (int i = 0; i <= N; ++i) {
                double nu = hi * i / N;
                xs.push_back(nu);
                values.push_back(mu_of_nu(gs, nu).value);
            }
            for (int i = 0; i <= N; ++i) {
                if (xs[i] <= th.nu_star - 1e-9)
                    CHECK(std::abs(values[i] - th.e_inf_fit) <= 1e-12);
                CHECK(values[i] <= th.e_inf_fit + 1e-12);
            }
            for (int i = 1; i <= N; ++i) {
                if (xs[i - 1] >= th.nu_star - 1e-12)
                    CHECK(values[i] < values[i - 1] + 1e-15);
            }
        }
        SUBCASE("reciprocity: mu(nu(mu)) = mu whenever nu(mu) >= nu_star") {
            for (int i = 0; i <= N; ++i) {
                double mu = th.mu_one - 3.0 +
                            (th.e_inf_fit - th.mu_one + 3.0) * i / N;
                double nu = nu_of_mu(gs, mu).value;
                if (nu >= th.nu_star - 1e-12) {
                    VariationalValue back = mu_of_nu(gs, nu);
                    CHECK(std::abs(back.value - mu) <= 1e-12);
                }
            }
        }
        SUBCASE("threshold trichotomy re-asserted end to end") {
            if (th.polyatomic) {
                CHECK(th.mu_one < th.e_inf_fit - 1e-12);
                CHECK(th.nu_star < -th.e_inf_fit - 1e-12);
                CHECK(-th.e_inf_fit < th.nu_one - 1e-12);
            } else {
                CHECK(std::abs(th.mu_one - th.e_inf_fit) <= 1e-12);
                CHECK(std::abs(th.nu_star + th.e_inf_fit) <= 1e-12);
                CHECK(std::abs(th.nu_one + th.e_inf_fit) <= 1e-12);
            }
        }
    }
}

TEST_CASE("region classification") {
    GroundStateTable sq = square_table();
    CHECK(classify_mu(sq, -2.0) == Region::Monatomic);
    CHECK(classify_mu(sq, -1.0) == Region::Boundary);
    CHECK(classify_mu(sq, -0.5) == Region::CondensedSide);
    CHECK(classify_nu(sq, 0.5) == Region::NoFiniteMinimizer);
    CHECK(classify_nu(sq, 2.0) == Region::Monatomic);

    GroundStateTable tw = two_well_table();
    double mu_mid = 0.5 * (tw.thresholds.mu_one + tw.thresholds.e_inf_fit);
    CHECK(classify_mu(tw, -5.0) == Region::Monatomic);
    CHECK(classify_mu(tw, mu_mid) == Region::Polyatomic);
    CHECK(classify_mu(tw, tw.thresholds.mu_one) == Region::Boundary);
    CHECK(classify_nu(tw, 0.5 * tw.thresholds.nu_star) ==
          Region::NoFiniteMinimizer);
    CHECK(classify_nu(tw, 0.5 * (tw.thresholds.nu_star +
                                 tw.thresholds.nu_one)) ==
          Region::Polyatomic);
    CHECK(classify_nu(tw, tw.thresholds.nu_one + 1.0) == Region::Monatomic);
}

TEST_CASE("equation of state from a truncated series") {
    GroundStateTable gs = square_table();
    SUBCASE("b_2-only table at small z") {
        MayerTable mayer;
        mayer.set(2, 1.0, 0.3, 0.0, "analytic");
        EosResult eos = eos_from_series(mayer, 1.0, -5.0, 2, gs, 3.0, false);
        double z = std::exp(-5.0);
        CHECK(eos.z == doctest::Approx(z));
        CHECK(eos.rho == doctest::Approx(z + 2 * 0.3 * z * z).epsilon(1e-14));
        CHECK(eos.pressure ==
              doctest::Approx(z + 0.3 * z * z).epsilon(1e-14));
    }
    SUBCASE("ideal gas: beta p = z, rho = z") {
        GroundStateTable zero = table_from_energies({0, 0, 0, 0, 0, 0});
        MayerTable ideal;
        for (int k = 2; k <= 4; ++k) ideal.set(k, 2.0, 0.0, 0.0, "analytic");
        EosResult eos = eos_from_series(ideal, 2.0, -2.0, 4, zero, 2.0, true);
        double z = std::exp(-4.0);
        CHECK(eos.rho == doctest::Approx(z).epsilon(1e-14));
        CHECK(eos.pressure == doctest::Approx(z).epsilon(1e-14));
        CHECK(eos.certified);
    }
    SUBCASE("certified remainder on the square-well fixture") {
        // mu = e_inf - 0.5 at beta = 8 sits just outside the certified
        // disk (z/R = 1.2); deeper in the gas phase, mu = -2 at beta = 10,
        // the tail bound is a few 1e-6 of the leading term
        auto sq_pot = make_builtin(BuiltinKind::SquareWell);
        MayerTable mayer;
        double beta = 10.0;
        for (int k = 2; k <= 4; ++k) {
            Estimate est = b_k_quadrature(sq_pot, k, beta);
            mayer.set(k, beta, est.value, est.error, "quadrature");
        }
        EosResult eos = eos_from_series(mayer, beta, -2.0, 4, gs, 3.0, true);
        CHECK(eos.certified);
        CHECK(eos.rho > 0.0);
        CHECK(eos.rho_remainder < 0.1 * eos.rho);
        // leading term dominates: beta^{-1} log rho near mu
        CHECK(std::log(eos.rho) / beta == doctest::Approx(-2.0).epsilon(0.01));
        SUBCASE("mu = e_inf - 0.5 at beta = 8 is outside the disk") {
            for (int k = 2; k <= 4; ++k) {
                Estimate est = b_k_quadrature(sq_pot, k, 8.0);
                mayer.set(k, 8.0, est.value, est.error, "quadrature");
            }
            CHECK_THROWS_AS(eos_from_series(mayer, 8.0, -1.5, 4, gs, 3.0,
                                            true),
                            std::domain_error);
            EosResult loose =
                eos_from_series(mayer, 8.0, -1.5, 4, gs, 3.0, false);
            CHECK_FALSE(loose.certified);
            CHECK(std::isnan(loose.rho_remainder));
        }
    }
    SUBCASE("certification demand outside the disk throws") {
        MayerTable mayer;
        mayer.set(2, 1.0, 0.3, 0.0, "analytic");
        CHECK_THROWS_AS(eos_from_series(mayer, 1.0, 5.0, 2, gs, 3.0, true),
                        std::domain_error);
    }
}

TEST_CASE("monotonicity of the certified series in z") {
    // positive b_k at large beta: rho and p strictly increasing in mu
    auto sq_pot = make_builtin(BuiltinKind::SquareWell);
    GroundStateTable gs = square_table();
    double beta = 4.0;
    MayerTable mayer;
    for (int k = 2; k <= 4; ++k) {
        Estimate est = b_k_quadrature(sq_pot, k, beta);
        CHECK(est.value > 0.0);  // Theorem-maylt regime
        mayer.set(k, beta, est.value, est.error, "quadrature");
    }
    double prev_rho = 0.0, prev_p = 0.0;
    for (double mu = -4.0; mu <= -2.0; mu += 0.1) {
        EosResult eos = eos_from_series(mayer, beta, mu, 4, gs, 3.0, true);
        CHECK(eos.rho > prev_rho);
        CHECK(eos.pressure > prev_p);
        prev_rho = eos.rho;
        prev_p = eos.pressure;
    }
}

TEST_CASE("crossover scan on the square-well fixture") {
    auto sq_pot = make_builtin(BuiltinKind::SquareWell);
    GroundStateTable gs = square_table();
    std::vector<double> betas{4.0, 6.0, 8.0, 10.0};
    MayerTable mayer;
    for (double beta : betas) {
        for (int k = 2; k <= 3; ++k) {
            Estimate est = b_k_quadrature(sq_pot, k, beta);
            mayer.set(k, beta, est.value, est.error, "quadrature");
        }
    }
    CrossoverReport rep = crossover_scan(mayer, gs, betas, -2.0, 3, 3.0);
    CHECK(rep.k_unique);
    CHECK(rep.k_mu == 1);
    CHECK(rep.points.back().target == doctest::Approx(-2.0));
    CHECK(std::abs(rep.points.back().log_rho_rate + 2.0) <= 0.05 * 2.0);
    CHECK(rep.rate_trend_ok);
    CHECK_THROWS_AS(crossover_scan(mayer, gs, betas, -0.5, 3, 3.0),
                    std::domain_error);
}

TEST_CASE("free energy at low temperature") {
    GroundStateTable gs = square_table();
    SUBCASE("monatomic side: value is -rho nu") {
        double beta = 6.0, nu = 2.0;
        double rho = std::exp(-beta * nu);
        FreeEnergyEstimate est = free_energy_lowT(gs, beta, rho);
        CHECK(est.minimizer_k == 1);
        CHECK(est.value == doctest::Approx(-rho * nu).epsilon(1e-12));
        CHECK(est.band ==
              doctest::Approx(rho * std::log(beta) / beta).epsilon(1e-12));
    }
    SUBCASE("saturated side: minimizer saturates at K") {
        double beta = 6.0, nu = 0.5;
        double rho = std::exp(-beta * nu);
        FreeEnergyEstimate est = free_energy_lowT(gs, beta, rho);
        CHECK(est.minimizer_k == gs.K);
        CHECK(est.value ==
              doctest::Approx(rho * (gs.energy(gs.K) - nu) / gs.K)
                  .epsilon(1e-12));
        // approaches rho e_inf from above
        CHECK(est.value > rho * gs.thresholds.e_inf_fit);
    }
    SUBCASE("large beta is dominated by min E_k / k") {
        double rho = 0.25;
        FreeEnergyEstimate est = free_energy_lowT(gs, 1e8, rho);
        CHECK(est.value ==
              doctest::Approx(rho * gs.thresholds.e_inf_raw).epsilon(1e-6));
    }
    CHECK_THROWS_AS(free_energy_lowT(gs, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("rho_may estimate evaluates the series near the disk edge") {
    MayerTable mayer;
    mayer.set(2, 1.0, 0.5, 0.0, "analytic");
    RhoMayEstimate est = rho_may_estimate(mayer, 1.0, 0.2, "ratio-test");
    CHECK(est.z_star == doctest::Approx(0.19));
    CHECK(est.rho ==
          doctest::Approx(0.19 + 2 * 0.5 * 0.19 * 0.19).epsilon(1e-14));
    CHECK(est.radius_method == "ratio-test");
}

}  // TEST_SUITE
