#ifndef CLUVIR_THERMO_HPP
#define CLUVIR_THERMO_HPP

#include <string>
#include <vector>

#include "cluvir/groundstate.hpp"
#include "cluvir/mayer.hpp"

namespace cluvir {

struct VariationalValue {
    double value = 0.0;
    std::vector<int> minimizers;     // argmin indices, ties within tie_tol
    bool no_finite_minimizer = false;
    double second_best_gap = 0.0;    // gap to the best non-minimizing k
};

// nu(mu) = min_{k<=K} (E_k - k mu) with the full argmin set.
VariationalValue nu_of_mu(const GroundStateTable& gs, double mu,
                          double tie_tol = 1e-9);

// mu(nu) = min_{k<=K} (E_k - nu) / k. For nu below nu_star the sequence
// has no finite minimizer and the infimum is e_inf: the value returned is
// e_inf with no_finite_minimizer set.
VariationalValue mu_of_nu(const GroundStateTable& gs, double nu,
                          double tie_tol = 1e-9);

enum class Region {
    Monatomic,
    Polyatomic,
    CondensedSide,
    NoFiniteMinimizer,
    Boundary
};

std::string to_string(Region r);

// Region of a chemical potential per the threshold trichotomy.
Region classify_mu(const GroundStateTable& gs, double mu, double tol = 1e-9);
// Region of a rate nu (rho = exp(-beta nu)).
Region classify_nu(const GroundStateTable& gs, double nu, double tol = 1e-9);

struct EosResult {
    double beta = 0.0;
    double mu = 0.0;
    double z = 0.0;
    double rho = 0.0;       // truncated sum k b_k z^k
    double pressure = 0.0;  // beta p, truncated sum b_k z^k
    double rho_remainder = 0.0;
    double pressure_remainder = 0.0;
    bool certified = false;  // z inside the certified disk
    int K_trunc = 0;
};

// Truncated equation of state at z = exp(beta mu) with the tail bounded
// by (z/R)^K z (e-1) exp(-beta e_inf) when z <= R = exp(beta e_inf) /
// (beta e |||v|||). Throws std::domain_error when certification is
// demanded outside the disk.
EosResult eos_from_series(const MayerTable& mayer, double beta, double mu,
                          int K_trunc, const GroundStateTable& gs,
                          double v_norm, bool require_certified = false);

struct CrossoverPoint {
    double beta = 0.0;
    double rho = 0.0;
    double log_rho_rate = 0.0;  // beta^{-1} log rho
    double target = 0.0;        // -nu(mu)
    double pressure_ratio = 0.0;  // k(mu) beta p / rho; NaN if k not unique
    bool certified = false;
};

struct CrossoverReport {
    double mu = 0.0;
    int k_mu = 0;           // unique minimizer, 0 when not unique
    bool k_unique = false;
    std::vector<CrossoverPoint> points;
    bool rate_trend_ok = false;   // |rate - target| non-increasing
    bool ratio_trend_ok = false;  // |ratio - 1| non-increasing
};

// Gas-side scan over a beta grid at fixed mu < e_inf; throws
// std::domain_error for mu >= e_inf (outside series validity).
CrossoverReport crossover_scan(const MayerTable& mayer,
                               const GroundStateTable& gs,
                               const std::vector<double>& beta_grid,
                               double mu, int K_trunc, double v_norm);

struct FreeEnergyEstimate {
    double value = 0.0;  // rho * min_k (E_k + beta^{-1} log rho) / k
    double band = 0.0;   // C rho beta^{-1} log beta
    int minimizer_k = 0;
};

FreeEnergyEstimate free_energy_lowT(const GroundStateTable& gs, double beta,
                                    double rho, double band_constant = 1.0);

struct RhoMayEstimate {
    double z_star = 0.0;   // (1 - delta) * radius estimate
    double rho = 0.0;
    double radius_estimate = 0.0;
    std::string radius_method;
};

// Density at the edge of the estimated Mayer disk (delta inside).
RhoMayEstimate rho_may_estimate(const MayerTable& mayer, double beta,
                                double radius_estimate,
                                const std::string& radius_method,
                                double delta = 0.05);

}  // namespace cluvir

#endif
