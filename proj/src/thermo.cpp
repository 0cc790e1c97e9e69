#include "cluvir/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cluvir {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

VariationalValue minimize(const std::vector<double>& terms, double tie_tol) {
    // terms[k] for k = 1..K; terms[0] ignored
    VariationalValue out;
    out.value = kInf;
    int K = static_cast<int>(terms.size()) - 1;
    for (int k = 1; k <= K; ++k) out.value = std::min(out.value, terms[k]);
    double second = kInf;
    for (int k = 1; k <= K; ++k) {
        if (terms[k] <= out.value + tie_tol)
            out.minimizers.push_back(k);
        else
            second = std::min(second, terms[k]);
    }
    out.second_best_gap = second - out.value;
    return out;
}
}  // namespace

VariationalValue nu_of_mu(const GroundStateTable& gs, double mu,
                          double tie_tol) {
    if (gs.K < 1) throw std::invalid_argument("empty ground-state table");
    std::vector<double> terms(gs.K + 1, kInf);
    for (int k = 1; k <= gs.K; ++k) terms[k] = gs.energy(k) - k * mu;
    return minimize(terms, tie_tol);
}

VariationalValue mu_of_nu(const GroundStateTable& gs, double nu,
                          double tie_tol) {
    if (gs.K < 1) throw std::invalid_argument("empty ground-state table");
    const auto& th = gs.thresholds;
    // Below nu_star the sequence (E_k - nu)/k keeps decreasing past any
    // finite table: the infimum is e_inf with no finite minimizer.
    if (std::isfinite(th.nu_star) && nu < th.nu_star - tie_tol) {
        VariationalValue out;
        out.value = th.e_inf_fit;
        out.no_finite_minimizer = true;
        return out;
    }
    std::vector<double> terms(gs.K + 1, kInf);
    for (int k = 1; k <= gs.K; ++k) terms[k] = (gs.energy(k) - nu) / k;
    return minimize(terms, tie_tol);
}

std::string to_string(Region r) {
    switch (r) {
        case Region::Monatomic: return "monatomic";
        case Region::Polyatomic: return "polyatomic";
        case Region::CondensedSide: return "condensed-side";
        case Region::NoFiniteMinimizer: return "no-finite-minimizer";
        case Region::Boundary: return "boundary";
    }
    return "?";
}

Region classify_mu(const GroundStateTable& gs, double mu, double tol) {
    const auto& th = gs.thresholds;
    if (!std::isfinite(th.mu_one))
        throw std::invalid_argument("classify_mu: thresholds not computed");
    if (std::abs(mu - th.mu_one) <= tol || std::abs(mu - th.e_inf_fit) <= tol)
        return Region::Boundary;
    if (mu < th.mu_one) return Region::Monatomic;
    if (mu < th.e_inf_fit) return Region::Polyatomic;
    return Region::CondensedSide;
}

Region classify_nu(const GroundStateTable& gs, double nu, double tol) {
    const auto& th = gs.thresholds;
    if (!std::isfinite(th.nu_star))
        throw std::invalid_argument("classify_nu: thresholds not computed");
    if (std::abs(nu - th.nu_star) <= tol || std::abs(nu - th.nu_one) <= tol)
        return Region::Boundary;
    if (nu < th.nu_star) return Region::NoFiniteMinimizer;
    if (nu < th.nu_one) return Region::Polyatomic;
    return Region::Monatomic;
}

EosResult eos_from_series(const MayerTable& mayer, double beta, double mu,
                          int K_trunc, const GroundStateTable& gs,
                          double v_norm, bool require_certified) {
    if (K_trunc < 1) throw std::invalid_argument("eos: K_trunc >= 1");
    EosResult out;
    out.beta = beta;
    out.mu = mu;
    out.K_trunc = K_trunc;
    out.z = std::exp(beta * mu);

    double e_inf = gs.thresholds.e_inf_fit;
    double disk = std::exp(beta * e_inf) / (beta * std::exp(1.0) * v_norm);
    out.certified = out.z <= disk;
    if (require_certified && !out.certified)
        throw std::domain_error(
            "eos_from_series: z outside the certified disk");

    std::vector<double> b = mayer.column(beta, K_trunc);
    double zp = 1.0;
    for (int k = 1; k <= K_trunc; ++k) {
        zp *= out.z;
        out.rho += k * b[k] * zp;
        out.pressure += b[k] * zp;
    }
    if (out.certified) {
        // Tail bound from the series estimate scaled by (z/R)^K.
        double tail = std::pow(out.z / disk, K_trunc) * out.z *
                      (std::exp(1.0) - 1.0) * std::exp(-beta * e_inf);
        out.rho_remainder = tail;
        out.pressure_remainder = tail;
    } else {
        out.rho_remainder = kNaN;
        out.pressure_remainder = kNaN;
    }
    return out;
}

CrossoverReport crossover_scan(const MayerTable& mayer,
                               const GroundStateTable& gs,
                               const std::vector<double>& beta_grid,
                               double mu, int K_trunc, double v_norm) {
    if (!(mu < gs.thresholds.e_inf_fit))
        throw std::domain_error(
            "crossover_scan: mu must lie below e_inf (gas side)");
    CrossoverReport report;
    report.mu = mu;
    VariationalValue nu = nu_of_mu(gs, mu);
    report.k_unique = nu.minimizers.size() == 1;
    report.k_mu = report.k_unique ? nu.minimizers.front() : 0;

    for (double beta : beta_grid) {
        EosResult eos =
            eos_from_series(mayer, beta, mu, K_trunc, gs, v_norm, false);
        CrossoverPoint pt;
        pt.beta = beta;
        pt.rho = eos.rho;
        pt.log_rho_rate = eos.rho > 0.0 ? std::log(eos.rho) / beta : kNaN;
        pt.target = -nu.value;
        pt.pressure_ratio = report.k_unique && eos.rho != 0.0
                                ? report.k_mu * eos.pressure / eos.rho
                                : kNaN;
        pt.certified = eos.certified;
        report.points.push_back(pt);
    }

    report.rate_trend_ok = report.points.size() >= 2;
    report.ratio_trend_ok = report.k_unique && report.points.size() >= 2;
    for (std::size_t i = 0; i + 1 < report.points.size(); ++i) {
        const auto& a = report.points[i];
        const auto& b = report.points[i + 1];
        if (!(std::abs(b.log_rho_rate - b.target) <=
              std::abs(a.log_rho_rate - a.target) + 1e-12))
            report.rate_trend_ok = false;
        if (report.k_unique &&
            !(std::abs(b.pressure_ratio - 1.0) <=
              std::abs(a.pressure_ratio - 1.0) + 1e-12))
            report.ratio_trend_ok = false;
    }
    return report;
}

FreeEnergyEstimate free_energy_lowT(const GroundStateTable& gs, double beta,
                                    double rho, double band_constant) {
    if (rho <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("free_energy_lowT: rho, beta > 0");
    FreeEnergyEstimate est;
    double best = kInf;
    double log_rho = std::log(rho);
    for (int k = 1; k <= gs.K; ++k) {
        double val = (gs.energy(k) + log_rho / beta) / k;
        if (val < best) {
            best = val;
            est.minimizer_k = k;
        }
    }
    est.value = rho * best;
    est.band = band_constant * rho * std::log(std::max(beta, 1.0 + 1e-12)) / beta;
    return est;
}

RhoMayEstimate rho_may_estimate(const MayerTable& mayer, double beta,
                                double radius_estimate,
                                const std::string& radius_method,
                                double delta) {
    RhoMayEstimate out;
    out.radius_estimate = radius_estimate;
    out.radius_method = radius_method;
    out.z_star = (1.0 - delta) * radius_estimate;
    int K = mayer.max_k();
    std::vector<double> b = mayer.column(beta, K);
    double zp = 1.0;
    for (int k = 1; k <= K; ++k) {
        zp *= out.z_star;
        out.rho += k * b[k] * zp;
    }
    return out;
}

}  // namespace cluvir
