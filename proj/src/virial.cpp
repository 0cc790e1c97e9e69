#include "cluvir/virial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cluvir {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using BigInt = boost::multiprecision::cpp_int;

BigInt big_factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

bool beta_close(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}
}  // namespace

int CompositionVector::weight() const {
    int w = 0;
    for (int mj : m) w += mj;
    return w;
}

std::vector<CompositionVector> composition_vectors(int n) {
    if (n < 2) throw std::invalid_argument("composition_vectors: n >= 2");
    std::vector<CompositionVector> out;
    CompositionVector current;
    current.n = n;
    current.m.assign(n - 1, 0);
    // Fill m_j for j = n down to 2; remaining = n-1 - sum (j-1) m_j.
    std::function<void(int, int)> rec = [&](int j, int remaining) {
        if (j == 2) {
            // (j-1) = 1 divides everything
            current.m[0] = remaining;
            out.push_back(current);
            current.m[0] = 0;
            return;
        }
        int unit = j - 1;
        for (int mj = remaining / unit; mj >= 0; --mj) {
            current.m[j - 2] = mj;
            rec(j - 1, remaining - mj * unit);
        }
        current.m[j - 2] = 0;
    };
    rec(n, n - 1);
    return out;
}

Rational a_coefficient(const CompositionVector& mv) {
    int n = mv.n;
    int total = 0;
    for (int j = 2; j <= n; ++j) total += mv.m_of(j);
    Rational a(big_factorial(n - 2 + total), big_factorial(n));
    for (int j = 2; j <= n; ++j) {
        int mj = mv.m_of(j);
        if (mj == 0) continue;
        BigInt power = 1;
        for (int i = 0; i < mj; ++i) power *= j;
        a *= Rational(power, big_factorial(mj));
    }
    return a;
}

double virial_from_mayer(const std::vector<double>& b, int n) {
    if (n < 2) throw std::invalid_argument("virial_from_mayer: n >= 2");
    if (static_cast<int>(b.size()) <= n)
        throw std::invalid_argument("virial_from_mayer: b_2..b_n required");
    long double total = 0.0L;
    for (const auto& mv : composition_vectors(n)) {
        long double term =
            static_cast<long double>(a_coefficient(mv).convert_to<double>());
        for (int j = 2; j <= n; ++j) {
            for (int c = 0; c < mv.m_of(j); ++c)
                term *= static_cast<long double>(b[j]);
        }
        int sign = (mv.weight() - 1) % 2 == 0 ? 1 : -1;
        total += sign * term;
    }
    return static_cast<double>(total);
}

double virial_from_mayer_error(const std::vector<double>& b,
                               const std::vector<double>& b_err, int n) {
    if (static_cast<int>(b_err.size()) <= n)
        throw std::invalid_argument("error vector too short");
    double total = 0.0;
    for (const auto& mv : composition_vectors(n)) {
        double a = a_coefficient(mv).convert_to<double>();
        for (int deriv_j = 2; deriv_j <= n; ++deriv_j) {
            int mj = mv.m_of(deriv_j);
            if (mj == 0 || b_err[deriv_j] == 0.0) continue;
            double term = a * mj;
            for (int j = 2; j <= n; ++j) {
                int count = mv.m_of(j) - (j == deriv_j ? 1 : 0);
                for (int c = 0; c < count; ++c) term *= b[j];
            }
            total += std::abs(term) * b_err[deriv_j];
        }
    }
    return total;
}

std::vector<double> invert_density_series(const std::vector<double>& b) {
    int N = static_cast<int>(b.size()) - 1;
    if (N < 1 || b[1] != 1.0)
        throw std::invalid_argument("invert_density_series requires b_1 = 1");

    // rho(z) = sum_k k b_k z^k, coefficients r[k] = k b_k, r[1] = 1.
    std::vector<long double> r(N + 1, 0.0L);
    for (int k = 1; k <= N; ++k) r[k] = static_cast<long double>(k) * b[k];

    // Reversion: zeta(w) with rho(zeta(w)) = w, order by order. powers[j]
    // holds the series of zeta^j truncated at N.
    std::vector<long double> zeta(N + 1, 0.0L);
    zeta[1] = 1.0L;
    std::vector<std::vector<long double>> powers(N + 1);
    auto multiply = [N](const std::vector<long double>& x,
                        const std::vector<long double>& y) {
        std::vector<long double> out(N + 1, 0.0L);
        for (int i = 0; i <= N; ++i) {
            if (x[i] == 0.0L) continue;
            for (int j = 0; i + j <= N; ++j) out[i + j] += x[i] * y[j];
        }
        return out;
    };
    for (int order = 2; order <= N; ++order) {
        // coefficient of w^order in rho(zeta(w)) must vanish; zeta powers
        // computed with the current truncation (higher zeta coefficients
        // cannot influence lower orders).
        powers[1] = zeta;
        for (int j = 2; j <= order; ++j)
            powers[j] = multiply(powers[j - 1], zeta);
        long double coeff = 0.0L;
        for (int k = 2; k <= order; ++k) coeff += r[k] * powers[k][order];
        zeta[order] = -coeff;  // r[1] = 1 multiplies zeta[order] directly
    }

    // Compose beta p(z) = sum b_k z^k at z = zeta(w).
    powers[1] = zeta;
    for (int j = 2; j <= N; ++j) powers[j] = multiply(powers[j - 1], zeta);
    std::vector<double> c(N + 1, 0.0);
    for (int nn = 1; nn <= N; ++nn) {
        long double total = 0.0L;
        for (int k = 1; k <= nn; ++k)
            total += static_cast<long double>(b[k]) * powers[k][nn];
        c[nn] = static_cast<double>(total);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Table.
// ---------------------------------------------------------------------------

const VirialEntry& VirialTable::at(int n, double beta) const {
    for (const auto& e : entries) {
        if (e.n == n && beta_close(e.beta, beta)) return e;
    }
    throw std::out_of_range("VirialTable: missing entry");
}

bool VirialTable::has(int n, double beta) const {
    return std::any_of(entries.begin(), entries.end(), [&](const auto& e) {
        return e.n == n && beta_close(e.beta, beta);
    });
}

std::vector<double> VirialTable::betas() const {
    std::vector<double> out;
    for (const auto& e : entries) {
        if (std::none_of(out.begin(), out.end(),
                         [&](double b) { return beta_close(b, e.beta); }))
            out.push_back(e.beta);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int VirialTable::max_n() const {
    int m = 0;
    for (const auto& e : entries) m = std::max(m, e.n);
    return m;
}

VirialTable build_virial_table(const MayerTable& mayer, int N) {
    if (N < 2) throw std::invalid_argument("build_virial_table: N >= 2");
    if (mayer.beta_grid().empty())
        throw std::invalid_argument("build_virial_table: empty Mayer table");
    VirialTable table;
    for (double beta : mayer.beta_grid()) {
        std::vector<double> b = mayer.column(beta, N);
        std::vector<double> berr = mayer.errors_column(beta, N);
        std::vector<double> c = invert_density_series(b);
        for (int n = 2; n <= N; ++n) {
            VirialEntry e;
            e.n = n;
            e.beta = beta;
            e.d_n = virial_from_mayer(b, n);
            e.c_n = c[n];
            e.provenance = "transform+inversion";
            e.propagated_error = virial_from_mayer_error(b, berr, n);
            table.entries.push_back(std::move(e));
        }
    }
    return table;
}

void write_virial_csv(std::ostream& os, const VirialTable& table,
                      const std::string& comment) {
    if (!comment.empty()) os << "# " << comment << "\n";
    os << "n,beta,d_n,c_n,provenance,propagated_error\n";
    char buf[160];
    for (const auto& e : table.entries) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%s,%.17g\n", e.n,
                      e.beta, e.d_n, e.c_n, e.provenance.c_str(),
                      e.propagated_error);
        os << buf;
    }
}

VirialTable read_virial_csv(std::istream& is) {
    VirialTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        VirialEntry e;
        if (ss >> e.n >> e.beta >> e.d_n >> e.c_n >> e.provenance >>
            e.propagated_error)
            table.entries.push_back(std::move(e));
        else
            throw std::runtime_error("malformed virial CSV row: " + line);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Radius bounds, remainder, d rho / d z root.
// ---------------------------------------------------------------------------

RadiusBounds radius_bounds(const std::vector<double>& b,
                           const GroundStateTable& gs, double beta,
                           double v_norm) {
    if (beta <= 0.0) throw std::invalid_argument("radius_bounds: beta > 0");
    int K = static_cast<int>(b.size()) - 1;
    bool any = false;
    for (int k = 2; k <= K; ++k) any = any || b[k] != 0.0;
    if (!any)
        throw std::invalid_argument(
            "radius_bounds: all b_k vanish, radius undetermined");

    RadiusBounds out;
    double e_inf = gs.thresholds.e_inf_fit;
    out.lower = std::exp(beta * e_inf) /
                (beta * std::exp(1.0) * v_norm);
    out.penrose_min = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= K; ++k) {
        if (b[k] == 0.0) continue;
        double est = std::pow(
            k * std::exp(-beta * e_inf) / ((k - 1) * std::abs(b[k])),
            1.0 / (k - 1));
        out.penrose_upper_per_k.emplace_back(k, est);
        out.penrose_min = std::min(out.penrose_min, est);
    }
    // Ratio test on the top consecutive pair of nonvanishing coefficients.
    out.ratio_estimate = kNaN;
    for (int k = K; k >= 3; --k) {
        if (b[k] != 0.0 && b[k - 1] != 0.0) {
            out.ratio_estimate = std::abs(b[k - 1] / b[k]);
            break;
        }
    }
    out.note =
        "penrose bounds transplanted from finite-volume coefficients "
        "(heuristic)";
    return out;
}

double remainder_bound(double e_inf, double v_norm, double beta, double z) {
    if (beta <= 0.0) throw std::invalid_argument("remainder_bound: beta > 0");
    double disk = std::exp(beta * e_inf) / (beta * std::exp(1.0) * v_norm);
    if (z < 0.0 || z > disk)
        throw std::domain_error("remainder_bound: z outside certified disk");
    return (std::exp(1.0) - 1.0) * std::exp(-beta * e_inf);
}

RhoZeroRoot find_drho_dz_root(const std::vector<double>& b, double beta) {
    (void)beta;
    int K = static_cast<int>(b.size()) - 1;
    if (K < 2 || !(b[2] > 0.0))
        throw std::invalid_argument("find_drho_dz_root requires b_2 > 0");

    auto drho = [&](double z) {
        double sum = 1.0;
        double zp = 1.0;  // z^{k-1}
        for (int k = 2; k <= K; ++k) {
            zp *= z;
            sum += k * k * b[k] * zp;
        }
        return sum;
    };

    RhoZeroRoot out;
    out.predicted = -1.0 / (4.0 * b[2]);
    // Expand a bracket around the prediction until the sign changes.
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (double w : {0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0}) {
        double z_out = out.predicted * (1.0 + w);
        double z_in = out.predicted * std::max(0.0, 1.0 - w);
        if (drho(z_out) < 0.0 && drho(z_in) > 0.0) {
            lo = z_out;  // more negative side, drho < 0
            hi = z_in;
            found = true;
            break;
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "find_drho_dz_root: no sign change around " << out.predicted
            << " (drho(0) = " << drho(0.0) << ", drho(2 pred) = "
            << drho(2.0 * out.predicted) << ")";
        throw std::runtime_error(msg.str());
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (drho(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    out.z0 = 0.5 * (lo + hi);
    out.deviation = std::abs(4.0 * b[2] * out.z0 + 1.0);
    double rho = 0.0, zp = 1.0;
    for (int k = 1; k <= K; ++k) {
        zp *= out.z0;
        rho += k * b[k] * zp;
    }
    out.rho_at_z0 = rho;
    return out;
}

// ---------------------------------------------------------------------------
// Sign pattern.
// ---------------------------------------------------------------------------

SignPatternReport sign_pattern(const VirialTable& table,
                               const GroundStateTable& gs,
                               const MayerTable* mayer,
                               double slope_rel_tol, double tol) {
    SignPatternReport report;
    std::vector<double> E = gs.energies();
    GluingReport gluing = gluing_check(E, tol);
    const auto& th = gs.thresholds;

    if (gluing.holds) {
        report.regime = SignRegime::Gluing;
    } else if (th.polyatomic && th.mu_one_unique &&
               th.mu_one_minimizer_k == 2) {
        report.regime = SignRegime::Diatomic;
    } else {
        throw std::runtime_error(
            "sign_pattern: regime undeterminable (gluing fails and no "
            "unique diatomic minimizer)");
    }

    std::vector<double> betas = table.betas();
    if (betas.size() < 2)
        throw std::invalid_argument("sign_pattern: need >= 2 beta points");
    double b_top = betas.back(), b_prev = betas[betas.size() - 2];

    for (int k = 2; k <= std::min(table.max_n(), gs.K); ++k) {
        if (!table.has(k, b_top) || !table.has(k, b_prev)) continue;
        SignPatternPerK pk;
        pk.k = k;
        double d_top = table.at(k, b_top).d_n;
        double d_prev = table.at(k, b_prev).d_n;
        pk.sign_top = d_top > 0.0 ? 1 : (d_top < 0.0 ? -1 : 0);
        pk.slope_top = (std::log(std::abs(d_top)) -
                        std::log(std::abs(d_prev))) /
                       (b_top - b_prev);
        if (report.regime == SignRegime::Gluing) {
            pk.target = -E[k];
            // limsup form only: slope must not exceed -E_k
            pk.slope_ok = pk.slope_top <= -E[k] + slope_rel_tol;
            pk.sign_ok = true;  // sign not predicted in this regime
        } else {
            pk.target = -(k - 1) * E[2];
            pk.sign_ok = pk.sign_top == (k % 2 == 0 ? 1 : -1);
            pk.slope_ok = std::abs(pk.slope_top - pk.target) <=
                          slope_rel_tol * std::abs(pk.target);
        }
        pk.ratio_d_over_b_top = kNaN;
        if (mayer && mayer->has(k, b_top)) {
            // Magnitude ratio: at desk-scale beta some b_k have not yet
            // turned positive, the divergence shows up in |d_k| / |b_k|.
            double bk = mayer->at(k, b_top).value;
            if (bk != 0.0) pk.ratio_d_over_b_top = std::abs(d_top / bk);
        }
        report.per_k.push_back(pk);
    }

    // Lemma-level checks directly on the E table.
    int n_max = std::min(gs.K, 8);
    for (int n = 2; n <= n_max; ++n) {
        for (const auto& mv : composition_vectors(n)) {
            double sum = 0.0;
            for (int j = 2; j <= n; ++j) sum += mv.m_of(j) * E[j];
            if (gluing.holds) {
                if (E[n] > sum + tol) report.eksin_ok = false;
                if (E[n] >= sum - tol && mv.weight() > 1)
                    report.eksin_strict = false;
            }
            if (report.regime == SignRegime::Diatomic) {
                double lhs = (n - 1) * E[2];
                bool is_pure_dimer = mv.m_of(2) == n - 1 && mv.weight() == n - 1;
                if (is_pure_dimer) {
                    if (std::abs(lhs - sum) > tol)
                        report.vircon_lemma_ok = false;
                } else if (!(lhs < sum - tol)) {
                    report.vircon_lemma_ok = false;
                }
            }
        }
    }
    if (!gluing.holds) report.eksin_ok = true;  // hypothesis not applicable

    report.notes.push_back(
        report.regime == SignRegime::Gluing
            ? "gluing regime: limsup slope check against -E_k"
            : "diatomic regime: alternating signs, target -(k-1) E_2");
    if (gluing.holds && !gluing.strict)
        report.notes.push_back(
            "gluing holds with equality: only the limsup form applies");
    return report;
}

}  // namespace cluvir
