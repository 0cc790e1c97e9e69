#ifndef CLUVIR_VIRIAL_HPP
#define CLUVIR_VIRIAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "cluvir/groundstate.hpp"
#include "cluvir/mayer.hpp"

namespace cluvir {

using Rational = boost::multiprecision::cpp_rational;

// Multi-index (m_2, ..., m_n) with sum_j (j-1) m_j = n - 1.
struct CompositionVector {
    int n = 0;
    std::vector<int> m;  // m[j-2] = m_j

    int m_of(int j) const { return m.at(j - 2); }
    int weight() const;  // sum_j m_j
};

// All composition vectors of order n >= 2, deterministic order. The count
// equals the number of integer partitions of n - 1.
std::vector<CompositionVector> composition_vectors(int n);

// a(m_2,...,m_n) = ((n-2+sum m_j)! / n!) prod_j j^{m_j} / m_j!, exact.
Rational a_coefficient(const CompositionVector& m);

// d_n from b_2..b_n via the composition-vector sum; exact rational
// coefficients, extended-precision accumulation. b[k] = b_k, b[0]/b[1]
// ignored (b_1 plays no role here).
double virial_from_mayer(const std::vector<double>& b, int n);

// First-order error propagation: sum_j |d d_n / d b_j| * b_err[j].
double virial_from_mayer_error(const std::vector<double>& b,
                               const std::vector<double>& b_err, int n);

// Pressure-density coefficients c_1..c_N by formal reversion of
// rho(z) = sum_k k b_k z^k composed into beta p(z) = sum_k b_k z^k.
// Requires b[1] = 1. Independent route: c_n = -(n-1) d_n.
std::vector<double> invert_density_series(const std::vector<double>& b);

struct VirialEntry {
    int n = 0;
    double beta = 0.0;
    double d_n = 0.0;
    double c_n = 0.0;
    std::string provenance;  // transform | inversion
    double propagated_error = 0.0;
};

struct VirialTable {
    std::vector<VirialEntry> entries;

    const VirialEntry& at(int n, double beta) const;
    bool has(int n, double beta) const;
    std::vector<double> betas() const;
    int max_n() const;
};

// Build d_n (transform) and c_n (inversion) for n = 2..N from a Mayer
// table, per beta on the grid.
VirialTable build_virial_table(const MayerTable& mayer, int N);

void write_virial_csv(std::ostream& os, const VirialTable& table,
                      const std::string& comment = {});
VirialTable read_virial_csv(std::istream& is);

struct RadiusBounds {
    double lower = 0.0;  // exp(beta e_inf) / (beta e |||v|||)
    // Penrose-style estimate per k, applied to infinite-volume b_k as a
    // heuristic transplant of the finite-volume bound.
    std::vector<std::pair<int, double>> penrose_upper_per_k;
    double penrose_min = 0.0;
    double ratio_estimate = 0.0;  // |b_{K-1} / b_K| for the top pair
    std::string note;
};

RadiusBounds radius_bounds(const std::vector<double>& b,
                           const GroundStateTable& gs, double beta,
                           double v_norm);

// (e - 1) exp(-beta e_inf), valid for 0 <= z <= exp(beta e_inf) /
// (beta e |||v|||); throws std::domain_error outside the certified disk.
double remainder_bound(double e_inf, double v_norm, double beta, double z);

struct RhoZeroRoot {
    double z0 = 0.0;
    double predicted = 0.0;   // -1 / (4 b_2)
    double deviation = 0.0;   // |4 b_2 z0 + 1|
    double rho_at_z0 = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

// Root of d rho / d z = 1 + sum_{k>=2} k^2 b_k z^{k-1} near -1/(4 b_2).
// Requires b_2 > 0.
RhoZeroRoot find_drho_dz_root(const std::vector<double>& b, double beta);

enum class SignRegime { Gluing, Diatomic };

struct SignPatternPerK {
    int k = 0;
    int sign_top = 0;        // sign of d_k at the largest beta
    double slope_top = 0.0;  // two-point slope of log |d_k| at the top
    double target = 0.0;     // -E_k (gluing) or -(k-1) E_2 (diatomic)
    bool sign_ok = true;     // diatomic regime: sign == (-1)^k
    bool slope_ok = true;
    double ratio_d_over_b_top = 0.0;  // |d_k / b_k| at the largest beta
};

struct SignPatternReport {
    SignRegime regime = SignRegime::Gluing;
    std::vector<SignPatternPerK> per_k;
    bool eksin_ok = true;    // E_n <= sum m_j E_j for all compositions
    bool eksin_strict = true;
    bool vircon_lemma_ok = true;  // (n-1) E_2 <= sum m_j E_j, eq. iff m_2=n-1
    std::vector<std::string> notes;
};

// Low-temperature sign/slope check of the virial coefficients against the
// regime determined by the ground-state table (gluing holds -> limsup
// form with target -E_k; unique diatomic minimizer -> alternating signs
// with target -(k-1) E_2). Throws std::runtime_error when neither
// hypothesis is verified by the table. A Mayer table, when given, fills
// the |d_k| / b_k ratios.
SignPatternReport sign_pattern(const VirialTable& table,
                               const GroundStateTable& gs,
                               const MayerTable* mayer = nullptr,
                               double slope_rel_tol = 0.1,
                               double tol = 1e-9);

}  // namespace cluvir

#endif
