#ifndef CLUVIR_GROUNDSTATE_HPP
#define CLUVIR_GROUNDSTATE_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cluvir/potential.hpp"

namespace cluvir {

// Total pair energy U(x_1,...,x_k); +infinity iff some pair violates the
// hard core. Coordinates are k*dimension doubles.
double total_energy(const PairPotential& p, std::span<const double> coords,
                    int dimension);

struct OracleResult {
    double energy = 0.0;
    std::vector<double> gaps;    // ordered inter-particle gaps (1-D)
    std::vector<double> coords;  // positions starting at 0
};

inline constexpr int kOracleMaxParticles = 8;

// Exhaustive 1-D minimum over ordered configurations with gaps
// discretized at grid_step over [r_hc, b + margin] (plus every piecewise
// breakpoint distance), refined by local coordinate search. Requires
// d = 1, a hard core, and k <= kOracleMaxParticles. Interactions reach at
// most floor(b / r_hc) neighbors along the line, which bounds the dynamic
// programming state.
OracleResult oracle_ground_state_1d(const PairPotential& p, int k,
                                    double grid_step = 0.005);

struct OptimizerSettings {
    int restarts = 24;          // random restarts beyond structured seeds
    int polish_rounds = 80;     // pattern-search sweeps per start
    double init_step = 0.3;
    double min_step = 1e-8;
    std::uint64_t seed = 1;
};

struct GroundStateResult {
    double energy = 0.0;
    std::vector<double> coords;
    bool connected = true;  // range graph connected at range = b
};

// Multistart derivative-free search for E_k. Seeds: chains at the deepest
// well distance, alternating-well chains, lattice patches (d = 2), and
// random configurations; each polished by compass search with shrinking
// steps. Refuses potentials without attractive tail. Best-found, not
// certified; compare with oracle_ground_state_1d in one dimension.
GroundStateResult find_ground_state(const PairPotential& p, int k,
                                    const OptimizerSettings& settings = {});

struct TailFitSettings {
    int dimension = 1;
    double fit_fraction = 0.5;  // top fraction of k used in the fit
    double tol = 1e-9;
};

struct ThresholdSet {
    double e_inf_fit = 0.0;   // slope of E_k ~ e_inf k + c k^{(d-1)/d}
    double e_inf_raw = 0.0;   // min_k E_k / k
    double surface_coeff = 0.0;
    double nu_star = 0.0;     // min_k (E_k - k e_inf_fit)
    double mu_one = 0.0;      // min_{k>=2} E_k / (k-1)
    double nu_one = 0.0;      // -mu_one
    int mu_one_minimizer_k = 0;
    bool mu_one_unique = false;   // gap to second best > tol
    double mu_one_gap = 0.0;
    bool polyatomic = false;      // mu_one < e_inf_fit - tol
    bool attractive_behavior = false;  // nu_star > tol
};

// Thresholds from a table of energies E_1..E_K (energies[k] = E_k,
// energies[0] ignored). Requires K >= 4.
ThresholdSet derive_thresholds(const std::vector<double>& energies,
                               const TailFitSettings& settings = {});

struct GroundStateEntry {
    int k = 0;
    double energy = 0.0;
    std::string method;  // oracle_1d | optimizer | exact
    std::vector<double> coords;
    bool connected = true;
};

struct GroundStateTable {
    int dimension = 1;
    int K = 0;
    std::vector<GroundStateEntry> entries;  // entries[k], entries[0] dummy
    ThresholdSet thresholds;

    double energy(int k) const { return entries.at(k).energy; }
    std::vector<double> energies() const;  // [0]=0 dummy, [k]=E_k
};

// Build a table for k = 1..K with the 1-D oracle when applicable,
// otherwise the multistart optimizer, and derive thresholds.
GroundStateTable compute_ground_state_table(
    const PairPotential& p, int K, double oracle_grid_step = 0.005,
    const OptimizerSettings& settings = {});

// Table from externally supplied energies E_1..E_K (energies[k] = E_k);
// entries carry method "exact" and no configurations.
GroundStateTable table_from_energies(const std::vector<double>& energies,
                                     int dimension = 1);

struct GluingWitness {
    int m = 0;
    int n = 0;
    double lhs = 0.0;  // E_{m+n+1}
    double rhs = 0.0;  // E_{m+1} + E_{n+1}
};

struct GluingReport {
    bool holds = true;
    bool strict = true;  // all inequalities strict (only meaningful if holds)
    double min_slack = 0.0;  // min over (m,n) of rhs - lhs
    std::vector<GluingWitness> violations;
};

// Check E_{m+n+1} <= E_{m+1} + E_{n+1} for all m, n >= 1 with
// m+n+1 <= K. K <= 2 holds vacuously.
GluingReport gluing_check(const std::vector<double>& energies,
                          double tol = 1e-9);

// Self-describing text serialization of table + thresholds.
void write_ground_state_table(std::ostream& os, const GroundStateTable& t);
GroundStateTable read_ground_state_table(std::istream& is);

}  // namespace cluvir

#endif
