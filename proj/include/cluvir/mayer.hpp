#ifndef CLUVIR_MAYER_HPP
#define CLUVIR_MAYER_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cluvir/graphs.hpp"
#include "cluvir/groundstate.hpp"
#include "cluvir/potential.hpp"

namespace cluvir {

// Sum over connected graphs on k vertices of the product of Mayer
// f-factors, evaluated literally from the graph list. Returns 0 when the
// range graph of the configuration is disconnected.
double ursell_weight(const PairPotential& p, std::span<const double> coords,
                     int dimension, double beta,
                     int k_max = kDefaultMaxGraphVertices);

// Same value through the partition identity
//   Z(S) = sum_{T containing min S} W(T) Z(S \ T),
// O(3^k) instead of a sum over all connected graphs. Used in quadrature
// and sampling inner loops; tested against ursell_weight.
double ursell_weight_fast(const PairPotential& p,
                          std::span<const double> coords, int dimension,
                          double beta);

struct QuadratureSettings {
    int nodes_per_interval = 16;  // Gauss-Legendre nodes per sub-interval
    int max_k = 4;
    double target_rel_error = 1e-2;  // throw when the estimate exceeds this
    bool check_tolerance = true;
};

struct Estimate {
    double value = 0.0;
    double error = 0.0;  // error bound (quadrature) or std error (MC)
};

// b_k(beta) in one dimension. Exploits translation and relabeling
// symmetry to integrate over ordered gap space [0, b]^{k-1}, with
// sub-interval splits at every piecewise breakpoint distance; exact for
// piecewise-constant potentials, Gauss-Legendre with mesh-doubling error
// estimate otherwise. k above max_k requires a piecewise-constant
// potential and is capped at 6.
Estimate b_k_quadrature(const PairPotential& p, int k, double beta,
                        const QuadratureSettings& settings = {});

inline constexpr long kMinMonteCarloSamples = 10000;

// Unbiased uniform-sampling estimator of b_k: x_2..x_k uniform in the
// d-ball of radius (k-1) b, averaging ursell * volume^{k-1} / k!.
// Samples are split into fixed chunks with one counter-seeded RNG stream
// per chunk, merged in chunk order: results are bit-identical for a given
// seed regardless of thread count. `threads` <= 0 picks the
// CLUSTER_VIRIAL_THREADS cap (default: hardware concurrency).
Estimate b_k_monte_carlo(const PairPotential& p, int k, double beta,
                         long samples, std::uint64_t seed, int threads = 0);

enum class ClusterMethod { Quadrature, MonteCarlo };

// Cluster partition function Z_k^cl(beta) over connected rooted
// configurations; quadrature is 1-D only, Monte Carlo is general.
Estimate z_cluster(const PairPotential& p, int k, double beta,
                   ClusterMethod method,
                   const QuadratureSettings& qsettings = {},
                   long samples = 1000000, std::uint64_t seed = 1);

struct MayerEntry {
    int k = 0;
    double beta = 0.0;
    double value = 0.0;
    double std_err = 0.0;
    std::string method;  // convention | analytic | quadrature | monte_carlo
};

class MayerTable {
public:
    MayerTable() = default;
    explicit MayerTable(std::vector<double> beta_grid);

    const std::vector<double>& beta_grid() const { return beta_grid_; }
    int max_k() const;

    // b_1 = 1 rows are implicit; set() rejects attempts to override them.
    void set(int k, double beta, double value, double std_err,
             const std::string& method);
    void set_zcl(int k, double beta, double value, double error,
                 const std::string& method);

    bool has(int k, double beta) const;
    const MayerEntry& at(int k, double beta) const;
    bool has_zcl(int k, double beta) const;
    const MayerEntry& zcl_at(int k, double beta) const;

    // b[0] unused, b[1] = 1, b[k] = b_k(beta) for stored k <= K.
    std::vector<double> column(double beta, int K) const;
    std::vector<double> errors_column(double beta, int K) const;

    const std::vector<MayerEntry>& entries() const { return entries_; }
    const std::vector<MayerEntry>& zcl_entries() const { return zcl_entries_; }

private:
    std::vector<double> beta_grid_;
    std::vector<MayerEntry> entries_;
    std::vector<MayerEntry> zcl_entries_;
};

// CSV with columns k,beta,value,std_err,method. Lines starting with '#'
// are comments and carry no data.
void write_mayer_csv(std::ostream& os, const std::vector<MayerEntry>& rows,
                     const std::string& comment = {});
std::vector<MayerEntry> read_mayer_csv(std::istream& is);
MayerTable mayer_table_from_entries(const std::vector<MayerEntry>& rows,
                                    const std::vector<MayerEntry>& zcl = {});

struct MayltPerK {
    int k = 0;
    double target = 0.0;              // -E_k
    double first_positive_beta = 0.0; // NaN when never positive on the grid
    std::vector<double> slopes;       // consecutive two-point log-slopes
    bool slopes_approach_target = false;
    std::vector<double> residual_ratio;  // |b_k - Z_k^cl| / Z_k^cl per beta
    bool residual_decreasing_top_half = false;
    std::string note;
};

struct MayltReport {
    std::vector<MayltPerK> per_k;
};

// Low-temperature diagnostic: sign of b_k along the beta grid, trend of
// the log-slope toward -E_k, and the relative distance to Z_k^cl.
MayltReport maylt_diagnostic(const MayerTable& table,
                             const GroundStateTable& gs);

int thread_cap();  // CLUSTER_VIRIAL_THREADS, else hardware concurrency

}  // namespace cluvir

#endif
