#include "cluvir/mayer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cluvir/graphs.hpp"

namespace cluvir {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Pairwise f_ij for a configuration; returns false when some pair beyond
// the range graph makes the configuration disconnected.
void fill_f_matrix(const PairPotential& p, std::span<const double> coords,
                   int dimension, double beta, int k, double* f) {
    for (int i = 0; i < k; ++i) {
        f[i * k + i] = 0.0;
        for (int j = i + 1; j < k; ++j) {
            double dist2 = 0.0;
            for (int a = 0; a < dimension; ++a) {
                double d = coords[i * dimension + a] - coords[j * dimension + a];
                dist2 += d * d;
            }
            double val = p.mayer_f(std::sqrt(dist2), beta);
            f[i * k + j] = val;
            f[j * k + i] = val;
        }
    }
}

}  // namespace

double ursell_weight(const PairPotential& p, std::span<const double> coords,
                     int dimension, double beta, int k_max) {
    int k = static_cast<int>(coords.size()) / dimension;
    if (k < 2 || k > k_max)
        throw std::invalid_argument("ursell_weight: k out of range");
    if (!configuration_connected(coords, dimension, p.range())) return 0.0;

    std::vector<double> f(static_cast<std::size_t>(k) * k);
    fill_f_matrix(p, coords, dimension, beta, k, f.data());

    double total = 0.0;
    for (const LabeledGraph& g : connected_graphs(k, k_max)) {
        double prod = 1.0;
        std::uint64_t mask = g.edges;
        int e = 0;
        for (int i = 0; i < k && prod != 0.0; ++i) {
            for (int j = i + 1; j < k; ++j, ++e) {
                if ((mask >> e) & 1ull) prod *= f[i * k + j];
            }
        }
        total += prod;
    }
    return total;
}

double ursell_weight_fast(const PairPotential& p,
                          std::span<const double> coords, int dimension,
                          double beta) {
    int k = static_cast<int>(coords.size()) / dimension;
    if (k < 2 || k > 16)
        throw std::invalid_argument("ursell_weight_fast: k out of range");
    if (!configuration_connected(coords, dimension, p.range())) return 0.0;

    double f[16 * 16];
    fill_f_matrix(p, coords, dimension, beta, k, f);

    // Z(S) = prod over pairs in S of (1 + f_ij); the all-graphs sum
    // factorizes over connected components, which yields
    //   W(S) = Z(S) - sum_{T proper subset of S containing min S} W(T) Z(S\T).
    const unsigned full = (1u << k) - 1u;
    std::vector<double> Z(full + 1), W(full + 1, 0.0);
    Z[0] = 1.0;
    for (unsigned S = 1; S <= full; ++S) {
        int a = 31 - __builtin_clz(S);  // highest set bit
        unsigned rest = S & ~(1u << a);
        double prod = Z[rest];
        unsigned r = rest;
        while (r) {
            int j = __builtin_ctz(r);
            r &= r - 1;
            prod *= 1.0 + f[a * k + j];
        }
        Z[S] = prod;
    }
    for (unsigned S = 1; S <= full; ++S) {
        unsigned m = S & (~S + 1u);  // lowest set bit
        double w = Z[S];
        // proper submasks of S containing m
        unsigned others = S & ~m;
        for (unsigned sub = others; sub; sub = (sub - 1) & others) {
            unsigned T = S & ~sub;  // contains m, proper since sub != 0
            w -= W[T] * Z[sub];
        }
        W[S] = w;
    }
    return W[full];
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes.
// ---------------------------------------------------------------------------

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

const GaussRule& gauss_rule(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

// Nested integration over ordered gap space [0, b]^{k-1}. By translation
// invariance and relabeling symmetry of the integrand, the rooted
// integral over (R^1)^{k-1} equals k! times the integral over sorted
// configurations, which cancels the 1/k! prefactor: the coefficient is
// the plain integral over gaps.
//
// Each axis is split at every distance where a window sum crosses a
// piecewise breakpoint. For piecewise-constant potentials the innermost
// axis is then exactly piecewise constant; outer axes are piecewise
// polynomial of degree at most (k-1-t) apart from kinks where inner cell
// boundaries collide, so node counts are graded outward and the error is
// estimated by doubling every axis.
class GapIntegrator {
public:
    GapIntegrator(const PairPotential& p, int k, bool closure_cuts,
                  std::function<double(std::span<const double>)> integrand)
        : p_(p), k_(k), integrand_(std::move(integrand)) {
        radii_ = p.breakpoints();
        if (closure_cuts) {
            // One level of difference closure: inner cell boundaries
            // collide at distances r - r', which is where the nested
            // integral kinks. Exact for a single nesting level (k <= 3).
            std::vector<double> base = radii_;
            for (double r1 : base) {
                for (double r2 : base) {
                    double d = r1 - r2;
                    if (d > 1e-12 && d < p.range() - 1e-12)
                        radii_.push_back(d);
                }
            }
            std::sort(radii_.begin(), radii_.end());
            radii_.erase(std::unique(radii_.begin(), radii_.end(),
                                     [](double a, double b) {
                                         return std::abs(a - b) < 1e-12;
                                     }),
                         radii_.end());
        }
        positions_.resize(k);
        positions_[0] = 0.0;
    }

    double run(const std::vector<int>& nodes_per_axis) {
        nodes_ = nodes_per_axis;
        return axis(1);
    }

private:
    double axis(int t) {
        // splits for gap g = x_t - x_{t-1}: window (s, t) crosses radius r
        // at g = r - (x_{t-1} - x_s)
        double b = p_.range();
        std::vector<double> cuts{0.0, b};
        for (int s = 0; s < t; ++s) {
            double base = positions_[t - 1] - positions_[s];
            for (double r : radii_) {
                double g = r - base;
                if (g > 1e-12 && g < b - 1e-12) cuts.push_back(g);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double a, double c) {
                                   return std::abs(a - c) < 1e-12;
                               }),
                   cuts.end());

        int n = nodes_[t - 1];
        const GaussRule& rule = gauss_rule(n);
        double total = 0.0;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            double lo = cuts[c], hi = cuts[c + 1];
            double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            for (int q = 0; q < n; ++q) {
                double g = mid + half * rule.nodes[q];
                positions_[t] = positions_[t - 1] + g;
                double inner = (t == k_ - 1)
                                   ? integrand_(std::span<const double>(
                                         positions_.data(), k_))
                                   : axis(t + 1);
                total += half * rule.weights[q] * inner;
            }
        }
        return total;
    }

    const PairPotential& p_;
    int k_;
    std::function<double(std::span<const double>)> integrand_;
    std::vector<double> radii_;
    std::vector<double> positions_;
    std::vector<int> nodes_;
};

Estimate run_gap_quadrature(
    const PairPotential& p, int k, double beta,
    const QuadratureSettings& settings,
    std::function<double(std::span<const double>)> integrand) {
    (void)beta;
    GapIntegrator integ(p, k, /*closure_cuts=*/k <= 3, std::move(integrand));
    std::vector<int> base(k - 1), fine(k - 1);
    bool constant = p.only_constant_pieces();
    for (int t = 1; t <= k - 1; ++t) {
        base[t - 1] = constant ? std::min(settings.nodes_per_interval,
                                          k - t + 1)
                               : settings.nodes_per_interval;
        fine[t - 1] = 2 * base[t - 1];
    }
    double coarse = integ.run(base);
    double refined = integ.run(fine);
    Estimate est;
    est.value = refined;
    est.error = std::abs(refined - coarse) + 1e-14 * std::abs(refined);
    if (settings.check_tolerance &&
        est.error > settings.target_rel_error *
                        std::max(1.0, std::abs(est.value)))
        throw std::runtime_error("quadrature mesh too coarse for target");
    return est;
}

}  // namespace

Estimate b_k_quadrature(const PairPotential& p, int k, double beta,
                        const QuadratureSettings& settings) {
    if (p.dimension() != 1)
        throw std::invalid_argument("b_k_quadrature is one-dimensional");
    if (k < 2) throw std::invalid_argument("b_k_quadrature: k >= 2");
    if (k > settings.max_k) {
        if (!(p.only_constant_pieces() && k <= 6))
            throw std::invalid_argument(
                "b_k_quadrature: k above cap (raise max_k; k in (4, 6] "
                "requires a piecewise-constant potential)");
    }
    if (k > 6) throw std::invalid_argument("b_k_quadrature: k above 6");
    return run_gap_quadrature(p, k, beta, settings,
                              [&](std::span<const double> x) {
                                  return ursell_weight_fast(p, x, 1, beta);
                              });
}

// ---------------------------------------------------------------------------
// Monte Carlo.
// ---------------------------------------------------------------------------

int thread_cap() {
    if (const char* env = std::getenv("CLUSTER_VIRIAL_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

constexpr long kChunkSize = 1 << 16;

struct ChunkStats {
    double sum = 0.0;
    double sumsq = 0.0;
};

// One counter-seeded stream per chunk; points drawn by rejection from the
// bounding cube of the d-ball.
template <typename F>
ChunkStats run_chunk(std::uint64_t seed, long chunk_index, long count,
                     int dimension, int k, double radius, F&& weight) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk_index),
                      0x9e3779b9u};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    ChunkStats stats;
    std::vector<double> coords(static_cast<std::size_t>(k) * dimension, 0.0);
    for (long s = 0; s < count; ++s) {
        for (int i = 1; i < k; ++i) {
            double norm2;
            do {
                norm2 = 0.0;
                for (int a = 0; a < dimension; ++a) {
                    double c = sym(rng);
                    coords[i * dimension + a] = c * radius;
                    norm2 += c * c;
                }
            } while (norm2 > 1.0);
        }
        double w = weight(coords);
        stats.sum += w;
        stats.sumsq += w * w;
    }
    return stats;
}

template <typename F>
Estimate monte_carlo_mean(const PairPotential& p, int k, long samples,
                          std::uint64_t seed, int threads, double scale,
                          F&& weight) {
    double radius = (k - 1) * p.range();
    int dimension = p.dimension();
    long chunks = (samples + kChunkSize - 1) / kChunkSize;
    std::vector<ChunkStats> stats(chunks);

    int workers = threads > 0 ? threads : thread_cap();
    workers = static_cast<int>(std::min<long>(workers, chunks));
    std::atomic<long> next{0};
    auto worker = [&] {
        for (;;) {
            long c = next.fetch_add(1);
            if (c >= chunks) break;
            long count = std::min<long>(kChunkSize, samples - c * kChunkSize);
            stats[c] = run_chunk(seed, c, count, dimension, k, radius, weight);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Fixed-order merge keeps results bit-identical across thread counts.
    double sum = 0.0, sumsq = 0.0;
    for (const auto& s : stats) {
        sum += s.sum;
        sumsq += s.sumsq;
    }
    double n = static_cast<double>(samples);
    double mean = sum / n;
    double var = std::max(0.0, (sumsq / n - mean * mean) * n / (n - 1.0));
    if (var == 0.0 && mean == 0.0)
        throw std::runtime_error(
            "degenerate sampling: zero variance with zero mean");
    Estimate est;
    est.value = scale * mean;
    est.error = scale * std::sqrt(var / n);
    return est;
}

}  // namespace

Estimate b_k_monte_carlo(const PairPotential& p, int k, double beta,
                         long samples, std::uint64_t seed, int threads) {
    if (k < 2 || k > kDefaultMaxGraphVertices + 1)
        throw std::invalid_argument("b_k_monte_carlo: k out of range");
    if (samples < kMinMonteCarloSamples)
        throw std::invalid_argument("b_k_monte_carlo: need >= 1e4 samples");
    double radius = (k - 1) * p.range();
    double volume = ball_volume(p.dimension(), radius);
    double scale = std::pow(volume, k - 1) / factorial(k);
    return monte_carlo_mean(
        p, k, samples, seed, threads, scale,
        [&](const std::vector<double>& coords) {
            return ursell_weight_fast(p, coords, p.dimension(), beta);
        });
}

Estimate z_cluster(const PairPotential& p, int k, double beta,
                   ClusterMethod method, const QuadratureSettings& qsettings,
                   long samples, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("z_cluster: k >= 1");
    if (k == 1) return {1.0, 0.0};  // empty rooted integral
    if (method == ClusterMethod::Quadrature) {
        if (p.dimension() != 1)
            throw std::invalid_argument("z_cluster quadrature is 1-D only");
        if (k > 6) throw std::invalid_argument("z_cluster: k above 6");
        // On the gap domain [0, b]^{k-1} the configuration is connected by
        // construction; hard-core gaps contribute exp(-inf) = 0.
        return run_gap_quadrature(
            p, k, beta, qsettings, [&](std::span<const double> x) {
                double u = total_energy(p, x, 1);
                return std::isinf(u) ? 0.0 : std::exp(-beta * u);
            });
    }
    double radius = (k - 1) * p.range();
    double volume = ball_volume(p.dimension(), radius);
    double scale = std::pow(volume, k - 1) / factorial(k);
    return monte_carlo_mean(
        p, k, samples, seed, 0, scale, [&](const std::vector<double>& coords) {
            if (!configuration_connected(coords, p.dimension(), p.range()))
                return 0.0;
            double u = total_energy(p, coords, p.dimension());
            return std::isinf(u) ? 0.0 : std::exp(-beta * u);
        });
}

// ---------------------------------------------------------------------------
// Table and CSV.
// ---------------------------------------------------------------------------

namespace {
bool beta_close(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}
}  // namespace

MayerTable::MayerTable(std::vector<double> beta_grid)
    : beta_grid_(std::move(beta_grid)) {
    std::sort(beta_grid_.begin(), beta_grid_.end());
}

int MayerTable::max_k() const {
    int m = 1;
    for (const auto& e : entries_) m = std::max(m, e.k);
    return m;
}

void MayerTable::set(int k, double beta, double value, double std_err,
                     const std::string& method) {
    if (k == 1)
        throw std::invalid_argument("b_1 = 1 by convention, not settable");
    if (k < 2) throw std::invalid_argument("k out of range");
    for (auto& e : entries_) {
        if (e.k == k && beta_close(e.beta, beta)) {
            e = {k, beta, value, std_err, method};
            return;
        }
    }
    entries_.push_back({k, beta, value, std_err, method});
    if (std::none_of(beta_grid_.begin(), beta_grid_.end(),
                     [&](double b) { return beta_close(b, beta); })) {
        beta_grid_.push_back(beta);
        std::sort(beta_grid_.begin(), beta_grid_.end());
    }
}

void MayerTable::set_zcl(int k, double beta, double value, double error,
                         const std::string& method) {
    for (auto& e : zcl_entries_) {
        if (e.k == k && beta_close(e.beta, beta)) {
            e = {k, beta, value, error, method};
            return;
        }
    }
    zcl_entries_.push_back({k, beta, value, error, method});
}

bool MayerTable::has(int k, double beta) const {
    if (k == 1) return true;
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) {
        return e.k == k && beta_close(e.beta, beta);
    });
}

const MayerEntry& MayerTable::at(int k, double beta) const {
    static const MayerEntry b1{1, 0.0, 1.0, 0.0, "convention"};
    if (k == 1) return b1;
    for (const auto& e : entries_) {
        if (e.k == k && beta_close(e.beta, beta)) return e;
    }
    throw std::out_of_range("MayerTable: missing entry");
}

bool MayerTable::has_zcl(int k, double beta) const {
    return std::any_of(zcl_entries_.begin(), zcl_entries_.end(),
                       [&](const auto& e) {
                           return e.k == k && beta_close(e.beta, beta);
                       });
}

const MayerEntry& MayerTable::zcl_at(int k, double beta) const {
    for (const auto& e : zcl_entries_) {
        if (e.k == k && beta_close(e.beta, beta)) return e;
    }
    throw std::out_of_range("MayerTable: missing Z_k^cl entry");
}

std::vector<double> MayerTable::column(double beta, int K) const {
    std::vector<double> b(K + 1, 0.0);
    if (K >= 1) b[1] = 1.0;
    for (int k = 2; k <= K; ++k) b[k] = at(k, beta).value;
    return b;
}

std::vector<double> MayerTable::errors_column(double beta, int K) const {
    std::vector<double> err(K + 1, 0.0);
    for (int k = 2; k <= K; ++k) err[k] = at(k, beta).std_err;
    return err;
}

void write_mayer_csv(std::ostream& os, const std::vector<MayerEntry>& rows,
                     const std::string& comment) {
    if (!comment.empty()) os << "# " << comment << "\n";
    os << "k,beta,value,std_err,method\n";
    char buf[128];
    for (const auto& e : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%s\n", e.k,
                      e.beta, e.value, e.std_err, e.method.c_str());
        os << buf;
    }
}

std::vector<MayerEntry> read_mayer_csv(std::istream& is) {
    std::vector<MayerEntry> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        MayerEntry e;
        if (ss >> e.k >> e.beta >> e.value >> e.std_err >> e.method)
            rows.push_back(std::move(e));
        else
            throw std::runtime_error("malformed Mayer CSV row: " + line);
    }
    return rows;
}

MayerTable mayer_table_from_entries(const std::vector<MayerEntry>& rows,
                                    const std::vector<MayerEntry>& zcl) {
    MayerTable table;
    for (const auto& e : rows) {
        if (e.k == 1) continue;  // convention rows carry no information
        if (table.has(e.k, e.beta)) {
            // duplicate (k, beta) from different estimators: they must
            // agree within 3 combined errors; keep the tighter one
            const MayerEntry& prev = table.at(e.k, e.beta);
            double combined = prev.std_err + e.std_err;
            if (std::abs(prev.value - e.value) > 3.0 * combined) {
                std::ostringstream msg;
                msg << "Mayer table: " << prev.method << " and " << e.method
                    << " disagree at k = " << e.k << ", beta = " << e.beta;
                throw std::runtime_error(msg.str());
            }
            if (e.std_err < prev.std_err)
                table.set(e.k, e.beta, e.value, e.std_err, e.method);
            continue;
        }
        table.set(e.k, e.beta, e.value, e.std_err, e.method);
    }
    for (const auto& e : zcl)
        table.set_zcl(e.k, e.beta, e.value, e.std_err, e.method);
    return table;
}

// ---------------------------------------------------------------------------
// Low-temperature diagnostic.
// ---------------------------------------------------------------------------

MayltReport maylt_diagnostic(const MayerTable& table,
                             const GroundStateTable& gs) {
    MayltReport report;
    const auto& betas = table.beta_grid();
    if (betas.size() < 3)
        throw std::invalid_argument("maylt_diagnostic: need >= 3 beta points");

    for (int k = 2; k <= std::min(table.max_k(), gs.K); ++k) {
        MayltPerK pk;
        pk.k = k;
        pk.target = -gs.energy(k);

        std::vector<double> values;
        for (double beta : betas) {
            if (!table.has(k, beta)) break;
            values.push_back(table.at(k, beta).value);
        }
        if (values.size() != betas.size()) continue;

        pk.first_positive_beta = kNaN;
        for (std::size_t i = 0; i < values.size(); ++i) {
            bool all_pos = true;
            for (std::size_t j = i; j < values.size(); ++j)
                all_pos = all_pos && values[j] > 0.0;
            if (all_pos) {
                pk.first_positive_beta = betas[i];
                break;
            }
        }

        int positive_top = 0;
        for (std::size_t i = values.size(); i-- > 0;) {
            if (values[i] > 0.0) ++positive_top;
            else break;
        }
        if (positive_top < 3) {
            pk.note = positive_top == 0 ? "sign not yet positive"
                                        : "fewer than 3 positive points";
            report.per_k.push_back(std::move(pk));
            continue;
        }

        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            if (values[i] > 0.0 && values[i + 1] > 0.0) {
                pk.slopes.push_back(
                    (std::log(values[i + 1]) - std::log(values[i])) /
                    (betas[i + 1] - betas[i]));
            }
        }
        pk.slopes_approach_target = pk.slopes.size() >= 2;
        for (std::size_t i = 0; i + 1 < pk.slopes.size(); ++i) {
            if (std::abs(pk.slopes[i + 1] - pk.target) >
                std::abs(pk.slopes[i] - pk.target) + 1e-12)
                pk.slopes_approach_target = false;
        }

        for (double beta : betas) {
            if (table.has_zcl(k, beta)) {
                double z = table.zcl_at(k, beta).value;
                double b = table.at(k, beta).value;
                pk.residual_ratio.push_back(z != 0.0 ? std::abs(b - z) / z
                                                     : kNaN);
            } else {
                pk.residual_ratio.push_back(kNaN);
            }
        }
        std::size_t half = betas.size() / 2;
        pk.residual_decreasing_top_half = true;
        for (std::size_t i = half; i + 1 < betas.size(); ++i) {
            if (!(pk.residual_ratio[i + 1] < pk.residual_ratio[i]) ||
                std::isnan(pk.residual_ratio[i]))
                pk.residual_decreasing_top_half = false;
        }
        report.per_k.push_back(std::move(pk));
    }
    return report;
}

}  // namespace cluvir
