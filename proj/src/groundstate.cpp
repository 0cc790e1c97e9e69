#include "cluvir/groundstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cluvir/graphs.hpp"

namespace cluvir {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double total_energy(const PairPotential& p, std::span<const double> coords,
                    int dimension) {
    int k = static_cast<int>(coords.size()) / dimension;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            double dist2 = 0.0;
            for (int a = 0; a < dimension; ++a) {
                double d = coords[i * dimension + a] - coords[j * dimension + a];
                dist2 += d * d;
            }
            double v = p.evaluate(std::sqrt(dist2));
            if (std::isinf(v)) return kInf;
            total += v;
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// 1-D oracle: dynamic programming over discretized ordered gaps.
// ---------------------------------------------------------------------------

namespace {

// Largest neighbor offset along the line that can still interact: the
// distance between particles i and i+j is at least j * r_hc.
int max_interacting_offset(const PairPotential& p) {
    int m = static_cast<int>(std::floor(p.range() / p.hard_core_radius()));
    while (m > 1 && (m * p.hard_core_radius()) >= p.range()) --m;
    return std::max(1, m);
}

std::vector<double> gap_grid(const PairPotential& p, double step) {
    double r_hc = p.hard_core_radius();
    double b = p.range();
    std::set<double> values;
    for (double r : p.breakpoints()) {
        if (r >= r_hc && r <= b) values.insert(r);
    }
    // Differences of breakpoints land window sums on breakpoints.
    auto bps = p.breakpoints();
    for (double r1 : bps) {
        for (double r2 : bps) {
            double d = r1 - r2;
            if (d >= r_hc && d <= b) values.insert(d);
        }
    }
    for (double g = r_hc; g < b; g += step) values.insert(g);
    values.insert(b);
    values.insert(b + r_hc);  // split sentinel: no interaction across it
    return {values.begin(), values.end()};
}

// Energy of an ordered chain given its gaps, with window interactions up
// to m_max neighbors.
double chain_energy(const PairPotential& p, const std::vector<double>& gaps,
                    int m_max) {
    double total = 0.0;
    int G = static_cast<int>(gaps.size());
    for (int i = 0; i < G; ++i) {
        double sum = 0.0;
        for (int j = i; j < std::min(G, i + m_max); ++j) {
            sum += gaps[j];
            double v = p.evaluate(sum);
            if (std::isinf(v)) return kInf;
            total += v;
        }
    }
    return total;
}

// Cyclic golden-section refinement of each gap; only useful for ramp
// pieces, constant pieces are already exact on the breakpoint grid.
void polish_gaps(const PairPotential& p, std::vector<double>& gaps,
                 double radius, int m_max) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double r_hc = p.hard_core_radius();
    double b = p.range();
    for (int sweep = 0; sweep < 4; ++sweep) {
        for (std::size_t i = 0; i < gaps.size(); ++i) {
            double lo = std::max(r_hc, gaps[i] - radius);
            double hi = std::min(b + r_hc, gaps[i] + radius);
            auto eval = [&](double g) {
                double old = gaps[i];
                gaps[i] = g;
                double e = chain_energy(p, gaps, m_max);
                gaps[i] = old;
                return e;
            };
            double x1 = hi - phi * (hi - lo);
            double x2 = lo + phi * (hi - lo);
            double f1 = eval(x1), f2 = eval(x2);
            for (int it = 0; it < 40; ++it) {
                if (f1 <= f2) {
                    hi = x2; x2 = x1; f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = eval(x1);
                } else {
                    lo = x1; x1 = x2; f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = eval(x2);
                }
            }
            double candidate = f1 <= f2 ? x1 : x2;
            if (eval(candidate) <= chain_energy(p, gaps, m_max))
                gaps[i] = candidate;
        }
    }
}

}  // namespace

OracleResult oracle_ground_state_1d(const PairPotential& p, int k,
                                    double grid_step) {
    if (p.dimension() != 1)
        throw std::invalid_argument("1-D oracle requires a 1-D potential");
    if (!p.has_hard_core())
        throw std::invalid_argument(
            "1-D oracle requires a hard core to bound the interaction offset");
    if (k < 1 || k > kOracleMaxParticles)
        throw std::invalid_argument("1-D oracle: k out of range");
    if (grid_step <= 0.0)
        throw std::invalid_argument("grid_step must be positive");

    OracleResult result;
    if (k == 1) {
        result.coords = {0.0};
        return result;
    }

    int m_max = max_interacting_offset(p);
    if (m_max > 3)
        throw std::invalid_argument(
            "1-D oracle: range exceeds three hard-core radii, grid DP "
            "infeasible");

    double step = grid_step;
    if (m_max == 3) {
        // Quadratic state space; cap the grid and rely on the polish.
        step = std::max(step, (p.range() - p.hard_core_radius()) / 220.0);
    }
    std::vector<double> grid = gap_grid(p, step);
    int n = static_cast<int>(grid.size());
    int G = k - 1;

    std::vector<double> vg(n);
    for (int i = 0; i < n; ++i) vg[i] = p.evaluate(grid[i]);

    std::vector<int> parent;  // parent[state + step*stride] reconstruction
    std::vector<int> best_path;
    double best = kInf;

    if (m_max == 1) {
        int arg = static_cast<int>(
            std::min_element(vg.begin(), vg.end()) - vg.begin());
        best = G * vg[arg];
        best_path.assign(G, arg);
    } else if (m_max == 2) {
        // dp[j] = min energy of a chain ending with gap j
        std::vector<double> dp = vg;
        std::vector<std::vector<int>> par(G, std::vector<int>(n, -1));
        for (int stepi = 1; stepi < G; ++stepi) {
            std::vector<double> next(n, kInf);
            for (int j = 0; j < n; ++j) {
                double base = vg[j];
                for (int i = 0; i < n; ++i) {
                    if (dp[i] == kInf) continue;
                    double e = dp[i] + base + p.evaluate(grid[i] + grid[j]);
                    if (e < next[j]) {
                        next[j] = e;
                        par[stepi][j] = i;
                    }
                }
            }
            dp.swap(next);
        }
        int arg = static_cast<int>(
            std::min_element(dp.begin(), dp.end()) - dp.begin());
        best = dp[arg];
        best_path.assign(G, 0);
        int cur = arg;
        for (int stepi = G - 1; stepi >= 0; --stepi) {
            best_path[stepi] = cur;
            if (stepi > 0) cur = par[stepi][cur];
        }
    } else {  // m_max == 3
        // dp[i][j]: chain ending with gaps (grid[i], grid[j])
        auto idx = [n](int i, int j) { return i * n + j; };
        std::vector<double> dp(static_cast<std::size_t>(n) * n, kInf);
        if (G == 1) {
            int arg = static_cast<int>(
                std::min_element(vg.begin(), vg.end()) - vg.begin());
            best = vg[arg];
            best_path = {arg};
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    dp[idx(i, j)] =
                        vg[i] + vg[j] + p.evaluate(grid[i] + grid[j]);
            std::vector<std::vector<int>> par;
            for (int stepi = 2; stepi < G; ++stepi) {
                std::vector<double> next(static_cast<std::size_t>(n) * n, kInf);
                par.emplace_back(static_cast<std::size_t>(n) * n, -1);
                for (int j = 0; j < n; ++j) {
                    for (int l = 0; l < n; ++l) {
                        double add2 = p.evaluate(grid[j] + grid[l]);
                        double base = vg[l] + add2;
                        for (int i = 0; i < n; ++i) {
                            double prev = dp[idx(i, j)];
                            if (prev == kInf) continue;
                            double e = prev + base +
                                       p.evaluate(grid[i] + grid[j] + grid[l]);
                            if (e < next[idx(j, l)]) {
                                next[idx(j, l)] = e;
                                par.back()[idx(j, l)] = i;
                            }
                        }
                    }
                }
                dp.swap(next);
            }
            int arg = static_cast<int>(
                std::min_element(dp.begin(), dp.end()) - dp.begin());
            best = dp[arg];
            best_path.assign(G, 0);
            int ci = arg / n, cj = arg % n;
            for (int stepi = G - 1; stepi >= 1; --stepi) {
                best_path[stepi] = cj;
                if (stepi >= 2) {
                    int pi = par[stepi - 2][idx(ci, cj)];
                    cj = ci;
                    ci = pi;
                } else {
                    best_path[0] = ci;
                }
            }
        }
    }

    if (!std::isfinite(best))
        throw std::runtime_error(
            "1-D oracle: no finite-energy configuration on the grid");

    result.gaps.resize(G);
    for (int i = 0; i < G; ++i) result.gaps[i] = grid[best_path[i]];
    if (!p.only_constant_pieces())
        polish_gaps(p, result.gaps, 2.0 * step, m_max);
    result.energy = chain_energy(p, result.gaps, m_max);
    result.coords.resize(k);
    result.coords[0] = 0.0;
    for (int i = 0; i < G; ++i)
        result.coords[i + 1] = result.coords[i] + result.gaps[i];
    return result;
}

// ---------------------------------------------------------------------------
// Multistart derivative-free optimizer.
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> structured_seeds(const PairPotential& p,
                                                  int k) {
    int d = p.dimension();
    std::vector<std::vector<double>> seeds;
    auto wells = p.negative_wells();
    std::vector<double> gap_choices;
    for (const auto& [r, v] : wells) {
        (void)v;
        gap_choices.push_back(r);
    }
    gap_choices.push_back(p.hard_core_radius());
    gap_choices.push_back(p.argmin_distance());

    if (d == 1) {
        for (double g : gap_choices) {
            std::vector<double> x(k);
            for (int i = 0; i < k; ++i) x[i] = i * g;
            seeds.push_back(std::move(x));
        }
        // Block chains: every gap is either the deepest-well distance or a
        // secondary join distance; all 2^{k-1} break patterns are cheap to
        // evaluate and cover dimer/trimer packings of every composition.
        if (wells.size() >= 2 && k <= 12) {
            double deep = wells[0].first;
            for (std::size_t join = 1; join < wells.size(); ++join) {
                double s = wells[join].first;
                for (std::uint32_t pattern = 1;
                     pattern < (1u << (k - 1)); ++pattern) {
                    std::vector<double> x(k);
                    x[0] = 0.0;
                    for (int i = 1; i < k; ++i) {
                        double g = ((pattern >> (i - 1)) & 1u) ? s : deep;
                        x[i] = x[i - 1] + g;
                    }
                    seeds.push_back(std::move(x));
                }
            }
        }
    } else if (d == 2) {
        for (double g : gap_choices) {
            // Triangular lattice patch: sites sorted by radius.
            std::vector<std::array<double, 2>> sites;
            for (int i = -k; i <= k; ++i) {
                for (int j = -k; j <= k; ++j) {
                    sites.push_back({g * (i + 0.5 * j),
                                     g * (std::sqrt(3.0) / 2.0) * j});
                }
            }
            std::sort(sites.begin(), sites.end(),
                      [](const auto& a, const auto& b) {
                          return a[0] * a[0] + a[1] * a[1] <
                                 b[0] * b[0] + b[1] * b[1];
                      });
            std::vector<double> x;
            for (int i = 0; i < k; ++i) {
                x.push_back(sites[i][0]);
                x.push_back(sites[i][1]);
            }
            seeds.push_back(std::move(x));
        }
    }
    return seeds;
}

double compass_polish(const PairPotential& p, std::vector<double>& x, int d,
                      const OptimizerSettings& s) {
    double energy = total_energy(p, x, d);
    double step = s.init_step * p.range();
    double min_step = s.min_step * p.range();
    int rounds = 0;
    while (step > min_step && rounds < s.polish_rounds * 20) {
        bool improved = false;
        for (std::size_t c = 0; c < x.size(); ++c) {
            for (double sign : {+1.0, -1.0}) {
                x[c] += sign * step;
                double e = total_energy(p, x, d);
                if (e < energy - 1e-15) {
                    energy = e;
                    improved = true;
                } else {
                    x[c] -= sign * step;
                }
            }
        }
        ++rounds;
        if (!improved) step *= 0.5;
    }
    return energy;
}

}  // namespace

GroundStateResult find_ground_state(const PairPotential& p, int k,
                                    const OptimizerSettings& settings) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!p.attractive_tail())
        throw std::invalid_argument(
            "find_ground_state requires an attractive tail");
    int d = p.dimension();
    GroundStateResult best;
    if (k == 1) {
        best.coords.assign(d, 0.0);
        return best;
    }

    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Rank structured seeds by raw energy, polish the most promising ones
    // plus every random restart.
    auto seeds = structured_seeds(p, k);
    std::stable_sort(seeds.begin(), seeds.end(),
                     [&](const auto& a, const auto& b) {
                         return total_energy(p, a, d) < total_energy(p, b, d);
                     });
    if (seeds.size() > 16) seeds.resize(16);
    double box = std::pow(static_cast<double>(k), 1.0 / d) * p.range();
    for (int r = 0; r < settings.restarts; ++r) {
        std::vector<double> x(static_cast<std::size_t>(k) * d);
        for (auto& c : x) c = box * unit(rng);
        seeds.push_back(std::move(x));
    }

    best.energy = kInf;
    for (auto& seed : seeds) {
        std::vector<double> x = seed;
        double e = compass_polish(p, x, d, settings);
        if (e < best.energy) {
            best.energy = e;
            best.coords = x;
        }
    }
    // Basin hops around the incumbent.
    std::normal_distribution<double> kick(0.0, 0.15 * p.hard_core_radius());
    for (int hop = 0; hop < settings.restarts / 2; ++hop) {
        if (!std::isfinite(best.energy)) break;
        std::vector<double> x = best.coords;
        for (auto& c : x) c += kick(rng);
        double e = compass_polish(p, x, d, settings);
        if (e < best.energy) {
            best.energy = e;
            best.coords = x;
        }
    }

    if (!std::isfinite(best.energy))
        throw std::runtime_error(
            "optimizer budget exhausted without a finite-energy configuration");
    best.connected = configuration_connected(best.coords, d, p.range());
    return best;
}

// ---------------------------------------------------------------------------
// Thresholds and table assembly.
// ---------------------------------------------------------------------------

ThresholdSet derive_thresholds(const std::vector<double>& energies,
                               const TailFitSettings& settings) {
    int K = static_cast<int>(energies.size()) - 1;
    if (K < 4)
        throw std::invalid_argument("derive_thresholds requires K >= 4");
    ThresholdSet t;

    t.e_inf_raw = kInf;
    for (int k = 1; k <= K; ++k)
        t.e_inf_raw = std::min(t.e_inf_raw, energies[k] / k);

    // Least-squares fit E_k ~ e_inf k + c k^{(d-1)/d} over the top ks.
    int count = std::max(2, static_cast<int>(std::ceil(K * settings.fit_fraction)));
    int k_lo = std::max(2, K - count + 1);
    double sxx = 0, sxy = 0, sxz = 0, szz = 0, szy = 0;
    double expo = (settings.dimension - 1.0) / settings.dimension;
    for (int k = k_lo; k <= K; ++k) {
        double xk = k;
        double zk = std::pow(static_cast<double>(k), expo);  // 1 when d = 1
        double yk = energies[k];
        sxx += xk * xk;
        sxy += xk * yk;
        sxz += xk * zk;
        szz += zk * zk;
        szy += zk * yk;
    }
    double det = sxx * szz - sxz * sxz;
    if (std::abs(det) < 1e-12)
        throw std::runtime_error("threshold fit failed: degenerate energies");
    t.e_inf_fit = (sxy * szz - sxz * szy) / det;
    t.surface_coeff = (sxx * szy - sxz * sxy) / det;

    t.nu_star = kInf;
    for (int k = 1; k <= K; ++k)
        t.nu_star = std::min(t.nu_star, energies[k] - k * t.e_inf_fit);

    t.mu_one = kInf;
    double second = kInf;
    for (int k = 2; k <= K; ++k) {
        double val = energies[k] / (k - 1);
        if (val < t.mu_one - settings.tol) {
            second = t.mu_one;
            t.mu_one = val;
            t.mu_one_minimizer_k = k;
        } else if (val < second) {
            second = val;
        }
    }
    t.mu_one_gap = second - t.mu_one;
    t.mu_one_unique = t.mu_one_gap > settings.tol;
    t.nu_one = -t.mu_one;
    t.polyatomic = t.mu_one < t.e_inf_fit - settings.tol;
    t.attractive_behavior = t.nu_star > settings.tol;
    return t;
}

std::vector<double> GroundStateTable::energies() const {
    std::vector<double> out(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) out[k] = entries[k].energy;
    return out;
}

GroundStateTable compute_ground_state_table(const PairPotential& p, int K,
                                            double oracle_grid_step,
                                            const OptimizerSettings& settings) {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    GroundStateTable table;
    table.dimension = p.dimension();
    table.K = K;
    table.entries.resize(K + 1);
    table.entries[1] = {1, 0.0, "exact",
                        std::vector<double>(p.dimension(), 0.0), true};

    bool oracle_ok = p.dimension() == 1 && p.has_hard_core() &&
                     p.range() < 4.0 * p.hard_core_radius();
    for (int k = 2; k <= K; ++k) {
        GroundStateEntry entry;
        entry.k = k;
        if (oracle_ok && k <= kOracleMaxParticles) {
            OracleResult r = oracle_ground_state_1d(p, k, oracle_grid_step);
            entry.energy = r.energy;
            entry.coords = r.coords;
            entry.method = "oracle_1d";
            entry.connected = configuration_connected(r.coords, 1, p.range());
        } else {
            GroundStateResult r = find_ground_state(p, k, settings);
            entry.energy = r.energy;
            entry.coords = r.coords;
            entry.method = "optimizer";
            entry.connected = r.connected;
        }
        table.entries[k] = std::move(entry);
    }

    if (K >= 4) {
        TailFitSettings fit;
        fit.dimension = p.dimension();
        table.thresholds = derive_thresholds(table.energies(), fit);
    } else {
        table.thresholds.e_inf_fit = kNaN;
        table.thresholds.e_inf_raw = kNaN;
        table.thresholds.nu_star = kNaN;
        table.thresholds.mu_one = kNaN;
        table.thresholds.nu_one = kNaN;
    }
    return table;
}

GroundStateTable table_from_energies(const std::vector<double>& energies,
                                     int dimension) {
    int K = static_cast<int>(energies.size()) - 1;
    if (K < 1) throw std::invalid_argument("need at least E_1");
    GroundStateTable table;
    table.dimension = dimension;
    table.K = K;
    table.entries.resize(K + 1);
    for (int k = 1; k <= K; ++k)
        table.entries[k] = {k, energies[k], "exact", {}, true};
    if (K >= 4) {
        TailFitSettings fit;
        fit.dimension = dimension;
        table.thresholds = derive_thresholds(energies, fit);
    }
    return table;
}

GluingReport gluing_check(const std::vector<double>& energies, double tol) {
    int K = static_cast<int>(energies.size()) - 1;
    GluingReport report;
    report.min_slack = kInf;
    for (int m = 1; m + 2 <= K; ++m) {
        for (int n = m; m + n + 1 <= K; ++n) {
            double lhs = energies[m + n + 1];
            double rhs = energies[m + 1] + energies[n + 1];
            double slack = rhs - lhs;
            report.min_slack = std::min(report.min_slack, slack);
            if (slack < -tol) {
                report.holds = false;
                report.violations.push_back({m, n, lhs, rhs});
            }
            if (slack <= tol) report.strict = false;
        }
    }
    if (!std::isfinite(report.min_slack)) {
        // Vacuous: nothing to test.
        report.min_slack = 0.0;
        report.strict = false;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

void write_ground_state_table(std::ostream& os, const GroundStateTable& t) {
    os << "# cluvir ground-state table\n";
    os << "dimension " << t.dimension << "\n";
    os << "K " << t.K << "\n";
    const auto& th = t.thresholds;
    os << "thresholds " << fmt(th.e_inf_fit) << ' ' << fmt(th.e_inf_raw) << ' '
       << fmt(th.surface_coeff) << ' ' << fmt(th.nu_star) << ' '
       << fmt(th.mu_one) << ' ' << fmt(th.nu_one) << ' '
       << th.mu_one_minimizer_k << ' ' << (th.mu_one_unique ? 1 : 0) << ' '
       << fmt(th.mu_one_gap) << ' ' << (th.polyatomic ? 1 : 0) << ' '
       << (th.attractive_behavior ? 1 : 0) << "\n";
    for (int k = 1; k <= t.K; ++k) {
        const auto& e = t.entries[k];
        os << "entry " << e.k << ' ' << fmt(e.energy) << ' ' << e.method << ' '
           << (e.connected ? 1 : 0);
        for (double c : e.coords) os << ' ' << fmt(c);
        os << "\n";
    }
}

GroundStateTable read_ground_state_table(std::istream& is) {
    GroundStateTable t;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "dimension") {
            ss >> t.dimension;
        } else if (tag == "K") {
            ss >> t.K;
            t.entries.resize(t.K + 1);
        } else if (tag == "thresholds") {
            auto& th = t.thresholds;
            int unique = 0, poly = 0, attr = 0;
            ss >> th.e_inf_fit >> th.e_inf_raw >> th.surface_coeff >>
                th.nu_star >> th.mu_one >> th.nu_one >> th.mu_one_minimizer_k >>
                unique >> th.mu_one_gap >> poly >> attr;
            th.mu_one_unique = unique;
            th.polyatomic = poly;
            th.attractive_behavior = attr;
        } else if (tag == "entry") {
            GroundStateEntry e;
            int connected = 1;
            ss >> e.k >> e.energy >> e.method >> connected;
            e.connected = connected;
            double c;
            while (ss >> c) e.coords.push_back(c);
            if (e.k >= 1 && e.k < static_cast<int>(t.entries.size()))
                t.entries[e.k] = std::move(e);
        } else {
            throw std::runtime_error("ground-state table: unknown tag " + tag);
        }
    }
    if (t.K == 0) throw std::runtime_error("ground-state table: empty input");
    return t;
}

}  // namespace cluvir
