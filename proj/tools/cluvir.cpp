// cluvir: batch front-end for the cluster/virial expansion library.
//
// Subcommands: groundstate, mayer, virial, thermo, verify. Tables go to
// CSV, scalar reports to JSON. Bodies are deterministic for a fixed
// config and seed; timestamps live only on '#' comment lines.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <array>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cluvir/config.hpp"
#include "cluvir/graphs.hpp"
#include "cluvir/groundstate.hpp"
#include "cluvir/mayer.hpp"
#include "cluvir/potential.hpp"
#include "cluvir/thermo.hpp"
#include "cluvir/virial.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cluvir;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCriterionFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string header_comment(const std::string& command) {
    return "cluvir " + command + " generated " + timestamp();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot write " + path.string());
    os << text;
}

void write_json_file(const fs::path& path, const json& j,
                     const std::string& command) {
    json wrapped = j;
    wrapped["generated"] = timestamp();
    wrapped["command"] = command;
    write_text_file(path, wrapped.dump(2) + "\n");
}

json thresholds_json(const GroundStateTable& table) {
    const auto& th = table.thresholds;
    json j;
    j["K"] = table.K;
    j["dimension"] = table.dimension;
    j["e_inf_fit"] = th.e_inf_fit;
    j["e_inf_raw"] = th.e_inf_raw;
    j["surface_coeff"] = th.surface_coeff;
    j["nu_star"] = th.nu_star;
    j["mu_one"] = th.mu_one;
    j["nu_one"] = th.nu_one;
    j["mu_one_minimizer_k"] = th.mu_one_minimizer_k;
    j["mu_one_unique"] = th.mu_one_unique;
    j["mu_one_gap"] = th.mu_one_gap;
    j["polyatomic"] = th.polyatomic;
    j["attractive_behavior"] = th.attractive_behavior;
    if (table.K >= 3) {
        GluingReport g = gluing_check(table.energies());
        j["gluing"] = {{"holds", g.holds},
                       {"strict", g.strict},
                       {"min_slack", g.min_slack},
                       {"violations", g.violations.size()}};
    }
    return j;
}

GroundStateTable load_gs(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::invalid_argument("cannot open ground-state table: " + path);
    return read_ground_state_table(is);
}

MayerTable load_mayer(const std::string& mayer_path,
                      const std::string& zcl_path) {
    std::ifstream is(mayer_path);
    if (!is)
        throw std::invalid_argument("cannot open Mayer table: " + mayer_path);
    std::vector<MayerEntry> rows = read_mayer_csv(is);
    std::vector<MayerEntry> zcl;
    if (!zcl_path.empty()) {
        std::ifstream zs(zcl_path);
        if (zs) zcl = read_mayer_csv(zs);
    }
    if (rows.empty())
        throw std::invalid_argument("empty Mayer table: " + mayer_path);
    return mayer_table_from_entries(rows, zcl);
}

// ---------------------------------------------------------------------------
// groundstate
// ---------------------------------------------------------------------------

int cmd_groundstate(const RunConfig& cfg) {
    const PairPotential& p = *cfg.potential;
    GroundStateTable table =
        compute_ground_state_table(p, cfg.K, cfg.oracle_step);
    fs::create_directories(cfg.out_dir);

    std::ostringstream os;
    os << "# " << header_comment("groundstate") << "\n";
    write_ground_state_table(os, table);
    write_text_file(fs::path(cfg.out_dir) / "groundstate.txt", os.str());

    json j = thresholds_json(table);
    PotentialReport report = analyze_potential(
        p, table.K >= 4 ? table.thresholds.e_inf_fit
                        : std::numeric_limits<double>::quiet_NaN());
    j["potential"] = {{"has_hard_core", report.has_hard_core},
                      {"attractive_tail", report.attractive_tail},
                      {"continuous_on_core_boundary",
                       report.continuous_on_core_boundary},
                      {"v_norm", report.v_norm},
                      {"stability_constant_estimate",
                       report.stability_constant_estimate}};
    write_json_file(fs::path(cfg.out_dir) / "thresholds.json", j,
                    "groundstate");
    std::cout << "groundstate: wrote " << cfg.out_dir
              << "/groundstate.txt (K = " << cfg.K << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// mayer
// ---------------------------------------------------------------------------

int cmd_mayer(const RunConfig& cfg, const std::string& gs_path) {
    const PairPotential& p = *cfg.potential;
    QuadratureSettings qs;
    qs.nodes_per_interval = cfg.quad_nodes;
    qs.target_rel_error = cfg.quad_tol;
    qs.max_k = std::max(qs.max_k, cfg.K);

    bool quad = cfg.method == "quadrature" || cfg.method == "both";
    bool mc = cfg.method == "monte_carlo" || cfg.method == "both";
    if (quad && p.dimension() != 1)
        throw std::invalid_argument(
            "quadrature requires d = 1; use method = monte_carlo");

    std::vector<MayerEntry> rows, zcl_rows;
    for (double beta : cfg.beta_grid) {
        for (int k = 1; k <= cfg.K; ++k) {
            if (k == 1) {
                rows.push_back({1, beta, 1.0, 0.0, "convention"});
                continue;
            }
            if (quad) {
                Estimate est = b_k_quadrature(p, k, beta, qs);
                rows.push_back({k, beta, est.value, est.error, "quadrature"});
            }
            if (mc) {
                Estimate est =
                    b_k_monte_carlo(p, k, beta, cfg.samples, *cfg.seed);
                rows.push_back({k, beta, est.value, est.error, "monte_carlo"});
            }
            if (cfg.with_zcl) {
                Estimate est =
                    p.dimension() == 1
                        ? z_cluster(p, k, beta, ClusterMethod::Quadrature, qs)
                        : z_cluster(p, k, beta, ClusterMethod::MonteCarlo, qs,
                                    cfg.samples, cfg.seed.value_or(1));
                zcl_rows.push_back({k, beta, est.value, est.error,
                                    p.dimension() == 1 ? "zcl_quadrature"
                                                       : "zcl_monte_carlo"});
            }
        }
    }

    fs::create_directories(cfg.out_dir);
    {
        std::ostringstream os;
        write_mayer_csv(os, rows, header_comment("mayer"));
        write_text_file(fs::path(cfg.out_dir) / "mayer.csv", os.str());
    }
    if (cfg.with_zcl) {
        std::ostringstream os;
        write_mayer_csv(os, zcl_rows, header_comment("mayer zcl"));
        write_text_file(fs::path(cfg.out_dir) / "zcl.csv", os.str());
    }

    if (!gs_path.empty()) {
        GroundStateTable gs = load_gs(gs_path);
        MayerTable table = mayer_table_from_entries(rows, zcl_rows);
        if (table.beta_grid().size() >= 3) {
            MayltReport rep = maylt_diagnostic(table, gs);
            json j;
            j["beta_grid"] = table.beta_grid();
            json per_k = json::array();
            for (const auto& pk : rep.per_k) {
                per_k.push_back(
                    {{"k", pk.k},
                     {"target", pk.target},
                     {"first_positive_beta", pk.first_positive_beta},
                     {"slopes", pk.slopes},
                     {"slopes_approach_target", pk.slopes_approach_target},
                     {"residual_ratio", pk.residual_ratio},
                     {"residual_decreasing_top_half",
                      pk.residual_decreasing_top_half},
                     {"note", pk.note}});
            }
            j["per_k"] = per_k;
            write_json_file(fs::path(cfg.out_dir) / "maylt.json", j, "mayer");
        }
    }
    std::cout << "mayer: wrote " << cfg.out_dir << "/mayer.csv ("
              << rows.size() << " rows)\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// virial
// ---------------------------------------------------------------------------

int cmd_virial(const RunConfig& cfg, const std::string& mayer_path,
               const std::string& zcl_path, const std::string& gs_path) {
    MayerTable mayer = load_mayer(mayer_path, zcl_path);
    int N = cfg.N > 0 ? std::min(cfg.N, mayer.max_k()) : mayer.max_k();
    if (N < 2)
        throw std::invalid_argument("virial needs b_2 in the Mayer table");

    VirialTable table = build_virial_table(mayer, N);
    if (cfg.consistency) {
        for (const auto& e : table.entries) {
            double lhs = e.c_n;
            double rhs = -(e.n - 1) * e.d_n;
            double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
            if (std::abs(lhs - rhs) > 1e-9 * scale) {
                std::cerr << "virial: transform/inversion mismatch at n = "
                          << e.n << ", beta = " << e.beta << "\n";
                return kExitCriterionFailure;
            }
        }
    }

    fs::create_directories(cfg.out_dir);
    {
        std::ostringstream os;
        write_virial_csv(os, table, header_comment("virial"));
        write_text_file(fs::path(cfg.out_dir) / "virial.csv", os.str());
    }

    if (!gs_path.empty()) {
        GroundStateTable gs = load_gs(gs_path);
        double v_norm = cfg.potential ? cfg.potential->v_norm()
                                      : std::numeric_limits<double>::quiet_NaN();
        json jradius = json::array();
        json jroot = json::array();
        for (double beta : mayer.beta_grid()) {
            std::vector<double> b = mayer.column(beta, N);
            if (std::isfinite(v_norm)) {
                RadiusBounds rb = radius_bounds(b, gs, beta, v_norm);
                json pk = json::array();
                for (auto& [k, est] : rb.penrose_upper_per_k)
                    pk.push_back({{"k", k}, {"estimate", est}});
                jradius.push_back({{"beta", beta},
                                   {"lower", rb.lower},
                                   {"penrose_per_k", pk},
                                   {"penrose_min", rb.penrose_min},
                                   {"ratio_estimate", rb.ratio_estimate},
                                   {"note", rb.note}});
            }
            if (b.size() > 2 && b[2] > 0.0) {
                try {
                    RhoZeroRoot root = find_drho_dz_root(b, beta);
                    jroot.push_back({{"beta", beta},
                                     {"z0", root.z0},
                                     {"predicted", root.predicted},
                                     {"deviation", root.deviation},
                                     {"rho_at_z0", root.rho_at_z0}});
                } catch (const std::runtime_error& err) {
                    // No real root nearby (possible outside the diatomic
                    // regime): report, keep going.
                    jroot.push_back({{"beta", beta}, {"error", err.what()}});
                }
            }
        }
        if (!jradius.empty())
            write_json_file(fs::path(cfg.out_dir) / "radius.json",
                            json{{"per_beta", jradius}}, "virial");
        if (!jroot.empty())
            write_json_file(fs::path(cfg.out_dir) / "rhozero.json",
                            json{{"per_beta", jroot}}, "virial");

        try {
            SignPatternReport rep = sign_pattern(table, gs, &mayer);
            json per_k = json::array();
            for (const auto& pk : rep.per_k) {
                per_k.push_back({{"k", pk.k},
                                 {"sign_top", pk.sign_top},
                                 {"slope_top", pk.slope_top},
                                 {"target", pk.target},
                                 {"sign_ok", pk.sign_ok},
                                 {"slope_ok", pk.slope_ok},
                                 {"ratio_d_over_b_top",
                                  pk.ratio_d_over_b_top}});
            }
            json j;
            j["regime"] = rep.regime == SignRegime::Gluing ? "gluing"
                                                           : "diatomic";
            j["per_k"] = per_k;
            j["eksin_ok"] = rep.eksin_ok;
            j["eksin_strict"] = rep.eksin_strict;
            j["vircon_lemma_ok"] = rep.vircon_lemma_ok;
            j["notes"] = rep.notes;
            write_json_file(fs::path(cfg.out_dir) / "signs.json", j, "virial");
        } catch (const std::runtime_error& err) {
            write_json_file(fs::path(cfg.out_dir) / "signs.json",
                            json{{"regime", "undetermined"},
                                 {"error", err.what()}},
                            "virial");
        }
    }
    std::cout << "virial: wrote " << cfg.out_dir << "/virial.csv (n <= " << N
              << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// thermo
// ---------------------------------------------------------------------------

int cmd_thermo(const RunConfig& cfg, const std::string& gs_path,
               const std::string& mayer_path, const std::string& zcl_path,
               double mu, bool mu_given) {
    GroundStateTable gs = load_gs(gs_path);
    MayerTable mayer = load_mayer(mayer_path, zcl_path);
    double v_norm = cfg.potential ? cfg.potential->v_norm()
                                  : std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(v_norm))
        throw std::invalid_argument("thermo requires --potential for |||v|||");
    int N = cfg.N > 0 ? std::min(cfg.N, mayer.max_k()) : mayer.max_k();
    fs::create_directories(cfg.out_dir);

    // Appendix-A curves over a mu/nu grid around the thresholds.
    {
        std::ostringstream os;
        os << "# " << header_comment("thermo appendix-a") << "\n";
        os << "kind,x,value,n_minimizers,label\n";
        const auto& th = gs.thresholds;
        double mu_lo = th.mu_one - 2.0 * (std::abs(th.mu_one) + 1.0);
        char buf[160];
        for (int i = 0; i <= 200; ++i) {
            double x = mu_lo + (th.e_inf_fit - mu_lo) * i / 200.0;
            VariationalValue nv = nu_of_mu(gs, x);
            std::snprintf(buf, sizeof buf, "nu_of_mu,%.17g,%.17g,%zu,%s\n", x,
                          nv.value, nv.minimizers.size(),
                          to_string(classify_mu(gs, x)).c_str());
            os << buf;
        }
        for (int i = 0; i <= 200; ++i) {
            double x = 2.0 * th.nu_one * i / 200.0;
            VariationalValue mv = mu_of_nu(gs, x);
            std::snprintf(buf, sizeof buf, "mu_of_nu,%.17g,%.17g,%zu,%s\n", x,
                          mv.value,
                          mv.no_finite_minimizer
                              ? static_cast<std::size_t>(0)
                              : mv.minimizers.size(),
                          to_string(classify_nu(gs, x)).c_str());
            os << buf;
        }
        write_text_file(fs::path(cfg.out_dir) / "appendix_a.csv", os.str());
    }

    // Crossover scan at fixed mu.
    if (mu_given) {
        CrossoverReport rep =
            crossover_scan(mayer, gs, mayer.beta_grid(), mu, N, v_norm);
        std::ostringstream os;
        os << "# " << header_comment("thermo crossover") << "\n";
        os << "beta,mu_or_nu,value,target,label\n";
        char buf[200];
        for (const auto& pt : rep.points) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s\n",
                          pt.beta, mu, pt.log_rho_rate, pt.target,
                          pt.certified ? "certified" : "uncertified");
            os << buf;
        }
        write_text_file(fs::path(cfg.out_dir) / "crossover.csv", os.str());

        json j;
        j["mu"] = mu;
        j["k_mu"] = rep.k_mu;
        j["k_unique"] = rep.k_unique;
        j["rate_trend_ok"] = rep.rate_trend_ok;
        j["ratio_trend_ok"] = rep.ratio_trend_ok;
        json pts = json::array();
        for (const auto& pt : rep.points)
            pts.push_back({{"beta", pt.beta},
                           {"rho", pt.rho},
                           {"log_rho_rate", pt.log_rho_rate},
                           {"target", pt.target},
                           {"pressure_ratio", pt.pressure_ratio},
                           {"certified", pt.certified}});
        j["points"] = pts;
        write_json_file(fs::path(cfg.out_dir) / "crossover.json", j, "thermo");
    }

    // Figure-1 style density-axis data: radius estimates per beta.
    {
        json per_beta = json::array();
        std::vector<std::array<double, 6>> csv_rows;
        VirialTable vt = build_virial_table(mayer, std::max(2, N));
        for (double beta : mayer.beta_grid()) {
            std::vector<double> b = mayer.column(beta, N);
            json row;
            row["beta"] = beta;
            row["exp_beta_nu_star"] =
                std::exp(-beta * gs.thresholds.nu_star);
            try {
                RadiusBounds rb = radius_bounds(b, gs, beta, v_norm);
                row["r_may_lower"] = rb.lower;
                row["r_may_ratio_estimate"] = rb.ratio_estimate;
                row["penrose_min"] = rb.penrose_min;
                if (std::isfinite(rb.ratio_estimate)) {
                    RhoMayEstimate rme = rho_may_estimate(
                        mayer, beta, rb.ratio_estimate, "ratio-test");
                    row["rho_may_estimate"] = rme.rho;
                }
            } catch (const std::exception& e) {
                row["radius_error"] = e.what();
            }
            // coefficient-level virial radius: top ratio |c_{n-1}/c_n|
            double r_vir = std::numeric_limits<double>::quiet_NaN();
            for (int n = vt.max_n(); n >= 3; --n) {
                if (vt.has(n, beta) && vt.has(n - 1, beta)) {
                    double cn = vt.at(n, beta).c_n;
                    double cp = vt.at(n - 1, beta).c_n;
                    if (cn != 0.0 && cp != 0.0) {
                        r_vir = std::abs(cp / cn);
                        break;
                    }
                }
            }
            row["r_vir_ratio_estimate"] = r_vir;
            csv_rows.push_back({beta,
                                row.value("r_may_lower", 0.0),
                                row.value("r_may_ratio_estimate", 0.0),
                                row.value("penrose_min", 0.0),
                                row.value("rho_may_estimate", 0.0), r_vir});
            per_beta.push_back(row);
        }
        if (cfg.format == "csv") {
            std::ostringstream os;
            os << "# " << header_comment("thermo figure1") << "\n";
            os << "beta,r_may_lower,r_may_ratio_estimate,penrose_min,"
                  "rho_may_estimate,r_vir_ratio_estimate\n";
            char buf[220];
            for (const auto& r : csv_rows) {
                std::snprintf(buf, sizeof buf,
                              "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r[0],
                              r[1], r[2], r[3], r[4], r[5]);
                os << buf;
            }
            write_text_file(fs::path(cfg.out_dir) / "figure1.csv", os.str());
        } else {
            write_json_file(fs::path(cfg.out_dir) / "figure1.json",
                            json{{"per_beta", per_beta}}, "thermo");
        }
    }
    std::cout << "thermo: wrote " << cfg.out_dir << "/appendix_a.csv\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct Check {
    std::string group;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Independent partition counter (shares no code with composition_vectors).
long partitions_of(int n) {
    std::vector<long> table(n + 1, 0);
    table[0] = 1;
    for (int part = 1; part <= n; ++part)
        for (int s = part; s <= n; ++s) table[s] += table[s - part];
    return table[n];
}

std::vector<Check> verify_checks(const std::string& groups,
                                 const std::string& inject_fault) {
    std::vector<Check> checks;
    auto selected = [&](const std::string& g) {
        return groups == "all" || groups.find(g) != std::string::npos;
    };
    auto push = [&](const std::string& group, const std::string& name,
                    bool pass, const std::string& detail) {
        checks.push_back({group, name, pass, detail});
    };

    auto sq = make_builtin(BuiltinKind::SquareWell);
    auto tw = make_builtin(BuiltinKind::TwoWell);

    if (selected("combinatorics")) {
        {
            const long expected[] = {0, 1, 1, 4, 38, 728, 26704};
            bool ok = true;
            std::ostringstream d;
            for (int k = 1; k <= 6; ++k) {
                long got = static_cast<long>(connected_graphs(k).size());
                ok = ok && got == expected[k];
                d << "k" << k << "=" << got << " ";
            }
            push("combinatorics", "connected graph counts", ok, d.str());
        }
        {
            const long expected[] = {0, 0, 1, 1, 10, 238, 11368};
            bool ok = true;
            for (int k = 2; k <= 6; ++k) {
                ok = ok && static_cast<long>(biconnected_graphs(k).size()) ==
                               expected[k];
                for (const auto& g : biconnected_graphs(k))
                    ok = ok && is_connected(g);
            }
            push("combinatorics", "biconnected graph counts", ok, "");
        }
        {
            bool ok = true;
            for (int n = 2; n <= 12; ++n)
                ok = ok && static_cast<long>(composition_vectors(n).size()) ==
                               partitions_of(n - 1);
            push("combinatorics", "composition vectors = partitions", ok, "");
        }
        {
            bool ok = true;
            for (int n = 2; n <= 12; ++n) {
                for (const auto& mv : composition_vectors(n)) {
                    Rational a = a_coefficient(mv);
                    ok = ok && a > 0;
                    if (mv.m_of(n) == 1 && mv.weight() == 1) ok = ok && a == 1;
                }
            }
            CompositionVector m3{3, {2, 0}};
            CompositionVector m4{4, {3, 0, 0}};
            ok = ok && a_coefficient(m3) == 2;
            ok = ok && a_coefficient(m4) == Rational(20, 3);
            push("combinatorics", "a-coefficients exact and positive", ok, "");
        }
        {
            // transform vs inversion identity, 100 random vectors
            std::mt19937_64 rng(12345);
            std::uniform_real_distribution<double> uni(-2.0, 2.0);
            bool ok = true;
            double worst = 0.0;
            for (int trial = 0; trial < 100 && ok; ++trial) {
                std::vector<double> b(9, 0.0);
                b[1] = 1.0;
                for (int k = 2; k <= 8; ++k) b[k] = uni(rng);
                std::vector<double> c = invert_density_series(b);
                for (int n = 2; n <= 8; ++n) {
                    // local evaluation of the composition-vector sum
                    long double dn = 0.0L;
                    for (const auto& mv : composition_vectors(n)) {
                        long double term =
                            a_coefficient(mv).convert_to<double>();
                        if (inject_fault == "acoeff" && n == 4 &&
                            mv.m_of(2) == 3)
                            term *= 1.000001L;  // corrupt one coefficient
                        for (int j = 2; j <= n; ++j)
                            for (int q = 0; q < mv.m_of(j); ++q) term *= b[j];
                        term *= (mv.weight() - 1) % 2 == 0 ? 1 : -1;
                        dn += term;
                    }
                    double lib = virial_from_mayer(b, n);
                    double rel1 = std::abs(static_cast<double>(dn) - lib) /
                                  std::max(1.0, std::abs(lib));
                    double rhs = -(n - 1) * static_cast<double>(dn);
                    double rel2 =
                        std::abs(c[n] - rhs) /
                        std::max({1.0, std::abs(c[n]), std::abs(rhs)});
                    worst = std::max(worst, std::max(rel1, rel2));
                    ok = ok && rel1 <= 1e-9 && rel2 <= 1e-9;
                }
            }
            std::ostringstream d;
            d << "worst rel = " << worst;
            push("combinatorics", "transform vs inversion identity", ok,
                 d.str());
        }
    }

    if (selected("potential")) {
        bool ok = std::isinf(sq.evaluate(0.5)) && sq.evaluate(1.2) == -1.0 &&
                  sq.evaluate(2.0) == 0.0 &&
                  std::abs(sq.v_norm() - 3.0) < 1e-12;
        push("potential", "square-well closed forms", ok, "");
        PotentialReport rep = analyze_potential(tw, -2.15);
        push("potential", "fixture report invariants",
             rep.attractive_tail && rep.has_hard_core &&
                 rep.v_norm > ball_volume(1, tw.hard_core_radius()),
             "");
    }

    if (selected("groundstate")) {
        {
            bool ok = true;
            for (int k = 2; k <= 8; ++k) {
                double e = oracle_ground_state_1d(sq, k, 0.01).energy;
                ok = ok && std::abs(e + (k - 1)) < 1e-9;
            }
            push("groundstate", "square-well oracle E_k = -(k-1)", ok, "");
        }
        {
            GroundStateTable t = compute_ground_state_table(tw, 8, 0.005);
            bool ok = std::abs(t.energy(2) + 4.0) < 1e-9 &&
                      std::abs(t.energy(4) + 8.25) < 1e-9 &&
                      t.thresholds.polyatomic && t.thresholds.mu_one_unique &&
                      t.thresholds.mu_one_minimizer_k == 2;
            push("groundstate",
                 "two-well fixture verified (mu1 = E_2 < e_inf)", ok, "");
            GluingReport g = gluing_check(t.energies());
            push("groundstate", "two-well gluing fails (polyatomic)", !g.holds,
                 "");
        }
        {
            std::vector<double> E(9, 0.0);
            for (int k = 1; k <= 8; ++k) E[k] = -(k - 1.0);
            GluingReport g = gluing_check(E);
            push("groundstate", "square-well gluing holds with equality",
                 g.holds && !g.strict, "");
        }
    }

    if (selected("mayer")) {
        {
            bool ok = true;
            double worst = 0.0;
            for (double beta : {1.0, 2.0, 4.0, 8.0}) {
                double closed = -1.0 + 0.5 * std::expm1(beta);
                double got = b_k_quadrature(sq, 2, beta).value;
                double rel = std::abs(got - closed) / std::abs(closed);
                worst = std::max(worst, rel);
                ok = ok && rel <= 1e-10;
            }
            std::ostringstream d;
            d << "worst rel = " << worst;
            push("mayer", "b_2 closed form (quadrature)", ok, d.str());
        }
        {
            double z2 = z_cluster(sq, 2, 1.0, ClusterMethod::Quadrature).value;
            push("mayer", "Z_2^cl closed form",
                 std::abs(z2 - std::exp(1.0) / 2.0) < 1e-12, "");
        }
        {
            Estimate a = b_k_monte_carlo(sq, 2, 1.0, 50000, 31);
            Estimate b = b_k_monte_carlo(sq, 2, 1.0, 50000, 31);
            double closed = -1.0 + 0.5 * std::expm1(1.0);
            bool ok = a.value == b.value && a.error == b.error &&
                      std::abs(a.value - closed) <= 3.0 * a.error;
            push("mayer", "Monte Carlo determinism and 3-sigma check", ok, "");
        }
    }

    if (selected("virial")) {
        {
            GroundStateTable t =
                table_from_energies({0, 0, -1, -2, -3, -4, -5, -6, -7});
            std::vector<double> b{0, 1, 1, 0, 0};
            RadiusBounds rb = radius_bounds(b, t, 1.0, 3.0);
            double expected = 1.0 / (3.0 * std::exp(2.0));
            push("virial", "Eq. maycrit-style lower bound plug-in",
                 std::abs(rb.lower - expected) < 1e-12, "");
        }
        {
            double r = remainder_bound(-1.0, 3.0, 1.0, 0.01);
            bool ok =
                std::abs(r - (std::exp(1.0) - 1.0) * std::exp(1.0)) < 1e-12;
            bool threw = false;
            try {
                remainder_bound(-1.0, 3.0, 1.0, 1.0);
            } catch (const std::domain_error&) {
                threw = true;
            }
            push("virial", "remainder bound value and disk guard", ok && threw,
                 "");
        }
        {
            std::vector<double> b{0, 1, 1, 0, 0};
            RhoZeroRoot root = find_drho_dz_root(b, 1.0);
            push("virial", "d rho / d z root, pure quadratic",
                 std::abs(root.z0 + 0.25) < 1e-12 &&
                     std::abs(root.rho_at_z0) > 0.0,
                 "");
        }
    }

    if (selected("thermo")) {
        GroundStateTable t =
            table_from_energies({0, 0, -1, -2, -3, -4, -5, -6, -7});
        {
            bool ok = true;
            for (int i = 0; i <= 100; ++i) {
                double nu = 2.0 * i / 100.0;
                VariationalValue mv = mu_of_nu(t, nu);
                if (nu < t.thresholds.nu_star - 1e-9)
                    ok = ok && mv.no_finite_minimizer &&
                         std::abs(mv.value - t.thresholds.e_inf_fit) < 1e-12;
            }
            for (int i = 1; i <= 100; ++i) {
                double mu = -3.0 + 2.0 * i / 100.0;
                VariationalValue nv = nu_of_mu(t, mu);
                if (nv.value >= t.thresholds.nu_star) {
                    VariationalValue back = mu_of_nu(t, nv.value);
                    ok = ok && std::abs(back.value - mu) < 1e-12;
                }
            }
            push("thermo", "Appendix A plateau and reciprocity", ok, "");
        }
        {
            GroundStateTable tw_table =
                compute_ground_state_table(tw, 8, 0.005);
            double mu_mid = 0.5 * (tw_table.thresholds.mu_one +
                                   tw_table.thresholds.e_inf_fit);
            bool ok = classify_mu(tw_table, mu_mid) == Region::Polyatomic &&
                      classify_nu(tw_table,
                                  0.5 * tw_table.thresholds.nu_star) ==
                          Region::NoFiniteMinimizer &&
                      classify_mu(t, -2.0) == Region::Monatomic;
            push("thermo", "phase-region labels", ok, "");
        }
    }

    return checks;
}

int cmd_verify(const RunConfig& cfg) {
    std::vector<Check> checks = verify_checks(cfg.criteria, cfg.inject_fault);
    if (checks.empty())
        throw std::invalid_argument("no checks selected by --criteria=" +
                                    cfg.criteria);
    bool all_ok = true;
    json jchecks = json::array();
    for (const auto& c : checks) {
        all_ok = all_ok && c.pass;
        std::printf("[%s] %s / %s%s%s\n", c.pass ? "PASS" : "FAIL",
                    c.group.c_str(), c.name.c_str(),
                    c.detail.empty() ? "" : " -- ", c.detail.c_str());
        jchecks.push_back({{"group", c.group},
                           {"name", c.name},
                           {"pass", c.pass},
                           {"detail", c.detail}});
    }
    fs::create_directories(cfg.out_dir);
    write_json_file(fs::path(cfg.out_dir) / "verify.json",
                    json{{"checks", jchecks}, {"all_pass", all_ok}}, "verify");
    std::printf("verify: %s\n", all_ok ? "all checks passed" : "FAILURES");
    return all_ok ? kExitOk : kExitCriterionFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "cluvir: Mayer and virial expansions of a classical gas at low "
        "temperature"};
    app.require_subcommand(1);

    std::string config_path, potential_spec, beta_grid_text;
    std::string gs_path, mayer_path, zcl_path;
    std::string out_dir, method, format, criteria, inject_fault;
    int kmax = 0, order = 0, quad_nodes = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    double oracle_step = 0.0, mu = 0.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "config file with [potential]/[grid]/[sampler]/"
                        "[output] sections");
        cmd->add_option("--potential", potential_spec,
                        "builtin spec (e.g. square_well:r_hc=1,b=1.5,depth=1) "
                        "or potential config file");
        cmd->add_option("--out", out_dir, "output directory (default: out)");
        cmd->add_option("--format", format, "csv or json for scalar reports");
    };

    CLI::App* c_gs = app.add_subcommand(
        "groundstate", "ground-state energies E_1..E_K and thresholds");
    add_common(c_gs);
    c_gs->add_option("--kmax", kmax, "max cluster size K");
    c_gs->add_option("--oracle-step", oracle_step,
                     "gap grid step of the 1-D oracle");

    CLI::App* c_mayer = app.add_subcommand(
        "mayer", "Mayer coefficients b_k(beta) and Z_k^cl over a beta grid");
    add_common(c_mayer);
    c_mayer->add_option("--beta-grid", beta_grid_text,
                        "comma-separated beta values");
    c_mayer->add_option("--kmax", kmax, "max cluster size K");
    c_mayer->add_option("--method", method, "quadrature | monte_carlo | both");
    c_mayer->add_option("--samples", samples, "Monte Carlo samples");
    c_mayer->add_option("--seed", seed, "Monte Carlo seed");
    c_mayer->add_option("--quad-nodes", quad_nodes,
                        "Gauss-Legendre nodes per sub-interval");
    c_mayer->add_option("--gs", gs_path,
                        "ground-state table file for the maylt diagnostic");
    bool no_zcl = false;
    c_mayer->add_flag("--no-zcl", no_zcl, "skip Z_k^cl computation");

    CLI::App* c_virial = app.add_subcommand(
        "virial", "virial coefficients d_n, c_n from a Mayer table");
    add_common(c_virial);
    c_virial->add_option("--mayer", mayer_path, "Mayer CSV file");
    c_virial->add_option("--zcl", zcl_path, "Z_k^cl CSV file");
    c_virial->add_option("--gs", gs_path, "ground-state table file");
    c_virial->add_option("--order", order, "max series order N");
    bool no_consistency = false;
    c_virial->add_flag("--no-consistency", no_consistency,
                       "skip the c_n = -(n-1) d_n assertion");

    CLI::App* c_thermo = app.add_subcommand(
        "thermo",
        "variational curves, phase labels, crossover scan, figure data");
    add_common(c_thermo);
    c_thermo->add_option("--gs", gs_path, "ground-state table file");
    c_thermo->add_option("--mayer", mayer_path, "Mayer CSV file");
    c_thermo->add_option("--zcl", zcl_path, "Z_k^cl CSV file");
    c_thermo->add_option("--order", order, "series truncation order");
    CLI::Option* mu_opt =
        c_thermo->add_option("--mu", mu, "chemical potential for the scan");

    CLI::App* c_verify =
        app.add_subcommand("verify", "run the library verification suites");
    add_common(c_verify);
    c_verify->add_option("--criteria", criteria,
                         "all | comma list of combinatorics, potential, "
                         "groundstate, mayer, virial, thermo");
    c_verify->add_option("--inject-fault", inject_fault,
                         "fault injection hook (acoeff)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);
        if (!potential_spec.empty())
            cfg.potential = potential_from_spec(potential_spec);
        if (!beta_grid_text.empty())
            cfg.beta_grid = parse_double_list(beta_grid_text);
        if (kmax > 0) cfg.K = kmax;
        if (order > 0) cfg.N = order;
        if (samples > 0) cfg.samples = samples;
        if (c_mayer->count("--seed")) cfg.seed = seed;
        if (!method.empty()) cfg.method = method;
        if (quad_nodes > 0) cfg.quad_nodes = quad_nodes;
        if (oracle_step > 0) cfg.oracle_step = oracle_step;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = format;
        if (!criteria.empty()) cfg.criteria = criteria;
        cfg.inject_fault = inject_fault;
        cfg.with_zcl = !no_zcl;
        cfg.consistency = !no_consistency;

        if ((c_gs->parsed() || c_mayer->parsed()) &&
            !cfg.potential.has_value())
            throw std::invalid_argument(
                "a potential is required (--potential or --config)");

        if (c_gs->parsed()) return cmd_groundstate(cfg);
        if (c_mayer->parsed()) {
            cfg.validate();
            return cmd_mayer(cfg, gs_path);
        }
        if (c_virial->parsed()) {
            if (mayer_path.empty()) mayer_path = cfg.out_dir + "/mayer.csv";
            if (zcl_path.empty()) {
                std::string candidate = cfg.out_dir + "/zcl.csv";
                if (fs::exists(candidate)) zcl_path = candidate;
            }
            return cmd_virial(cfg, mayer_path, zcl_path, gs_path);
        }
        if (c_thermo->parsed()) {
            if (gs_path.empty() || mayer_path.empty())
                throw std::invalid_argument("thermo requires --gs and --mayer");
            return cmd_thermo(cfg, gs_path, mayer_path, zcl_path, mu,
                              mu_opt->count() > 0);
        }
        if (c_verify->parsed()) return cmd_verify(cfg);
        throw std::invalid_argument("no subcommand");
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
