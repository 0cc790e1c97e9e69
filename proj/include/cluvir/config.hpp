#ifndef CLUVIR_CONFIG_HPP
#define CLUVIR_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "cluvir/potential.hpp"

namespace cluvir {

// Run configuration shared by the CLI commands. Populated from a config
// file with sections [potential], [grid], [sampler], [output]; command
// line flags override file values.
struct RunConfig {
    std::string potential_spec;  // builtin spec string or config path
    std::optional<PairPotential> potential;

    std::vector<double> beta_grid = {1, 2, 4, 8};
    int K = 4;        // max cluster size
    int N = 0;        // max series order; 0 = follow K (or the table)
    long samples = 1000000;
    std::optional<std::uint64_t> seed;
    std::string method = "quadrature";  // quadrature | monte_carlo | both
    int quad_nodes = 16;
    double quad_tol = 1e-3;
    double oracle_step = 0.005;
    std::string out_dir = "out";
    std::string format = "json";  // csv | json for scalar/figure reports
    std::string criteria = "all";
    bool consistency = true;     // assert c_n = -(n-1) d_n in cmd_virial
    bool with_zcl = true;
    std::string inject_fault;    // verify only; e.g. "acoeff"

    // Throws std::invalid_argument on violated invariants (seed required
    // for Monte Carlo, K >= N, non-empty beta grid).
    void validate() const;
};

// Parse a config file. Unknown keys or malformed lines throw
// std::invalid_argument with the offending line.
RunConfig load_run_config(const std::string& path);

// Parse the [potential] section of a config file, or an inline builtin
// spec of the form "square_well:r_hc=1,b=1.5,depth=1".
PairPotential potential_from_spec(const std::string& spec);

// Comma-separated doubles, e.g. "1,2,4,8".
std::vector<double> parse_double_list(const std::string& text);

}  // namespace cluvir

#endif
