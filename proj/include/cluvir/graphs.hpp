#ifndef CLUVIR_GRAPHS_HPP
#define CLUVIR_GRAPHS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace cluvir {

class PairPotential;

// Labeled undirected graph on vertices 0..k-1, edges stored as a bitmask
// over the k(k-1)/2 unordered pairs in lexicographic order (0,1), (0,2),
// ..., (0,k-1), (1,2), ... The 64-bit mask holds graphs up to k = 11.
struct LabeledGraph {
    int k = 0;
    std::uint64_t edges = 0;

    bool has_edge(int i, int j) const;
    int edge_count() const;
};

// Index of pair {i, j}, i < j, in the lexicographic edge ordering.
int edge_index(int i, int j, int k);
int pair_count(int k);

bool is_connected(const LabeledGraph& g);
// Connected with no articulation vertex; the single edge on two vertices
// counts as biconnected.
bool is_biconnected(const LabeledGraph& g);

inline constexpr int kDefaultMaxGraphVertices = 6;
inline constexpr int kHardMaxGraphVertices = 7;

// All labeled connected graphs on k vertices, ascending edge bitmask.
// Results are cached per k; the cache is write-once and safe to read
// concurrently. Throws std::invalid_argument for k outside [1, k_max].
const std::vector<LabeledGraph>& connected_graphs(
    int k, int k_max = kDefaultMaxGraphVertices);

// All labeled biconnected graphs on k vertices, ascending edge bitmask,
// for k in [2, k_max].
const std::vector<LabeledGraph>& biconnected_graphs(
    int k, int k_max = kDefaultMaxGraphVertices);

// Range graph E(x) and sign graphs E+/-(x) of a configuration.
struct ConfigGraphs {
    LabeledGraph range;  // |x_i - x_j| <= range
    LabeledGraph pos;    // v(|x_i - x_j|) > 0
    LabeledGraph neg;    // v(|x_i - x_j|) < 0
};

// Classify the pair structure of k points in `dimension` dimensions
// (coords has k*dimension entries, point i at [i*dimension, ...)).
// The potential may be null, in which case pos/neg stay empty.
ConfigGraphs config_graphs(std::span<const double> coords, int dimension,
                           double range, const PairPotential* potential);

bool configuration_connected(std::span<const double> coords, int dimension,
                             double range);

}  // namespace cluvir

#endif
