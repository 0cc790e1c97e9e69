#include "cluvir/graphs.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "cluvir/potential.hpp"

namespace cluvir {

int pair_count(int k) { return k * (k - 1) / 2; }

int edge_index(int i, int j, int k) {
    // lexicographic over pairs (i, j), i < j, vertices 0..k-1
    return i * k - i * (i + 1) / 2 + (j - i - 1);
}

bool LabeledGraph::has_edge(int i, int j) const {
    if (i == j) return false;
    if (i > j) std::swap(i, j);
    return (edges >> edge_index(i, j, k)) & 1ull;
}

int LabeledGraph::edge_count() const { return __builtin_popcountll(edges); }

namespace {

// Per-vertex adjacency bitmasks from the edge bitmask.
void adjacency(const LabeledGraph& g, std::uint32_t adj[]) {
    for (int i = 0; i < g.k; ++i) adj[i] = 0;
    int e = 0;
    for (int i = 0; i < g.k; ++i) {
        for (int j = i + 1; j < g.k; ++j, ++e) {
            if ((g.edges >> e) & 1ull) {
                adj[i] |= 1u << j;
                adj[j] |= 1u << i;
            }
        }
    }
}

bool connected_on(const std::uint32_t adj[], std::uint32_t vertex_mask) {
    if (vertex_mask == 0) return true;
    std::uint32_t start = vertex_mask & (~vertex_mask + 1);
    std::uint32_t seen = start;
    std::uint32_t frontier = start;
    while (frontier) {
        std::uint32_t next = 0;
        std::uint32_t f = frontier;
        while (f) {
            int v = __builtin_ctz(f);
            f &= f - 1;
            next |= adj[v] & vertex_mask;
        }
        frontier = next & ~seen;
        seen |= next;
    }
    return seen == vertex_mask;
}

}  // namespace

bool is_connected(const LabeledGraph& g) {
    if (g.k <= 1) return true;
    std::uint32_t adj[12];
    adjacency(g, adj);
    return connected_on(adj, (1u << g.k) - 1u);
}

bool is_biconnected(const LabeledGraph& g) {
    if (g.k < 2) return false;
    if (!is_connected(g)) return false;
    if (g.k == 2) return g.edge_count() == 1;
    std::uint32_t adj[12];
    adjacency(g, adj);
    std::uint32_t all = (1u << g.k) - 1u;
    for (int v = 0; v < g.k; ++v) {
        if (!connected_on(adj, all & ~(1u << v))) return false;
    }
    return true;
}

namespace {

std::vector<LabeledGraph> enumerate(int k, bool biconnected) {
    std::vector<LabeledGraph> out;
    if (k == 1) {
        if (!biconnected) out.push_back({1, 0});
        return out;
    }
    std::uint64_t total = 1ull << pair_count(k);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        LabeledGraph g{k, mask};
        if (biconnected ? is_biconnected(g) : is_connected(g))
            out.push_back(g);
    }
    return out;
}

struct GraphCache {
    std::once_flag once[kHardMaxGraphVertices + 1];
    std::vector<LabeledGraph> lists[kHardMaxGraphVertices + 1];
};

GraphCache g_connected_cache;
GraphCache g_biconnected_cache;

}  // namespace

const std::vector<LabeledGraph>& connected_graphs(int k, int k_max) {
    if (k < 1 || k > k_max || k > kHardMaxGraphVertices)
        throw std::invalid_argument("connected_graphs: k out of range");
    std::call_once(g_connected_cache.once[k], [k] {
        g_connected_cache.lists[k] = enumerate(k, false);
    });
    return g_connected_cache.lists[k];
}

const std::vector<LabeledGraph>& biconnected_graphs(int k, int k_max) {
    if (k < 2 || k > k_max || k > kHardMaxGraphVertices)
        throw std::invalid_argument("biconnected_graphs: k out of range");
    std::call_once(g_biconnected_cache.once[k], [k] {
        g_biconnected_cache.lists[k] = enumerate(k, true);
    });
    return g_biconnected_cache.lists[k];
}

ConfigGraphs config_graphs(std::span<const double> coords, int dimension,
                           double range, const PairPotential* potential) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (range <= 0.0) throw std::invalid_argument("range must be positive");
    int k = static_cast<int>(coords.size()) / dimension;
    if (k > 11)
        throw std::invalid_argument("config_graphs: more than 11 points");
    ConfigGraphs cg;
    cg.range = {k, 0};
    cg.pos = {k, 0};
    cg.neg = {k, 0};
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            double dist2 = 0.0;
            for (int a = 0; a < dimension; ++a) {
                double d = coords[i * dimension + a] - coords[j * dimension + a];
                dist2 += d * d;
            }
            double dist = std::sqrt(dist2);
            std::uint64_t bit = 1ull << edge_index(i, j, k);
            if (dist <= range) cg.range.edges |= bit;
            if (potential) {
                double v = potential->evaluate(dist);
                if (v > 0.0) cg.pos.edges |= bit;       // includes +infinity
                else if (v < 0.0) cg.neg.edges |= bit;
            }
        }
    }
    return cg;
}

bool configuration_connected(std::span<const double> coords, int dimension,
                             double range) {
    int k = static_cast<int>(coords.size()) / dimension;
    if (k <= 1) return true;
    // Direct BFS over the distance graph; no bitmask size limit.
    std::vector<int> seen(k, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    auto close = [&](int i, int j) {
        double dist2 = 0.0;
        for (int a = 0; a < dimension; ++a) {
            double d = coords[i * dimension + a] - coords[j * dimension + a];
            dist2 += d * d;
        }
        return dist2 <= range * range;
    };
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w = 0; w < k; ++w) {
            if (!seen[w] && close(v, w)) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == k;
}

}  // namespace cluvir
