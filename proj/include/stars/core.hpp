#pragma once

// Point payloads, the undirected similarity graph, and the small graph
// operations everything else leans on.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace stars {

using PointId = std::uint32_t;

// A sparse non-negative weighted set element. `token` is a 64-bit digest of
// the vocabulary entry; elements within a point are sorted by vocab id.
struct TokenWeight {
    std::uint64_t token;
    double weight;
};

// A collection of points, indexed 0..n-1. Either a dense matrix, a list of
// weighted sets, or both (paired by index, for mixed measures).
struct Dataset {
    std::size_t dim = 0;
    std::vector<double> dense;  // row-major, size() * dim

    std::vector<std::string> vocab;
    std::vector<std::uint64_t> vocab_digest;                       // per vocab id
    std::vector<std::vector<std::pair<std::uint32_t, double>>> sets;  // (vocab id, weight), sorted by vocab id

    std::vector<std::uint32_t> labels;  // optional; dense class ids, size() long when present
    std::vector<std::string> label_names;

    bool has_dense() const { return dim > 0; }
    bool has_sets() const { return !sets.empty(); }

    std::size_t size() const {
        return has_dense() ? dense.size() / dim : sets.size();
    }

    std::span<const double> row(PointId p) const {
        return std::span<const double>(dense.data() + static_cast<std::size_t>(p) * dim, dim);
    }

    // Materialized (digest, weight) view of one set, sorted by digest.
    std::vector<TokenWeight> set_digests(PointId p) const {
        std::vector<TokenWeight> out;
        out.reserve(sets[p].size());
        for (const auto& [vid, w] : sets[p]) out.push_back({vocab_digest[vid], w});
        std::sort(out.begin(), out.end(),
                  [](const TokenWeight& a, const TokenWeight& b) { return a.token < b.token; });
        return out;
    }
};

// Two datasets paired by point index. Most flows use only `dense` or only
// `sets`; mixture measures and mixed hashing use both.
struct DataView {
    const Dataset* dense = nullptr;
    const Dataset* sets = nullptr;

    std::size_t size() const {
        const std::size_t nd = dense ? dense->size() : 0;
        const std::size_t ns = sets ? sets->size() : 0;
        if (dense && sets && nd != ns)
            throw std::invalid_argument("paired datasets disagree on point count");
        if (!dense && !sets) throw std::invalid_argument("empty data view");
        return dense ? nd : ns;
    }
};

inline std::uint64_t edge_key(PointId a, PointId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Undirected edge, canonical a < b.
struct Edge {
    PointId a;
    PointId b;
    double weight;

    friend bool operator==(const Edge&, const Edge&) = default;
};

inline Edge make_edge(PointId x, PointId y, double w) {
    if (x == y) throw std::invalid_argument("self loop rejected");
    return x < y ? Edge{x, y, w} : Edge{y, x, w};
}

// Immutable once finalized: edges unique, sorted by (a, b).
struct SimilarityGraph {
    std::size_t n = 0;
    std::vector<Edge> edges;
};

// Accumulates edges with dedup; first write wins. Weights are deterministic
// per pair, so insertion order never changes the result.
class GraphBuilder {
  public:
    explicit GraphBuilder(std::size_t n) : n_(n) {}

    // Canonicalizes, validates ids, drops duplicates.
    void insert(PointId x, PointId y, double w) {
        if (x >= n_ || y >= n_) throw std::out_of_range("edge endpoint out of range");
        const Edge e = make_edge(x, y, w);
        seen_.emplace(edge_key(e.a, e.b), e.weight);
    }

    void reserve(std::size_t edges) { seen_.reserve(edges); }

    std::size_t edge_count() const { return seen_.size(); }

    SimilarityGraph finalize() const {
        SimilarityGraph g;
        g.n = n_;
        g.edges.reserve(seen_.size());
        for (const auto& [key, w] : seen_)
            g.edges.push_back({static_cast<PointId>(key >> 32),
                               static_cast<PointId>(key & 0xFFFFFFFFULL), w});
        std::sort(g.edges.begin(), g.edges.end(), [](const Edge& l, const Edge& r) {
            return l.a != r.a ? l.a < r.a : l.b < r.b;
        });
        return g;
    }

  private:
    std::size_t n_;
    std::unordered_map<std::uint64_t, double> seen_;
};

// Neighbor lists for traversal; ids ascending per vertex.
struct Adjacency {
    std::vector<std::vector<PointId>> neighbors;

    explicit Adjacency(const SimilarityGraph& g,
                       double min_weight = -std::numeric_limits<double>::infinity())
        : neighbors(g.n) {
        for (const Edge& e : g.edges) {
            if (e.weight < min_weight) continue;
            neighbors[e.a].push_back(e.b);
            neighbors[e.b].push_back(e.a);
        }
        for (auto& list : neighbors) std::sort(list.begin(), list.end());
    }
};

// Vertices reachable from p in one or two hops, excluding p, ascending.
inline std::vector<PointId> two_hop_neighborhood(const Adjacency& adj, PointId p) {
    if (p >= adj.neighbors.size()) throw std::out_of_range("vertex out of range");
    std::vector<PointId> out;
    std::vector<bool> seen(adj.neighbors.size(), false);
    seen[p] = true;
    for (PointId q : adj.neighbors[p]) {
        if (!seen[q]) { seen[q] = true; out.push_back(q); }
        for (PointId r : adj.neighbors[q])
            if (!seen[r]) { seen[r] = true; out.push_back(r); }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Keep each edge only if it ranks among the `cap` strongest at either
// endpoint; ties broken toward the smaller opposite id. Idempotent.
inline SimilarityGraph degree_cap(const SimilarityGraph& g, std::size_t cap) {
    if (cap == 0) throw std::invalid_argument("degree cap must be positive");
    // (weight desc, opposite id asc) rank per vertex
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> incident(g.n);
    for (std::uint32_t i = 0; i < g.edges.size(); ++i) {
        incident[g.edges[i].a].push_back({i, g.edges[i].b});
        incident[g.edges[i].b].push_back({i, g.edges[i].a});
    }
    std::vector<bool> keep(g.edges.size(), false);
    for (std::size_t v = 0; v < g.n; ++v) {
        auto& inc = incident[v];
        const auto rank = [&](const std::pair<std::uint32_t, std::uint32_t>& l,
                              const std::pair<std::uint32_t, std::uint32_t>& r) {
            const double lw = g.edges[l.first].weight;
            const double rw = g.edges[r.first].weight;
            return lw != rw ? lw > rw : l.second < r.second;
        };
        if (inc.size() > cap) {
            std::nth_element(inc.begin(), inc.begin() + cap - 1, inc.end(), rank);
            inc.resize(cap);
        }
        for (const auto& [idx, opp] : inc) keep[idx] = true;
    }
    SimilarityGraph out;
    out.n = g.n;
    for (std::uint32_t i = 0; i < g.edges.size(); ++i)
        if (keep[i]) out.edges.push_back(g.edges[i]);
    return out;
}

// Build metrics reported by every construction.
struct BuildReport {
    std::uint64_t comparisons = 0;   // similarity evaluations
    std::uint64_t hash_evals = 0;    // single hash-function evaluations
    std::uint64_t edges_emitted = 0; // admissions before dedup and caps
    std::uint64_t edges_final = 0;
    std::map<std::string, double> phase_seconds;
};

}  // namespace stars
