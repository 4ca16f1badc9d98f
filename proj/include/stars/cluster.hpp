#pragma once

// Connected components, deterministic component merging, the geometric
// threshold sweep for approximate k-single-linkage, and VMeasure scoring.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "stars/build_threshold.hpp"
#include "stars/core.hpp"
#include "stars/similarity.hpp"

namespace stars {

struct Partition {
    std::vector<std::uint32_t> assignment;  // PointId -> cluster id, dense ids
    std::uint32_t cluster_count = 0;
};

namespace detail {

class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

  private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

// Roots renumbered so the component containing the smallest id gets 0, the
// component with the next-smallest unseen id gets 1, and so on.
inline Partition canonical_partition(UnionFind& uf, std::size_t n) {
    Partition part;
    part.assignment.assign(n, 0);
    std::vector<std::int64_t> label(n, -1);
    std::uint32_t next = 0;
    for (std::uint32_t p = 0; p < n; ++p) {
        const std::uint32_t root = uf.find(p);
        if (label[root] < 0) label[root] = next++;
        part.assignment[p] = static_cast<std::uint32_t>(label[root]);
    }
    part.cluster_count = next;
    return part;
}

}  // namespace detail

inline Partition connected_components(const SimilarityGraph& graph) {
    detail::UnionFind uf(graph.n);
    for (const Edge& e : graph.edges) uf.unite(e.a, e.b);
    return detail::canonical_partition(uf, graph.n);
}

// Deterministic reduction to exactly k clusters: repeatedly fold the
// smallest component (size, then smallest member id) into the largest
// (size, then smallest member id). Ids are re-canonicalized at the end.
inline Partition merge_to_k(const Partition& partition, std::uint32_t k) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (partition.cluster_count < k)
        throw std::invalid_argument("cannot merge below the current cluster count");
    const std::size_t n = partition.assignment.size();
    std::vector<std::uint32_t> target(partition.cluster_count);
    std::iota(target.begin(), target.end(), 0u);
    std::vector<std::uint64_t> size(partition.cluster_count, 0);
    std::vector<std::uint32_t> min_id(partition.cluster_count, ~0u);
    for (std::uint32_t p = 0; p < n; ++p) {
        const std::uint32_t c = partition.assignment[p];
        ++size[c];
        min_id[c] = std::min(min_id[c], p);
    }
    std::vector<std::uint32_t> alive(partition.cluster_count);
    std::iota(alive.begin(), alive.end(), 0u);
    while (alive.size() > k) {
        const auto by_small = [&](std::uint32_t a, std::uint32_t b) {
            return size[a] != size[b] ? size[a] < size[b] : min_id[a] < min_id[b];
        };
        const auto smallest = *std::min_element(alive.begin(), alive.end(), by_small);
        // Drop the smallest before picking its target so an all-ties round
        // can never fold a cluster into itself.
        alive.erase(std::find(alive.begin(), alive.end(), smallest));
        const auto largest = *std::max_element(alive.begin(), alive.end(),
                                               [&](std::uint32_t a, std::uint32_t b) {
                                                   if (size[a] != size[b])
                                                       return size[a] < size[b];
                                                   return min_id[a] > min_id[b];
                                               });
        target[smallest] = largest;
        size[largest] += size[smallest];
        min_id[largest] = std::min(min_id[largest], min_id[smallest]);
    }
    // Resolve chains, then canonicalize by ascending minimum member id.
    const auto resolve = [&](std::uint32_t c) {
        while (target[c] != c) c = target[c];
        return c;
    };
    Partition out;
    out.assignment.assign(n, 0);
    std::vector<std::int64_t> label(partition.cluster_count, -1);
    std::uint32_t next = 0;
    for (std::uint32_t p = 0; p < n; ++p) {
        const std::uint32_t root = resolve(partition.assignment[p]);
        if (label[root] < 0) label[root] = next++;
        out.assignment[p] = static_cast<std::uint32_t>(label[root]);
    }
    out.cluster_count = next;
    return out;
}

// Harmonic mean of homogeneity and completeness over the label/cluster
// contingency table, natural-log entropies. Degenerate cases follow the
// metric's standard conventions.
inline double vmeasure(const Partition& pred, const std::vector<std::uint32_t>& labels) {
    const std::size_t n = pred.assignment.size();
    if (labels.size() != n) throw std::invalid_argument("label count mismatch");
    if (n == 0) throw std::invalid_argument("empty partition");
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
    std::map<std::uint32_t, double> by_class, by_cluster;
    for (std::size_t p = 0; p < n; ++p) {
        joint[{labels[p], pred.assignment[p]}] += 1.0;
        by_class[labels[p]] += 1.0;
        by_cluster[pred.assignment[p]] += 1.0;
    }
    const double total = static_cast<double>(n);
    double h_c = 0.0, h_k = 0.0, h_c_given_k = 0.0, h_k_given_c = 0.0;
    for (const auto& [c, cnt] : by_class) h_c -= cnt / total * std::log(cnt / total);
    for (const auto& [c, cnt] : by_cluster) h_k -= cnt / total * std::log(cnt / total);
    for (const auto& [key, cnt] : joint) {
        h_c_given_k -= cnt / total * std::log(cnt / by_cluster[key.second]);
        h_k_given_c -= cnt / total * std::log(cnt / by_class[key.first]);
    }
    const double homogeneity = h_c == 0.0 ? 1.0 : 1.0 - h_c_given_k / h_c;
    const double completeness = h_k == 0.0 ? 1.0 : 1.0 - h_k_given_c / h_k;
    if (homogeneity + completeness == 0.0) return 0.0;
    return 2.0 * homogeneity * completeness / (homogeneity + completeness);
}

struct SweepLevel {
    double threshold = 0.0;  // r; the spanner is built with r1 = r/c
    std::uint32_t component_count = 0;
    Partition partition;
};

struct SweepResult {
    std::vector<SweepLevel> levels;
    // Smallest grid level whose spanner reaches at least k components, if
    // any. Component counts grow with r, so this is the transition point.
    std::int64_t selected_index = -1;
    double selected_r = 0.0;
};

// Geometric threshold sweep: one spanner per level r with edge floor r/c.
inline SweepResult single_linkage_sweep(const DataView& view, const Measure& measure,
                                        const HashFamily& family, std::uint32_t k, double c,
                                        double r_min, double r_max,
                                        const ThresholdConfig& base_cfg) {
    if (!(r_min > 0.0) || !(r_min < r_max)) throw std::invalid_argument("need 0 < r_min < r_max");
    if (c < 1.0) throw std::invalid_argument("approximation factor c must be >= 1");
    if (k == 0) throw std::invalid_argument("k must be positive");
    std::vector<double> grid;
    if (c == 1.0) {
        grid.push_back(r_min);
    } else {
        for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= c) grid.push_back(r);
    }
    if (grid.empty()) throw std::invalid_argument("empty threshold grid");

    SweepResult result;
    for (double r : grid) {
        ThresholdConfig cfg = base_cfg;
        cfg.r1 = r / c;
        const BuildResult built = build_threshold_spanner(view, measure, family, cfg);
        SweepLevel level;
        level.threshold = r;
        level.partition = connected_components(built.graph);
        level.component_count = level.partition.cluster_count;
        if (result.selected_index < 0 && level.component_count >= k) {
            result.selected_index = static_cast<std::int64_t>(result.levels.size());
            result.selected_r = r;
        }
        result.levels.push_back(std::move(level));
    }
    return result;
}

// Exact single-linkage oracle for small instances: merge pairs in
// descending similarity until k clusters remain; the cost OPT_k is the
// similarity of the next cross-cluster pair.
struct SingleLinkageOpt {
    double opt = 0.0;
    Partition partition;
};

inline SingleLinkageOpt exact_single_linkage(const Measure& measure, std::uint32_t k) {
    const std::size_t n = measure.size();
    if (k == 0 || k > n) throw std::invalid_argument("k outside [1, n]");
    struct Pair {
        double sim;
        PointId a, b;
    };
    std::vector<Pair> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (PointId i = 0; i + 1 < n; ++i)
        for (PointId j = i + 1; j < n; ++j) pairs.push_back({measure(i, j), i, j});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) {
        if (l.sim != r.sim) return l.sim > r.sim;
        return l.a != r.a ? l.a < r.a : l.b < r.b;
    });
    detail::UnionFind uf(n);
    std::size_t clusters = n;
    std::size_t i = 0;
    for (; i < pairs.size() && clusters > k; ++i)
        if (uf.unite(pairs[i].a, pairs[i].b)) --clusters;
    SingleLinkageOpt out;
    out.partition = detail::canonical_partition(uf, n);
    out.opt = 0.0;
    for (; i < pairs.size(); ++i)
        if (uf.find(pairs[i].a) != uf.find(pairs[i].b)) {
            out.opt = pairs[i].sim;
            break;
        }
    return out;
}

}  // namespace stars
