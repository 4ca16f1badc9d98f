#pragma once

// Brute-force ground truth and the recall metrics graphs are judged by:
// two-hop threshold recall (with a relaxed edge floor), exact-kNN and
// approximate-kNN two-hop recall inside per-point induced subgraphs, and
// edge-count sparsity.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stars/core.hpp"
#include "stars/parallel.hpp"
#include "stars/similarity.hpp"

namespace stars {

struct OracleParams {
    double r2 = 0.5;
    std::uint32_t k = 100;
    double inv_eps = 1.0;          // approximate-neighbor slack, >= 1
    bool want_threshold = true;    // threshold partner lists are the memory hog
    int threads = 0;
};

struct GroundTruth {
    double r2 = 0.5;
    std::uint32_t k = 0;
    double inv_eps = 1.0;
    std::vector<std::vector<PointId>> threshold_partners;  // per point, ascending
    std::vector<std::vector<PointId>> knn;   // per point, descending similarity, id tie-break
    std::vector<double> tau_k;               // similarity of the k-th neighbor
    std::vector<std::vector<PointId>> ann;   // A_p under inv_eps, ascending ids
    std::vector<std::vector<PointId>> ann_exact;  // A_p at inv_eps = 1, for monotonicity checks
    std::uint64_t comparisons = 0;
};

// Exhaustive oracle: every unordered pair evaluated exactly once (counted),
// then thresholded pairs, exact k-NN lists, and approximate-neighbor sets
// are read off the similarity table.
inline GroundTruth allpairs_oracle(const Measure& measure, const OracleParams& params,
                                   ComparisonCounter& counter) {
    if (params.inv_eps < 1.0) throw std::invalid_argument("inv_eps must be >= 1");
    if (params.k == 0) throw std::invalid_argument("k must be positive");
    const std::size_t n = measure.size();
    GroundTruth truth;
    truth.r2 = params.r2;
    truth.k = params.k;
    truth.inv_eps = params.inv_eps;
    if (n == 1) {
        truth.threshold_partners.resize(1);
        truth.knn.resize(1);
        truth.tau_k.assign(1, 0.0);
        truth.ann.resize(1);
        truth.ann_exact.resize(1);
        return truth;
    }

    // Packed upper triangle: pair (i < j) at offset(i) + j - i - 1.
    const auto offset = [n](std::size_t i) { return i * (2 * n - i - 1) / 2; };
    std::vector<double> sims(n * (n - 1) / 2);
    const unsigned threads = resolve_threads(params.threads);
    parallel_blocks(n - 1, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double* row = sims.data() + offset(i);
            for (std::size_t j = i + 1; j < n; ++j)
                row[j - i - 1] = measure(static_cast<PointId>(i), static_cast<PointId>(j));
            counter.add(n - 1 - i);
        }
    });
    truth.comparisons = n * (n - 1) / 2;

    const auto sim_at = [&](std::size_t p, std::size_t q) {
        return p < q ? sims[offset(p) + q - p - 1] : sims[offset(q) + p - q - 1];
    };

    if (params.want_threshold) {
        truth.threshold_partners.resize(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double* row = sims.data() + offset(i);
            for (std::size_t j = i + 1; j < n; ++j)
                if (row[j - i - 1] >= params.r2) {
                    truth.threshold_partners[i].push_back(static_cast<PointId>(j));
                    truth.threshold_partners[j].push_back(static_cast<PointId>(i));
                }
        }
    }

    const std::uint32_t k = static_cast<std::uint32_t>(
        std::min<std::size_t>(params.k, n - 1));
    truth.knn.resize(n);
    truth.tau_k.assign(n, 0.0);
    truth.ann.resize(n);
    truth.ann_exact.resize(n);
    parallel_blocks(n, threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::pair<double, PointId>> row(n - 1);
        for (std::size_t p = lo; p < hi; ++p) {
            std::size_t w = 0;
            for (std::size_t q = 0; q < n; ++q)
                if (q != p) row[w++] = {sim_at(p, q), static_cast<PointId>(q)};
            const auto rank = [](const std::pair<double, PointId>& a,
                                 const std::pair<double, PointId>& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            };
            std::nth_element(row.begin(), row.begin() + k - 1, row.end(), rank);
            std::sort(row.begin(), row.begin() + k, rank);
            auto& list = truth.knn[p];
            list.reserve(k);
            for (std::uint32_t i = 0; i < k; ++i) list.push_back(row[i].second);
            truth.tau_k[p] = row[k - 1].first;
            const double floor = 1.0 - params.inv_eps * (1.0 - truth.tau_k[p]);
            auto& aset = truth.ann[p];
            auto& eset = truth.ann_exact[p];
            for (std::size_t q = 0; q < n; ++q) {
                if (q == p) continue;
                const double s = sim_at(p, q);
                if (s >= floor) aset.push_back(static_cast<PointId>(q));
                if (s >= truth.tau_k[p]) eset.push_back(static_cast<PointId>(q));
            }
        }
    });
    return truth;
}

namespace detail {

// Distinct vertices within two hops of p, filtered by an acceptance mask.
// Intermediate hops must also pass the mask when `induced` is set.
template <typename Accept>
std::size_t two_hop_count(const Adjacency& adj, PointId p, const Accept& accept,
                          bool induced, std::vector<std::uint32_t>& stamp,
                          std::uint32_t token) {
    std::size_t found = 0;
    const auto visit = [&](PointId v) {
        if (stamp[v] != token && accept(v)) {
            stamp[v] = token;
            ++found;
            return true;
        }
        return false;
    };
    stamp[p] = token;
    for (PointId q : adj.neighbors[p]) {
        const bool q_in = accept(q);
        if (q_in && stamp[q] != token) { stamp[q] = token; ++found; }
        if (induced && !q_in) continue;  // outside the induced subgraph
        for (PointId r : adj.neighbors[q]) visit(r);
    }
    return found;
}

}  // namespace detail

// Mean fraction of r2-threshold partners reachable within two hops, over
// edges at or above edge_floor. Points with no partners are skipped.
inline double threshold_two_hop_recall(const SimilarityGraph& graph, const GroundTruth& truth,
                                       double edge_floor, int threads = 0) {
    if (truth.threshold_partners.empty())
        throw std::invalid_argument("ground truth lacks threshold pairs");
    const std::size_t n = graph.n;
    const Adjacency adj(graph, edge_floor);
    std::vector<double> ratio(n, -1.0);
    parallel_blocks(n, resolve_threads(threads), [&](std::size_t lo, std::size_t hi) {
        std::vector<bool> mark(n, false);
        std::vector<PointId> touched;
        for (std::size_t p = lo; p < hi; ++p) {
            const auto& partners = truth.threshold_partners[p];
            if (partners.empty()) continue;
            touched.clear();
            const auto visit = [&](PointId v) {
                if (!mark[v]) { mark[v] = true; touched.push_back(v); }
            };
            for (PointId q : adj.neighbors[p]) {
                visit(q);
                for (PointId r : adj.neighbors[q]) visit(r);
            }
            std::size_t hit = 0;
            for (PointId t : partners) hit += mark[t] ? 1 : 0;
            ratio[p] = static_cast<double>(hit) / static_cast<double>(partners.size());
            for (PointId t : touched) mark[t] = false;
        }
    });
    double sum = 0.0;
    std::size_t contributing = 0;
    for (double v : ratio)
        if (v >= 0.0) { sum += v; ++contributing; }
    return contributing == 0 ? 0.0 : sum / static_cast<double>(contributing);
}

namespace detail {

inline double capped_set_recall(const SimilarityGraph& graph,
                                const std::vector<std::vector<PointId>>& sets,
                                std::uint32_t k, int threads) {
    const std::size_t n = graph.n;
    const Adjacency adj(graph);
    std::vector<double> ratio(n, 0.0);
    parallel_blocks(n, resolve_threads(threads), [&](std::size_t lo, std::size_t hi) {
        std::vector<std::uint32_t> stamp(n, 0);
        std::vector<std::uint8_t> in_set(n, 0);
        std::uint32_t token = 0;
        for (std::size_t p = lo; p < hi; ++p) {
            for (PointId q : sets[p]) in_set[q] = 1;
            ++token;
            const std::size_t found = detail::two_hop_count(
                adj, static_cast<PointId>(p), [&](PointId v) { return in_set[v] != 0; },
                /*induced=*/true, stamp, token);
            ratio[p] = static_cast<double>(std::min<std::size_t>(found, k)) /
                       static_cast<double>(k);
            for (PointId q : sets[p]) in_set[q] = 0;
        }
    });
    double sum = 0.0;
    for (double v : ratio) sum += v;
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace detail

// Mean of min(found, k)/k where found counts approximate neighbors within
// two hops of p in the subgraph induced by A_p and p itself.
inline double ann_two_hop_recall(const SimilarityGraph& graph, const GroundTruth& truth,
                                 std::uint32_t k, int threads = 0) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    return detail::capped_set_recall(graph, truth.ann, k, threads);
}

// Exact-kNN recall in one hop and in two hops inside the kNN-induced
// subgraph, averaged per point.
struct KnnRecall {
    double onehop = 0.0;
    double twohop = 0.0;
};

inline KnnRecall knn_recall(const SimilarityGraph& graph, const GroundTruth& truth,
                            int threads = 0) {
    const std::size_t n = graph.n;
    const Adjacency adj(graph);
    std::vector<double> one(n, 0.0), two(n, 0.0);
    parallel_blocks(n, resolve_threads(threads), [&](std::size_t lo, std::size_t hi) {
        std::vector<std::uint32_t> stamp(n, 0);
        std::vector<std::uint8_t> in_set(n, 0);
        std::uint32_t token = 0;
        for (std::size_t p = lo; p < hi; ++p) {
            const auto& want = truth.knn[p];
            if (want.empty()) continue;
            for (PointId q : want) in_set[q] = 1;
            std::size_t direct = 0;
            for (PointId q : adj.neighbors[p]) direct += in_set[q];
            ++token;
            const std::size_t found = detail::two_hop_count(
                adj, static_cast<PointId>(p), [&](PointId v) { return in_set[v] != 0; },
                /*induced=*/true, stamp, token);
            one[p] = static_cast<double>(direct) / static_cast<double>(want.size());
            two[p] = static_cast<double>(found) / static_cast<double>(want.size());
            for (PointId q : want) in_set[q] = 0;
        }
    });
    KnnRecall out;
    for (std::size_t p = 0; p < n; ++p) { out.onehop += one[p]; out.twohop += two[p]; }
    if (n > 0) { out.onehop /= static_cast<double>(n); out.twohop /= static_cast<double>(n); }
    return out;
}

// Edge counts at each threshold.
inline std::vector<std::size_t> sparsity_report(const SimilarityGraph& graph,
                                                const std::vector<double>& thresholds) {
    std::vector<std::size_t> counts(thresholds.size(), 0);
    for (std::size_t t = 0; t < thresholds.size(); ++t)
        for (const Edge& e : graph.edges)
            if (e.weight >= thresholds[t]) ++counts[t];
    return counts;
}

struct EvalReport {
    double threshold_recall = 0.0;
    double threshold_recall_relaxed = 0.0;
    double knn_recall_onehop = 0.0;
    double knn_recall_twohop = 0.0;
    double ann_recall_twohop = 0.0;
    double ann_recall_exact = 0.0;  // same metric with the slack removed
    std::size_t edges_at_threshold = 0;
    std::size_t total_edges = 0;
};

inline EvalReport evaluate_graph(const SimilarityGraph& graph, const GroundTruth& truth,
                                 double edge_floor, int threads = 0) {
    EvalReport report;
    report.threshold_recall = threshold_two_hop_recall(graph, truth, truth.r2, threads);
    report.threshold_recall_relaxed =
        threshold_two_hop_recall(graph, truth, edge_floor, threads);
    const KnnRecall knn = knn_recall(graph, truth, threads);
    report.knn_recall_onehop = knn.onehop;
    report.knn_recall_twohop = knn.twohop;
    report.ann_recall_twohop = ann_two_hop_recall(graph, truth, truth.k, threads);
    report.ann_recall_exact =
        detail::capped_set_recall(graph, truth.ann_exact, truth.k, threads);
    report.edges_at_threshold = sparsity_report(graph, {truth.r2})[0];
    report.total_edges = graph.edges.size();

    // Relaxation can only widen what counts as found; a violation means a
    // metric implementation bug, not a property of the graph under test.
    if (edge_floor <= truth.r2 &&
        report.threshold_recall_relaxed < report.threshold_recall)
        throw std::logic_error("relaxed threshold recall fell below strict recall");
    if (report.ann_recall_twohop < report.ann_recall_exact)
        throw std::logic_error("relaxed ann recall fell below exact ann recall");
    return report;
}

}  // namespace stars
