#pragma once

// k-ANN spanner construction by sketch sorting: per repetition, every point
// gets an M-long sketch, points are sorted lexicographically, a random
// shift carves the order into consecutive blocks, and blocks are scored
// either by sampled leaders or exhaustively. Sparsity comes from a final
// degree cap, not from an admission threshold.

#include <chrono>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "stars/build_threshold.hpp"
#include "stars/core.hpp"
#include "stars/lsh.hpp"
#include "stars/parallel.hpp"
#include "stars/rng.hpp"
#include "stars/similarity.hpp"

namespace stars {

enum class BlockMode { Leaders, AllPairsInBlock, Auto };

struct SortingConfig {
    std::uint32_t k = 100;
    std::uint32_t window = 250;        // W
    std::uint32_t sketch_dim = 30;     // M
    std::uint64_t repetitions = 25;    // R
    std::uint32_t leaders_per_block = 25;
    BlockMode mode = BlockMode::Auto;
    double auto_threshold = 2.0;       // Auto picks Leaders iff W > t*s
    std::uint32_t degree_cap = 250;
    std::size_t max_block_size = 20000;
    std::uint64_t seed = 0;
    int threads = 0;
};

inline BlockMode select_mode(const SortingConfig& cfg, std::size_t /*n*/) {
    if (cfg.mode != BlockMode::Auto) return cfg.mode;
    return cfg.window > cfg.auto_threshold * cfg.leaders_per_block
               ? BlockMode::Leaders
               : BlockMode::AllPairsInBlock;
}

// Permutation of [0, n) ordered by lexicographic key with id tie-break.
// Keys are flattened row-major, sketch_dim entries per point.
inline std::vector<PointId> sort_by_sketch_flat(const std::vector<std::uint64_t>& flat,
                                                std::size_t sketch_dim, std::size_t n) {
    if (sketch_dim == 0 || flat.size() != sketch_dim * n)
        throw std::invalid_argument("flattened keys do not match n x sketch_dim");
    std::vector<PointId> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](PointId a, PointId b) {
        const std::uint64_t* ka = flat.data() + static_cast<std::size_t>(a) * sketch_dim;
        const std::uint64_t* kb = flat.data() + static_cast<std::size_t>(b) * sketch_dim;
        for (std::size_t j = 0; j < sketch_dim; ++j)
            if (ka[j] != kb[j]) return ka[j] < kb[j];
        return a < b;
    });
    return order;
}

inline std::vector<PointId> sort_by_sketch(
    const std::vector<std::pair<std::vector<std::uint64_t>, PointId>>& keys) {
    if (keys.empty()) return {};
    const std::size_t m = keys[0].first.size();
    if (m == 0) throw std::invalid_argument("empty sketch keys");
    std::vector<std::uint64_t> flat;
    flat.reserve(keys.size() * m);
    std::vector<PointId> ids(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i].first.size() != m) throw std::invalid_argument("sketch length mismatch");
        flat.insert(flat.end(), keys[i].first.begin(), keys[i].first.end());
        ids[i] = keys[i].second;
    }
    // Sort positions, then map back to the caller's ids.
    std::vector<PointId> pos(keys.size());
    std::iota(pos.begin(), pos.end(), 0u);
    std::sort(pos.begin(), pos.end(), [&](PointId a, PointId b) {
        const std::uint64_t* ka = flat.data() + static_cast<std::size_t>(a) * m;
        const std::uint64_t* kb = flat.data() + static_cast<std::size_t>(b) * m;
        for (std::size_t j = 0; j < m; ++j)
            if (ka[j] != kb[j]) return ka[j] < kb[j];
        return ids[a] < ids[b];
    });
    std::vector<PointId> out(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) out[i] = ids[pos[i]];
    return out;
}

// Consecutive index ranges over a sorted order: the first block holds
// min(r, n) points, the rest hold exactly W until the (short) tail.
inline std::vector<std::pair<std::size_t, std::size_t>> make_blocks(std::size_t n,
                                                                    std::uint32_t window,
                                                                    std::uint32_t r) {
    if (n == 0) throw std::invalid_argument("make_blocks: empty order");
    const std::uint32_t lo = (window + 1) / 2;
    if (r < lo || r > window) throw std::invalid_argument("shift outside [ceil(W/2), W]");
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::size_t begin = std::min<std::size_t>(r, n);
    blocks.emplace_back(0, begin);
    while (begin < n) {
        const std::size_t end = std::min<std::size_t>(begin + window, n);
        blocks.emplace_back(begin, end);
        begin = end;
    }
    return blocks;
}

// The per-repetition shift draw, public so cost accounting can be recounted
// exactly from (seed, rep, W) alone.
inline std::uint32_t block_shift(std::uint64_t seed, std::uint64_t repetition,
                                 std::uint32_t window) {
    SplitMix rng(key_combine(key_combine(seed, repetition), tag::shift));
    const std::uint32_t lo = (window + 1) / 2;
    return static_cast<std::uint32_t>(rng.between(lo, window));
}

namespace detail {

inline RepEdges run_sorting_rep(const DataView& view, const Measure& measure,
                                const HashFamily& family, const SortingConfig& cfg,
                                std::uint64_t rep, BlockMode mode) {
    RepEdges out;
    const std::size_t n = view.size();
    const auto t0 = std::chrono::steady_clock::now();
    SketchPlan plan(family, view, cfg.sketch_dim, rep);
    std::vector<std::uint64_t> flat(n * cfg.sketch_dim);
    for (PointId p = 0; p < n; ++p)
        out.hash_evals += plan.eval_point(p, flat.data() + static_cast<std::size_t>(p) * cfg.sketch_dim);
    out.sketch_seconds = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const std::vector<PointId> order = sort_by_sketch_flat(flat, cfg.sketch_dim, n);
    const std::uint32_t r = block_shift(cfg.seed, rep, cfg.window);
    const auto blocks = make_blocks(n, cfg.window, r);

    std::vector<std::int32_t> rank_scratch;
    const auto emit = [&](PointId x, PointId y, double mu) {
        out.edges.push_back(make_edge(x, y, mu));
    };
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        const auto [lo, hi] = blocks[bi];
        if (hi - lo < 2) continue;
        std::vector<PointId> members(order.begin() + lo, order.begin() + hi);
        const std::uint64_t block_tag = key_combine(key_combine(cfg.seed, rep), bi);
        const auto groups = split_oversized_bucket(
            members, cfg.max_block_size, key_combine(block_tag, tag::split));
        for (std::size_t sub = 0; sub < groups.size(); ++sub) {
            const auto& group = groups[sub];
            if (group.size() < 2) continue;
            if (mode == BlockMode::AllPairsInBlock) {
                score_all_pairs(measure, group, 0.0, true, out.comparisons, emit);
                continue;
            }
            std::uint64_t leader_key = key_combine(block_tag, tag::leaders);
            if (groups.size() > 1) leader_key = key_combine(leader_key, sub);
            SplitMix rng(leader_key);
            const auto leader_slots =
                sample_without_replacement(group.size(), cfg.leaders_per_block, rng);
            score_star(measure, group, leader_slots, 0.0, true, rank_scratch,
                       out.comparisons, emit);
        }
    }
    out.score_seconds = seconds_since(t1);
    return out;
}

}  // namespace detail

inline BuildResult build_knn_spanner(const DataView& view, const Measure& measure,
                                     const HashFamily& family, const SortingConfig& cfg) {
    if (view.size() == 0) throw std::invalid_argument("empty dataset");
    if (measure.size() != view.size())
        throw std::invalid_argument("measure and dataset point counts differ");
    if (cfg.k == 0) throw std::invalid_argument("k must be positive");
    if (cfg.window < 2) throw std::invalid_argument("window must be >= 2");
    if (cfg.sketch_dim == 0) throw std::invalid_argument("sketch dim must be positive");
    if (cfg.repetitions == 0) throw std::invalid_argument("repetitions must be positive");
    if (cfg.degree_cap == 0) throw std::invalid_argument("degree cap must be positive");
    if (cfg.max_block_size < 2) throw std::invalid_argument("max block size must be >= 2");
    const BlockMode mode = select_mode(cfg, view.size());
    if (mode == BlockMode::Leaders && cfg.leaders_per_block == 0)
        throw std::invalid_argument("leader count must be positive");
    validate_for_family(view, family);
    warn_on_mismatch(family.kind, measure.kind());

    BuildResult result;
    GraphBuilder builder(view.size());
    const unsigned threads = resolve_threads(cfg.threads);
    const auto t0 = std::chrono::steady_clock::now();
    rounds<detail::RepEdges>(
        cfg.repetitions, threads,
        [&](std::size_t rep) {
            return detail::run_sorting_rep(view, measure, family, cfg,
                                           static_cast<std::uint64_t>(rep), mode);
        },
        [&](std::size_t, detail::RepEdges&& rep_edges) {
            result.report.comparisons += rep_edges.comparisons;
            result.report.hash_evals += rep_edges.hash_evals;
            result.report.edges_emitted += rep_edges.edges.size();
            result.report.phase_seconds["sketch"] += rep_edges.sketch_seconds;
            result.report.phase_seconds["score"] += rep_edges.score_seconds;
            for (const Edge& e : rep_edges.edges) builder.insert(e.a, e.b, e.weight);
        });
    const auto t1 = std::chrono::steady_clock::now();
    const SimilarityGraph pre_cap = builder.finalize();
    result.graph = degree_cap(pre_cap, cfg.degree_cap);
    result.report.edges_final = result.graph.edges.size();
    result.report.phase_seconds["cap"] = detail::seconds_since(t1);
    result.report.phase_seconds["total"] = detail::seconds_since(t0);
    return result;
}

}  // namespace stars
