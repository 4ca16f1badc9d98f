#pragma once

// Threshold spanner construction: repeated LSH bucketing with star-shaped
// scoring inside each bucket. A handful of sampled leaders compare against
// everyone they share a bucket with, and pairs at or above r1 become edges.
// The all-pairs-in-bucket variant is the classical baseline.

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stars/core.hpp"
#include "stars/lsh.hpp"
#include "stars/parallel.hpp"
#include "stars/rng.hpp"
#include "stars/similarity.hpp"

namespace stars {

struct ThresholdConfig {
    double r1 = 0.5;
    std::uint64_t repetitions = 400;
    std::uint32_t sketch_length = 12;
    std::uint32_t leaders = 25;
    std::size_t max_bucket_size = 10000;
    std::uint64_t seed = 0;  // drives leader sampling and bucket splitting
    int threads = 0;         // 0 resolves via STARS_THREADS, then hardware
};

struct BuildResult {
    SimilarityGraph graph;
    BuildReport report;
};

// Seeded shuffle chopped into consecutive chunks of at most `cap` members.
// Buckets already within the cap pass through untouched.
inline std::vector<std::vector<PointId>> split_oversized_bucket(
    const std::vector<PointId>& members, std::size_t cap, std::uint64_t rng_key) {
    if (cap == 0) throw std::invalid_argument("bucket cap must be positive");
    if (members.size() <= cap) return {members};
    std::vector<PointId> shuffled = members;
    SplitMix rng(rng_key);
    deterministic_shuffle(shuffled, rng);
    std::vector<std::vector<PointId>> chunks;
    for (std::size_t base = 0; base < shuffled.size(); base += cap) {
        const std::size_t hi = std::min(shuffled.size(), base + cap);
        chunks.emplace_back(shuffled.begin() + base, shuffled.begin() + hi);
    }
    return chunks;
}

namespace detail {

struct RepEdges {
    std::vector<Edge> edges;
    std::uint64_t comparisons = 0;
    std::uint64_t hash_evals = 0;
    double sketch_seconds = 0.0;
    double score_seconds = 0.0;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Groups points by full-sketch digest; members come out id-ascending.
inline std::vector<std::pair<std::uint64_t, std::vector<PointId>>> bucket_by_key(
    const std::vector<std::uint64_t>& keys) {
    std::vector<std::pair<std::uint64_t, PointId>> order(keys.size());
    for (PointId p = 0; p < keys.size(); ++p) order[p] = {keys[p], p};
    std::sort(order.begin(), order.end());
    std::vector<std::pair<std::uint64_t, std::vector<PointId>>> buckets;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && order[j].first == order[i].first) ++j;
        std::vector<PointId> members;
        members.reserve(j - i);
        for (std::size_t k = i; k < j; ++k) members.push_back(order[k].second);
        buckets.emplace_back(order[i].first, std::move(members));
        i = j;
    }
    return buckets;
}

// Sketch every point for one repetition and digest into bucket ids.
inline std::vector<std::uint64_t> bucket_ids_for_rep(const HashFamily& family,
                                                     const DataView& view,
                                                     std::uint32_t ell, std::uint64_t rep,
                                                     std::uint64_t& hash_evals) {
    const std::size_t n = view.size();
    SketchPlan plan(family, view, ell, rep);
    std::vector<std::uint64_t> ids(n);
    std::vector<std::uint64_t> sketch(ell);
    for (PointId p = 0; p < n; ++p) {
        hash_evals += plan.eval_point(p, sketch.data());
        ids[p] = bucket_key(sketch);
    }
    return ids;
}

// Leaders-versus-bucket scoring; leader pairs are evaluated once. Admits
// pairs with similarity >= r1 (or everything, when admit_all).
template <typename Emit>
void score_star(const Measure& measure, const std::vector<PointId>& members,
                const std::vector<std::uint32_t>& leader_slots, double r1, bool admit_all,
                std::vector<std::int32_t>& rank_scratch, std::uint64_t& comparisons,
                Emit&& emit) {
    const std::size_t m = members.size();
    rank_scratch.assign(m, -1);
    for (std::uint32_t r = 0; r < leader_slots.size(); ++r)
        rank_scratch[leader_slots[r]] = static_cast<std::int32_t>(r);
    for (std::uint32_t r = 0; r < leader_slots.size(); ++r) {
        const PointId x = members[leader_slots[r]];
        for (std::size_t mi = 0; mi < m; ++mi) {
            const std::int32_t mr = rank_scratch[mi];
            if (mr >= 0 && mr <= static_cast<std::int32_t>(r)) continue;  // self or earlier leader
            const PointId y = members[mi];
            const double mu = measure(x, y);
            ++comparisons;
            if (admit_all || mu >= r1) emit(x, y, mu);
        }
    }
}

template <typename Emit>
void score_all_pairs(const Measure& measure, const std::vector<PointId>& members, double r1,
                     bool admit_all, std::uint64_t& comparisons, Emit&& emit) {
    for (std::size_t i = 0; i + 1 < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const double mu = measure(members[i], members[j]);
            ++comparisons;
            if (admit_all || mu >= r1) emit(members[i], members[j], mu);
        }
}

enum class BucketScoring { Star, AllPairs };

inline RepEdges run_threshold_rep(const DataView& view, const Measure& measure,
                                  const HashFamily& family, const ThresholdConfig& cfg,
                                  std::uint64_t rep, BucketScoring scoring) {
    RepEdges out;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::uint64_t> ids =
        bucket_ids_for_rep(family, view, cfg.sketch_length, rep, out.hash_evals);
    out.sketch_seconds = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    std::vector<std::int32_t> rank_scratch;
    const auto emit = [&](PointId x, PointId y, double mu) {
        out.edges.push_back(make_edge(x, y, mu));
    };
    for (auto& [bucket_id, members] : bucket_by_key(ids)) {
        if (members.size() < 2) continue;
        const std::uint64_t split_key = key_combine(
            key_combine(key_combine(cfg.seed, rep), tag::split), bucket_id);
        const auto sub_buckets =
            split_oversized_bucket(members, cfg.max_bucket_size, split_key);
        for (std::size_t sub = 0; sub < sub_buckets.size(); ++sub) {
            const auto& group = sub_buckets[sub];
            if (group.size() < 2) continue;
            if (scoring == BucketScoring::AllPairs) {
                score_all_pairs(measure, group, cfg.r1, false, out.comparisons, emit);
                continue;
            }
            std::uint64_t leader_key = key_combine(
                key_combine(key_combine(cfg.seed, rep), tag::leaders), bucket_id);
            if (sub_buckets.size() > 1) leader_key = key_combine(leader_key, sub);
            SplitMix rng(leader_key);
            const auto leader_slots =
                sample_without_replacement(group.size(), cfg.leaders, rng);
            score_star(measure, group, leader_slots, cfg.r1, false, rank_scratch,
                       out.comparisons, emit);
        }
    }
    out.score_seconds = seconds_since(t1);
    return out;
}

inline void check_threshold_config(const DataView& view, const Measure& measure,
                                   const ThresholdConfig& cfg) {
    if (view.size() == 0) throw std::invalid_argument("empty dataset");
    if (measure.size() != view.size())
        throw std::invalid_argument("measure and dataset point counts differ");
    if (cfg.repetitions == 0) throw std::invalid_argument("repetitions must be positive");
    if (cfg.sketch_length == 0) throw std::invalid_argument("sketch length must be positive");
    if (cfg.max_bucket_size < 2) throw std::invalid_argument("max bucket size must be >= 2");
}

inline BuildResult run_threshold_build(const DataView& view, const Measure& measure,
                                       const HashFamily& family, const ThresholdConfig& cfg,
                                       BucketScoring scoring) {
    check_threshold_config(view, measure, cfg);
    if (scoring == BucketScoring::Star && cfg.leaders == 0)
        throw std::invalid_argument("leader count must be positive");
    validate_for_family(view, family);
    warn_on_mismatch(family.kind, measure.kind());

    BuildResult result;
    GraphBuilder builder(view.size());
    const unsigned threads = resolve_threads(cfg.threads);
    const auto t0 = std::chrono::steady_clock::now();
    rounds<RepEdges>(
        cfg.repetitions, threads,
        [&](std::size_t rep) {
            return run_threshold_rep(view, measure, family, cfg,
                                     static_cast<std::uint64_t>(rep), scoring);
        },
        [&](std::size_t, RepEdges&& rep_edges) {
            result.report.comparisons += rep_edges.comparisons;
            result.report.hash_evals += rep_edges.hash_evals;
            result.report.edges_emitted += rep_edges.edges.size();
            result.report.phase_seconds["sketch"] += rep_edges.sketch_seconds;
            result.report.phase_seconds["score"] += rep_edges.score_seconds;
            for (const Edge& e : rep_edges.edges) builder.insert(e.a, e.b, e.weight);
        });
    const auto t1 = std::chrono::steady_clock::now();
    result.graph = builder.finalize();
    result.report.edges_final = result.graph.edges.size();
    result.report.phase_seconds["merge"] = seconds_since(t1);
    result.report.phase_seconds["total"] = seconds_since(t0);
    return result;
}

}  // namespace detail

// Star-scored threshold spanner; the workhorse construction.
inline BuildResult build_threshold_spanner(const DataView& view, const Measure& measure,
                                           const HashFamily& family,
                                           const ThresholdConfig& cfg) {
    return detail::run_threshold_build(view, measure, family, cfg,
                                       detail::BucketScoring::Star);
}

// Same bucketing, every pair inside each bucket scored. The baseline the
// star construction is measured against.
inline BuildResult build_allpairs_lsh(const DataView& view, const Measure& measure,
                                      const HashFamily& family, const ThresholdConfig& cfg) {
    return detail::run_threshold_build(view, measure, family, cfg,
                                       detail::BucketScoring::AllPairs);
}

}  // namespace stars
