#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "stars/build_threshold.hpp"
#include "stars/io.hpp"
#include "stars/lsh.hpp"
#include "stars/similarity.hpp"

using namespace stars;

namespace {

Dataset identical_points(std::size_t n) {
    Dataset ds;
    ds.dim = 2;
    ds.dense.assign(n * 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) ds.dense[i * 2] = 1.0;
    return ds;
}

std::set<std::pair<PointId, PointId>> edge_pairs(const SimilarityGraph& g) {
    std::set<std::pair<PointId, PointId>> out;
    for (const Edge& e : g.edges) out.emplace(e.a, e.b);
    return out;
}

// Re-derives the comparison count through the public sketching interface.
// Chunk sizes depend only on bucket size and the cap, never on the shuffle,
// so the star formula L(m-1) - L(L-1)/2 can be summed without private state.
std::uint64_t expected_comparisons(const DataView& view, const HashFamily& family,
                                   const ThresholdConfig& cfg, bool star) {
    std::uint64_t total = 0;
    for (std::uint64_t rep = 0; rep < cfg.repetitions; ++rep) {
        std::map<std::uint64_t, std::uint64_t> bucket_sizes;
        for (PointId p = 0; p < view.size(); ++p) {
            const auto sketch = sketch_point(family, view, p, cfg.sketch_length, rep);
            ++bucket_sizes[bucket_key(sketch)];
        }
        for (const auto& [key, size] : bucket_sizes) {
            if (size < 2) continue;
            std::vector<std::uint64_t> chunks;
            if (size <= cfg.max_bucket_size) {
                chunks.push_back(size);
            } else {
                std::uint64_t left = size;
                while (left > 0) {
                    const std::uint64_t take =
                        std::min<std::uint64_t>(left, cfg.max_bucket_size);
                    chunks.push_back(take);
                    left -= take;
                }
            }
            for (const std::uint64_t m : chunks) {
                if (m < 2) continue;
                if (star) {
                    const std::uint64_t L = std::min<std::uint64_t>(cfg.leaders, m);
                    total += L * (m - 1) - L * (L - 1) / 2;
                } else {
                    total += m * (m - 1) / 2;
                }
            }
        }
    }
    return total;
}

}  // namespace

TEST_CASE("oversized buckets split into capped chunks") {
    std::vector<PointId> members(25);
    std::iota(members.begin(), members.end(), PointId{0});

    const auto small = split_oversized_bucket(members, 30, 99);
    REQUIRE(small.size() == 1);
    REQUIRE(small[0] == members);  // passthrough keeps order

    const auto chunks = split_oversized_bucket(members, 10, 99);
    REQUIRE(chunks.size() == 3);
    REQUIRE(chunks[0].size() == 10);
    REQUIRE(chunks[1].size() == 10);
    REQUIRE(chunks[2].size() == 5);
    std::set<PointId> seen;
    for (const auto& chunk : chunks) seen.insert(chunk.begin(), chunk.end());
    REQUIRE(seen == std::set<PointId>(members.begin(), members.end()));

    REQUIRE(split_oversized_bucket(members, 10, 99) == chunks);
    REQUIRE(split_oversized_bucket(members, 10, 100) != chunks);
    REQUIRE_THROWS_AS(split_oversized_bucket(members, 0, 1), std::invalid_argument);
}

TEST_CASE("two identical points connect at weight one") {
    const Dataset ds = identical_points(2);
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;

    ThresholdConfig cfg;
    cfg.r1 = 1.0;  // admission is non-strict, exact ties stay in
    cfg.repetitions = 4;
    cfg.sketch_length = 2;
    cfg.leaders = 2;
    const auto result = build_threshold_spanner(view, measure, family, cfg);
    REQUIRE(result.graph.edges.size() == 1);
    REQUIRE(result.graph.edges[0].a == 0);
    REQUIRE(result.graph.edges[0].b == 1);
    REQUIRE(result.graph.edges[0].weight == 1.0);
}

TEST_CASE("orthogonal points stay apart under a high threshold") {
    Dataset ds;
    ds.dim = 2;
    ds.dense = {1.0, 0.0, 0.0, 1.0};
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;

    ThresholdConfig cfg;
    cfg.r1 = 0.9;  // the pair sits at 0.5
    cfg.repetitions = 20;
    cfg.sketch_length = 1;
    cfg.leaders = 2;
    const auto result = build_threshold_spanner(view, measure, family, cfg);
    REQUIRE(result.graph.edges.empty());
}

TEST_CASE("every emitted edge is a recomputable above-threshold pair") {
    const auto ds = gen_gaussian_mixture({.n = 200, .dim = 8, .modes = 5,
                                          .sigma = 0.3, .seed = 1});
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;
    family.master_seed = 7;

    ThresholdConfig cfg;
    cfg.r1 = 0.75;
    cfg.repetitions = 6;
    cfg.sketch_length = 3;
    cfg.leaders = 4;
    cfg.seed = 3;
    const auto result = build_threshold_spanner(view, measure, family, cfg);
    REQUIRE(result.graph.edges.size() > 0);

    std::set<std::pair<PointId, PointId>> seen;
    for (const Edge& e : result.graph.edges) {
        REQUIRE(e.a < e.b);
        REQUIRE(seen.emplace(e.a, e.b).second);  // no duplicates
        REQUIRE(e.weight == measure(e.a, e.b));  // stored weight is the exact similarity
        REQUIRE(e.weight >= cfg.r1);
    }
    REQUIRE(result.report.edges_final == result.graph.edges.size());
}

TEST_CASE("comparison counters match an independent recount") {
    const auto ds = gen_gaussian_mixture({.n = 200, .dim = 8, .modes = 5,
                                          .sigma = 0.3, .seed = 2});
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;
    family.master_seed = 11;

    ThresholdConfig cfg;
    cfg.r1 = 0.7;
    cfg.repetitions = 3;
    cfg.sketch_length = 2;
    cfg.leaders = 3;
    cfg.max_bucket_size = 17;  // forces splitting on this data
    cfg.seed = 5;

    const auto star = build_threshold_spanner(view, measure, family, cfg);
    REQUIRE(star.report.comparisons == expected_comparisons(view, family, cfg, true));
    REQUIRE(star.report.hash_evals ==
            cfg.repetitions * view.size() * cfg.sketch_length);

    const auto all = build_allpairs_lsh(view, measure, family, cfg);
    REQUIRE(all.report.comparisons == expected_comparisons(view, family, cfg, false));
}

TEST_CASE("star scoring against all-pairs on one degenerate bucket") {
    const Dataset ds = identical_points(100);
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;

    ThresholdConfig cfg;
    cfg.r1 = 0.5;
    cfg.repetitions = 1;
    cfg.sketch_length = 1;
    cfg.leaders = 5;

    const auto star = build_threshold_spanner(view, measure, family, cfg);
    // 5 leaders x 99 partners, minus the 10 leader pairs counted twice
    REQUIRE(star.report.comparisons == 485);
    REQUIRE(star.graph.edges.size() == 485);

    const auto all = build_allpairs_lsh(view, measure, family, cfg);
    REQUIRE(all.report.comparisons == 4950);
    REQUIRE(all.graph.edges.size() == 4950);

    cfg.max_bucket_size = 10;  // ten chunks of ten
    const auto split = build_threshold_spanner(view, measure, family, cfg);
    REQUIRE(split.report.comparisons == 350);
}

TEST_CASE("earlier repetitions are a prefix of longer runs") {
    const auto ds = gen_gaussian_mixture({.n = 150, .dim = 8, .modes = 8,
                                          .sigma = 0.2, .seed = 4});
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;
    family.master_seed = 21;

    ThresholdConfig cfg;
    cfg.r1 = 0.8;
    cfg.sketch_length = 2;
    cfg.leaders = 3;
    cfg.seed = 9;

    cfg.repetitions = 1;
    const auto g1 = edge_pairs(build_threshold_spanner(view, measure, family, cfg).graph);
    cfg.repetitions = 2;
    const auto g2 = edge_pairs(build_threshold_spanner(view, measure, family, cfg).graph);
    cfg.repetitions = 5;
    const auto g5 = edge_pairs(build_threshold_spanner(view, measure, family, cfg).graph);

    REQUIRE(std::includes(g2.begin(), g2.end(), g1.begin(), g1.end()));
    REQUIRE(std::includes(g5.begin(), g5.end(), g2.begin(), g2.end()));
    REQUIRE(g5.size() >= g2.size());
}

TEST_CASE("identical configs and thread counts give identical graphs") {
    const auto ds = gen_gaussian_mixture({.n = 120, .dim = 6, .modes = 6,
                                          .sigma = 0.25, .seed = 6});
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;
    family.master_seed = 13;

    ThresholdConfig cfg;
    cfg.r1 = 0.7;
    cfg.repetitions = 4;
    cfg.sketch_length = 2;
    cfg.leaders = 3;
    cfg.seed = 31;
    cfg.threads = 1;
    const auto a = build_threshold_spanner(view, measure, family, cfg);
    const auto b = build_threshold_spanner(view, measure, family, cfg);
    cfg.threads = 3;
    const auto c = build_threshold_spanner(view, measure, family, cfg);

    REQUIRE(graph_to_string(a.graph) == graph_to_string(b.graph));
    REQUIRE(graph_to_string(a.graph) == graph_to_string(c.graph));
    REQUIRE(a.report.comparisons == c.report.comparisons);
}

TEST_CASE("threshold builder rejects bad configurations") {
    const Dataset ds = identical_points(4);
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;

    ThresholdConfig cfg;
    cfg.repetitions = 0;
    REQUIRE_THROWS_AS(build_threshold_spanner(view, measure, family, cfg),
                      std::invalid_argument);
    cfg = {};
    cfg.sketch_length = 0;
    REQUIRE_THROWS_AS(build_threshold_spanner(view, measure, family, cfg),
                      std::invalid_argument);
    cfg = {};
    cfg.leaders = 0;
    REQUIRE_THROWS_AS(build_threshold_spanner(view, measure, family, cfg),
                      std::invalid_argument);
    cfg = {};
    cfg.max_bucket_size = 1;
    REQUIRE_THROWS_AS(build_threshold_spanner(view, measure, family, cfg),
                      std::invalid_argument);

    const Dataset other = identical_points(3);
    const DataView other_view{&other, nullptr};
    const Measure mismatched(MeasureKind::Angular, other_view);
    REQUIRE_THROWS_AS(build_threshold_spanner(view, mismatched, family, ThresholdConfig{}),
                      std::invalid_argument);
}
