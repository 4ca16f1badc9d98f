#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "stars/build_sorting.hpp"
#include "stars/evaluate.hpp"
#include "stars/io.hpp"
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

std::uint64_t star_cost(std::uint64_t m, std::uint64_t s) {
    const std::uint64_t L = std::min(m, s);
    return L * (m - 1) - L * (L - 1) / 2;
}

// Recounts scoring work from the public shift and block layout alone.
std::uint64_t expected_comparisons(std::size_t n, const SortingConfig& cfg, bool star) {
    std::uint64_t total = 0;
    for (std::uint64_t rep = 0; rep < cfg.repetitions; ++rep) {
        const std::uint32_t r = block_shift(cfg.seed, rep, cfg.window);
        for (const auto& [lo, hi] : make_blocks(n, cfg.window, r)) {
            std::uint64_t left = hi - lo;
            if (left < 2) continue;
            while (left > 0) {
                const std::uint64_t m = std::min<std::uint64_t>(left, cfg.max_block_size);
                left -= m;
                if (m < 2) continue;
                total += star ? star_cost(m, cfg.leaders_per_block) : m * (m - 1) / 2;
            }
        }
    }
    return total;
}

}  // namespace

TEST_CASE("blocks start with the shift and continue window-wide") {
    using Block = std::pair<std::size_t, std::size_t>;
    REQUIRE(make_blocks(10, 4, 3) ==
            std::vector<Block>{{0, 3}, {3, 7}, {7, 10}});
    REQUIRE(make_blocks(10, 4, 4) ==
            std::vector<Block>{{0, 4}, {4, 8}, {8, 10}});
    REQUIRE(make_blocks(5, 10, 7) == std::vector<Block>{{0, 5}});
    REQUIRE_THROWS_AS(make_blocks(10, 4, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_blocks(10, 4, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(make_blocks(0, 4, 3), std::invalid_argument);
}

TEST_CASE("block shifts stay in range and vary across repetitions") {
    std::set<std::uint32_t> seen;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const std::uint32_t r = block_shift(42, rep, 7);
        REQUIRE(r >= 4);
        REQUIRE(r <= 7);
        REQUIRE(block_shift(42, rep, 7) == r);  // pure function of its arguments
        seen.insert(r);
    }
    REQUIRE(seen.size() >= 2);
}

TEST_CASE("sketch sort is lexicographic with id tie-break") {
    std::vector<std::pair<std::vector<std::uint64_t>, PointId>> keys;
    keys.push_back({{5}, 2});
    keys.push_back({{3}, 7});
    keys.push_back({{3}, 1});
    REQUIRE(sort_by_sketch(keys) == std::vector<PointId>{1, 7, 2});

    // flat variant: keys (2,9), (2,3), (1,5) for ids 0, 1, 2
    const std::vector<std::uint64_t> flat{2, 9, 2, 3, 1, 5};
    REQUIRE(sort_by_sketch_flat(flat, 2, 3) == std::vector<PointId>{2, 1, 0});

    const std::vector<std::uint64_t> tied{4, 4, 4, 4};
    REQUIRE(sort_by_sketch_flat(tied, 2, 2) == std::vector<PointId>{0, 1});
    REQUIRE_THROWS_AS(sort_by_sketch_flat(flat, 4, 3), std::invalid_argument);
}

TEST_CASE("auto mode compares window width against leader budget") {
    SortingConfig cfg;
    cfg.window = 250;
    cfg.leaders_per_block = 25;
    cfg.auto_threshold = 2.0;
    REQUIRE(select_mode(cfg, 1000) == BlockMode::Leaders);
    cfg.window = 20;
    REQUIRE(select_mode(cfg, 1000) == BlockMode::AllPairsInBlock);
    cfg.window = 50;  // boundary is strict
    REQUIRE(select_mode(cfg, 1000) == BlockMode::AllPairsInBlock);
    cfg.mode = BlockMode::Leaders;
    REQUIRE(select_mode(cfg, 1000) == BlockMode::Leaders);
    cfg.mode = BlockMode::AllPairsInBlock;
    cfg.window = 500;
    REQUIRE(select_mode(cfg, 1000) == BlockMode::AllPairsInBlock);
}

TEST_CASE("one leader stitches identical points into a two-hop star") {
    const Dataset ds = identical_points(60);
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;

    SortingConfig cfg;
    cfg.k = 10;
    cfg.window = 120;  // shift >= 60, so one block holds everyone
    cfg.sketch_dim = 4;
    cfg.repetitions = 1;
    cfg.leaders_per_block = 1;
    cfg.mode = BlockMode::Leaders;
    cfg.degree_cap = 100;
    const auto result = build_knn_spanner(view, measure, family, cfg);
    REQUIRE(result.graph.edges.size() == 59);
    REQUIRE(result.report.comparisons == 59);

    const Adjacency adj(result.graph);
    for (PointId p = 0; p < 60; ++p)
        REQUIRE(two_hop_neighborhood(adj, p).size() == 59);
}

TEST_CASE("saturated all-pairs blocks capped at k recover the exact knn graph") {
    const auto ds = gen_gaussian_mixture({.n = 50, .dim = 5, .modes = 5,
                                          .sigma = 0.2, .seed = 12});
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;
    family.master_seed = 3;

    SortingConfig cfg;
    cfg.k = 10;
    cfg.window = 100;  // every block covers all 50 points
    cfg.sketch_dim = 2;
    cfg.repetitions = 2;
    cfg.mode = BlockMode::AllPairsInBlock;
    cfg.degree_cap = 10;
    const auto result = build_knn_spanner(view, measure, family, cfg);
    REQUIRE(result.report.comparisons == 2 * 1225);
    REQUIRE(result.report.edges_emitted == result.report.comparisons);

    ComparisonCounter counter;
    OracleParams params;
    params.k = 10;
    params.want_threshold = false;
    const auto truth = allpairs_oracle(measure, params, counter);
    std::set<std::pair<PointId, PointId>> expected;
    for (PointId p = 0; p < 50; ++p)
        for (PointId q : truth.knn[p])
            expected.emplace(std::min(p, q), std::max(p, q));

    REQUIRE(edge_pairs(result.graph) == expected);
    for (const Edge& e : result.graph.edges) REQUIRE(e.weight == measure(e.a, e.b));
}

TEST_CASE("sorting comparisons match the shift-and-block recount") {
    const auto ds = gen_gaussian_mixture({.n = 137, .dim = 7, .modes = 7,
                                          .sigma = 0.3, .seed = 8});
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;
    family.master_seed = 17;

    SortingConfig cfg;
    cfg.k = 5;
    cfg.window = 25;
    cfg.sketch_dim = 3;
    cfg.repetitions = 4;
    cfg.leaders_per_block = 5;
    cfg.mode = BlockMode::Leaders;
    cfg.degree_cap = 200;
    cfg.seed = 77;

    auto result = build_knn_spanner(view, measure, family, cfg);
    REQUIRE(result.report.comparisons == expected_comparisons(137, cfg, true));
    REQUIRE(result.report.hash_evals == cfg.repetitions * 137 * cfg.sketch_dim);

    cfg.max_block_size = 10;  // force block splitting into the recount too
    result = build_knn_spanner(view, measure, family, cfg);
    REQUIRE(result.report.comparisons == expected_comparisons(137, cfg, true));

    cfg.max_block_size = 20000;
    cfg.mode = BlockMode::AllPairsInBlock;
    result = build_knn_spanner(view, measure, family, cfg);
    REQUIRE(result.report.comparisons == expected_comparisons(137, cfg, false));
}

TEST_CASE("uncapped sorting runs grow monotonically with repetitions") {
    const auto ds = gen_gaussian_mixture({.n = 80, .dim = 6, .modes = 6,
                                          .sigma = 0.25, .seed = 14});
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;
    family.master_seed = 23;

    SortingConfig cfg;
    cfg.k = 5;
    cfg.window = 16;
    cfg.sketch_dim = 2;
    cfg.leaders_per_block = 4;
    cfg.mode = BlockMode::Leaders;
    cfg.degree_cap = 100;  // above any possible degree
    cfg.seed = 5;

    cfg.repetitions = 1;
    const auto g1 = edge_pairs(build_knn_spanner(view, measure, family, cfg).graph);
    cfg.repetitions = 2;
    const auto g2 = edge_pairs(build_knn_spanner(view, measure, family, cfg).graph);
    cfg.repetitions = 5;
    const auto g5 = edge_pairs(build_knn_spanner(view, measure, family, cfg).graph);

    REQUIRE(std::includes(g2.begin(), g2.end(), g1.begin(), g1.end()));
    REQUIRE(std::includes(g5.begin(), g5.end(), g2.begin(), g2.end()));
}

TEST_CASE("sorting builder output is independent of the thread count") {
    const auto ds = gen_gaussian_mixture({.n = 90, .dim = 5, .modes = 5,
                                          .sigma = 0.2, .seed = 19});
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;
    family.master_seed = 29;

    SortingConfig cfg;
    cfg.k = 8;
    cfg.window = 20;
    cfg.sketch_dim = 3;
    cfg.repetitions = 3;
    cfg.leaders_per_block = 5;
    cfg.degree_cap = 12;
    cfg.seed = 51;
    cfg.threads = 1;
    const auto a = build_knn_spanner(view, measure, family, cfg);
    cfg.threads = 3;
    const auto b = build_knn_spanner(view, measure, family, cfg);
    REQUIRE(graph_to_string(a.graph) == graph_to_string(b.graph));
    REQUIRE(a.report.comparisons == b.report.comparisons);
}

TEST_CASE("sorting builder rejects bad configurations") {
    const Dataset ds = identical_points(4);
    const DataView view{&ds, nullptr};
    const Measure measure(MeasureKind::Angular, view);
    HashFamily family;

    const auto expect_throw = [&](auto mutate) {
        SortingConfig cfg;
        mutate(cfg);
        REQUIRE_THROWS_AS(build_knn_spanner(view, measure, family, cfg),
                          std::invalid_argument);
    };
    expect_throw([](SortingConfig& c) { c.k = 0; });
    expect_throw([](SortingConfig& c) { c.window = 1; });
    expect_throw([](SortingConfig& c) { c.sketch_dim = 0; });
    expect_throw([](SortingConfig& c) { c.repetitions = 0; });
    expect_throw([](SortingConfig& c) { c.degree_cap = 0; });
    expect_throw([](SortingConfig& c) { c.max_block_size = 1; });
    expect_throw([](SortingConfig& c) {
        c.mode = BlockMode::Leaders;
        c.leaders_per_block = 0;
    });
}
