#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "stars/rng.hpp"

using namespace stars;

TEST_CASE("mix64 scrambles and separates nearby inputs") {
    REQUIRE(mix64(0) != 0);
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(mix64(i));
    REQUIRE(seen.size() == 10000);
}

TEST_CASE("key_combine depends on order and on every argument") {
    const std::uint64_t s = 42;
    REQUIRE(key_combine(key_combine(s, 1), 2) != key_combine(key_combine(s, 2), 1));
    REQUIRE(key_combine(s, 1) != key_combine(s, 2));
    REQUIRE(key_combine(1, 7) != key_combine(2, 7));
}

TEST_CASE("unit mappings stay inside their intervals") {
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const std::uint64_t x = mix64(i);
        const double u = to_unit(x);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        const double v = to_unit_open(x);
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
    }
    REQUIRE(to_unit(0) == 0.0);
    REQUIRE(to_unit_open(0) > 0.0);  // the open variant may never produce log(0)
}

TEST_CASE("normal_from_key matches a standard normal in bulk") {
    const std::size_t count = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double z = normal_from_key(key_combine(123, i));
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / count;
    const double var = sumsq / count - mean * mean;
    // 4-sigma bands for the sample mean and variance of 1e5 draws
    REQUIRE(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(count)));
    REQUIRE(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / static_cast<double>(count)));
}

TEST_CASE("SplitMix streams are deterministic per seed") {
    SplitMix a(99), b(99), c(100);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a();
        all_equal = all_equal && (x == b());
        any_diff = any_diff || (x != c());
    }
    REQUIRE(all_equal);
    REQUIRE(any_diff);
}

TEST_CASE("bounded draws cover exactly the requested range") {
    SplitMix rng(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 3000; ++i) {
        const std::uint64_t v = rng.between(3, 5);
        REQUIRE(v >= 3);
        REQUIRE(v <= 5);
        seen.insert(v);
    }
    REQUIRE(seen == std::set<std::uint64_t>{3, 4, 5});

    for (int i = 0; i < 1000; ++i) REQUIRE(rng.below(4) < 4);
    REQUIRE(rng.between(9, 9) == 9);
}

TEST_CASE("below is roughly uniform") {
    SplitMix rng(321);
    std::vector<int> hist(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++hist[rng.below(10)];
    for (int h : hist) {
        REQUIRE(h > draws / 10 - 600);  // ~6 sigma for binomial(1e5, 0.1)
        REQUIRE(h < draws / 10 + 600);
    }
}

TEST_CASE("deterministic_shuffle permutes and repeats per seed") {
    std::vector<std::uint32_t> v(50);
    std::iota(v.begin(), v.end(), 0);
    std::vector<std::uint32_t> w = v;
    SplitMix r1(5), r2(5);
    deterministic_shuffle(v, r1);
    deterministic_shuffle(w, r2);
    REQUIRE(v == w);

    std::vector<std::uint32_t> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::uint32_t> iota(50);
    std::iota(iota.begin(), iota.end(), 0);
    REQUIRE(sorted == iota);
    REQUIRE(v != iota);  // 50 elements, astronomically unlikely to be identity
}

TEST_CASE("sample_without_replacement draws distinct ids from the pool") {
    SplitMix rng(11);
    const auto sample = sample_without_replacement(100, 10, rng);
    REQUIRE(sample.size() == 10);
    std::set<std::uint32_t> uniq(sample.begin(), sample.end());
    REQUIRE(uniq.size() == 10);
    for (std::uint32_t s : sample) REQUIRE(s < 100);

    SplitMix again(11);
    REQUIRE(sample_without_replacement(100, 10, again) == sample);

    SplitMix full(3);
    const auto everything = sample_without_replacement(6, 6, full);
    std::set<std::uint32_t> all(everything.begin(), everything.end());
    REQUIRE(all.size() == 6);

    SplitMix over(4);
    REQUIRE(sample_without_replacement(4, 9, over).size() == 4);  // clamped to pool
}
