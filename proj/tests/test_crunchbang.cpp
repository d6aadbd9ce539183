#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mgpbbbc/crunchbang.hpp"

using namespace mgpbbbc;

namespace {

Problem box(std::size_t dim, double lo, double hi) {
    Problem problem;
    problem.dim = dim;
    problem.lower.assign(dim, lo);
    problem.upper.assign(dim, hi);
    problem.evaluate = [](const std::vector<double>& x) { return -x[0] * x[0]; };
    return problem;
}

Problem box2(double lo0, double hi0, double lo1, double hi1) {
    Problem problem;
    problem.dim = 2;
    problem.lower = {lo0, lo1};
    problem.upper = {hi0, hi1};
    problem.evaluate = [](const std::vector<double>& x) { return -x[0] * x[0]; };
    return problem;
}

Individual make_ind(std::vector<double> x, double fitness) {
    Individual ind;
    ind.x = std::move(x);
    ind.fitness = fitness;
    return ind;
}

}  // namespace

TEST_CASE("extent exploration value") {
    const Problem problem = box(1, 0.0, 10.0);
    // e1 = 2.5, a = (2.5 - 0.1) / ln(60), e(1) = 2.5 - a ln 2.
    const auto extent = get_extent(1, 100, problem);
    REQUIRE(extent.size() == 1);
    CHECK(extent[0] == Catch::Approx(2.0936948617629247).margin(1e-9));
}

TEST_CASE("extent reaches exactly 0.1 at the exploration boundary") {
    const Problem problem = box(1, 0.0, 10.0);
    for (const std::size_t g : {std::size_t{10}, std::size_t{50}, std::size_t{100},
                                std::size_t{1000}}) {
        const auto last_exploration =
            static_cast<std::size_t>(std::ceil(0.6 * static_cast<double>(g))) - 1;
        const auto e_last = get_extent(last_exploration, g, problem);
        CHECK(std::abs(e_last[0] - 0.1) <= 1e-9);
        const auto e_first_exploit = get_extent(last_exploration + 1, g, problem);
        CHECK(e_first_exploit[0] == 1e-1);
    }
}

TEST_CASE("extent exploitation levels and plateau widths") {
    const Problem problem = box(1, 0.0, 10.0);
    SECTION("late iterations sit on the smallest level") {
        CHECK(get_extent(95, 100, problem)[0] == 1e-5);
        CHECK(get_extent(100, 100, problem)[0] == 1e-5);
        CHECK(get_extent(10, 10, problem)[0] == 1e-5);
        CHECK(get_extent(1000, 1000, problem)[0] == 1e-5);
    }
    SECTION("plateau shares for g = 100 are 8,8,8,8,9") {
        std::vector<std::size_t> shares(5, 0);
        for (std::size_t it = 60; it <= 100; ++it) {
            const double e = get_extent(it, 100, problem)[0];
            const auto level = static_cast<std::size_t>(std::llround(-std::log10(e)));
            REQUIRE(level >= 1);
            REQUIRE(level <= 5);
            ++shares[level - 1];
        }
        CHECK(shares == std::vector<std::size_t>{8, 8, 8, 8, 9});
    }
}

TEST_CASE("extent schedule is monotone non-increasing per dimension") {
    const Problem problem = box2(0.0, 10.0, -2.0, 2.0);
    for (const std::size_t g : {std::size_t{10}, std::size_t{50}, std::size_t{100},
                                std::size_t{1000}}) {
        std::vector<double> previous = get_extent(1, g, problem);
        for (std::size_t it = 2; it <= g; ++it) {
            const auto extent = get_extent(it, g, problem);
            for (std::size_t d = 0; d < 2; ++d) {
                CHECK(extent[d] <= previous[d]);
                CHECK(extent[d] > 0.0);
            }
            previous = extent;
        }
        // The floor is reached at the end.
        CHECK(previous == std::vector<double>{1e-5, 1e-5});
    }
}

TEST_CASE("extent rejects out-of-range iterations") {
    const Problem problem = box(1, 0.0, 10.0);
    CHECK_THROWS_AS(get_extent(0, 10, problem), std::invalid_argument);
    CHECK_THROWS_AS(get_extent(11, 10, problem), std::invalid_argument);
}

TEST_CASE("offspring quotas: exact mean needs no correction") {
    RngStream rng(1);
    const auto quotas = offspring_per_com(10, {8, 2}, rng);
    CHECK(quotas == std::vector<std::size_t>{5, 5});
}

TEST_CASE("offspring quotas: rounding excess is removed from large niches") {
    RngStream rng(1);
    // mean 2.5 rounds (half away from zero) to 3 per center: one removal.
    const auto quotas = offspring_per_com(5, {3, 2}, rng);
    CHECK(quotas[0] + quotas[1] == 5);
    CHECK(quotas[0] >= 2);
    CHECK(quotas[0] <= 3);
    CHECK(quotas[1] >= 2);
    CHECK(quotas[1] <= 3);
}

TEST_CASE("offspring quotas: shortfall lands on under-populated niches") {
    RngStream rng(2);
    // mean 1.5 rounds to 2 each, total 4; nine more go to centers with
    // NC <= floor(mean) = 1, i.e. the first one (up to the draw cap).
    const auto quotas = offspring_per_com(13, {1, 2}, rng);
    CHECK(quotas[0] + quotas[1] == 13);
    CHECK(quotas[0] >= quotas[1]);
}

TEST_CASE("offspring quotas always sum to n") {
    RngStream rng(3);
    for (int round = 0; round < 1000; ++round) {
        const std::size_t m = 1 + rng.index(12);
        std::vector<std::size_t> counts(m);
        for (auto& c : counts) c = rng.index(30);
        const std::size_t n = m + rng.index(200);
        const auto quotas = offspring_per_com(n, counts, rng);
        REQUIRE(quotas.size() == m);
        CHECK(std::accumulate(quotas.begin(), quotas.end(), std::size_t{0}) == n);
    }
    CHECK_THROWS_AS(offspring_per_com(5, {}, rng), std::invalid_argument);
}

TEST_CASE("offspring quotas favour small niches on average") {
    // Pooled over many vectors and seeds: the smallest niche receives at
    // least as many offspring as the largest one.
    double small_sum = 0.0;
    double large_sum = 0.0;
    std::size_t samples = 0;
    for (int vec = 0; vec < 1000; ++vec) {
        RngStream gen(5000 + vec);
        const std::size_t m = 2 + gen.index(8);
        std::vector<std::size_t> counts(m);
        for (auto& c : counts) c = gen.index(40);
        const std::size_t n = 2 * m + gen.index(100);
        const auto smallest = static_cast<std::size_t>(
            std::min_element(counts.begin(), counts.end()) - counts.begin());
        const auto largest = static_cast<std::size_t>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        for (int seed = 0; seed < 10; ++seed) {
            RngStream rng(9000 + vec * 10 + seed);
            const auto quotas = offspring_per_com(n, counts, rng);
            small_sum += static_cast<double>(quotas[smallest]);
            large_sum += static_cast<double>(quotas[largest]);
            ++samples;
        }
    }
    REQUIRE(samples == 10000);
    CHECK(small_sum >= large_sum);
}

TEST_CASE("big crunch keeps the best member of every cluster") {
    RngStream rng(4);
    const std::vector<Individual> archive{make_ind({0.0}, 5.0), make_ind({0.1}, 9.0),
                                          make_ind({0.2}, 7.0), make_ind({10.0}, 3.0),
                                          make_ind({10.1}, 3.0)};
    const auto result = big_crunch(archive, 0.5, rng);
    REQUIRE(result.centers.size() == 2);
    CHECK(result.centers[0].x == std::vector<double>{0.1});
    CHECK(result.centers[0].fitness == 9.0);
    CHECK(result.centers[0].niche_count == 3);
    // Tie at fitness 3: the earliest archive member wins.
    CHECK(result.centers[1].x == std::vector<double>{10.0});
    CHECK(result.centers[1].fitness == 3.0);
    CHECK(result.centers[1].niche_count == 2);

    REQUIRE(result.offspring_counts.size() == 2);
    CHECK(result.offspring_counts[0] + result.offspring_counts[1] == archive.size());

    CHECK_THROWS_AS(big_crunch({}, 0.5, rng), std::invalid_argument);
}

TEST_CASE("big bang spawns clamped offspring near their centers") {
    const Problem problem = box(2, -5.0, 5.0);
    const std::vector<CenterOfMass> centers{{{-4.0, -4.0}, 1.0, 3}, {{4.9, 0.0}, 2.0, 2}};
    const std::vector<std::size_t> quotas{3, 2};
    const std::size_t g = 10;
    const std::size_t it = 10;  // extent 1e-5 everywhere
    RngStream rng(6);
    const auto offspring = big_bang(centers, quotas, it, g, problem, rng);
    REQUIRE(offspring.size() == 5);
    for (std::size_t i = 0; i < offspring.size(); ++i) {
        const auto& center = centers[i < 3 ? 0 : 1].x;
        REQUIRE(offspring[i].x.size() == 2);
        CHECK_FALSE(is_evaluated(offspring[i]));
        CHECK_FALSE(offspring[i].tag);
        for (std::size_t d = 0; d < 2; ++d) {
            CHECK(offspring[i].x[d] >= -5.0);
            CHECK(offspring[i].x[d] <= 5.0);
            CHECK(std::abs(offspring[i].x[d] - center[d]) <= 1e-5);
        }
    }

    // A center close to the boundary under a wide early extent gets clamped.
    const std::vector<CenterOfMass> edge{{{4.9, -4.9}, 1.0, 30}};
    RngStream rng2(7);
    const auto clamped = big_bang(edge, {30}, 1, g, problem, rng2);
    bool hit_boundary = false;
    for (const auto& ind : clamped) {
        for (double v : ind.x) {
            REQUIRE(v >= -5.0);
            REQUIRE(v <= 5.0);
            hit_boundary = hit_boundary || v == 5.0 || v == -5.0;
        }
    }
    CHECK(hit_boundary);
}

TEST_CASE("big bang draws centers, offspring, then dimensions in order") {
    const Problem problem = box(2, -5.0, 5.0);
    const std::vector<CenterOfMass> centers{{{0.0, 1.0}, 1.0, 2}, {{2.0, -2.0}, 2.0, 1}};
    const std::vector<std::size_t> quotas{2, 1};
    const std::size_t it = 2;
    const std::size_t g = 10;
    RngStream rng(42);
    const auto offspring = big_bang(centers, quotas, it, g, problem, rng);
    REQUIRE(offspring.size() == 3);

    RngStream replay(42);
    const auto extent = get_extent(it, g, problem);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t k = 0; k < quotas[c]; ++k) {
            const std::size_t i = c == 0 ? k : 2 + k;
            for (std::size_t d = 0; d < 2; ++d) {
                const double expected = std::clamp(
                    centers[c].x[d] + extent[d] * replay.symmetric_unit(), -5.0, 5.0);
                CHECK(offspring[i].x[d] == expected);
            }
        }
    }

    CHECK_THROWS_AS(big_bang(centers, {1}, it, g, problem, rng), std::invalid_argument);
}

TEST_CASE("volume-ratio bandwidth closed forms") {
    // D = 1, range 10, ratio 10: the 1-ball of radius h has volume 2h, so
    // 10 / (2h) = 10 gives h = 0.5.
    CHECK(bandwidth_from_volume_ratio(box(1, 0.0, 10.0), 10.0) ==
          Catch::Approx(0.5).epsilon(1e-12));
    // D = 2, unit square, ratio 1/pi: pi h^2 = pi * (1/pi) => h = 1.
    CHECK(bandwidth_from_volume_ratio(box(2, 0.0, 1.0), 1.0 / std::numbers::pi) ==
          Catch::Approx(1.0).epsilon(1e-12));
    // Doubling every side scales h by 2 in any dimension.
    for (std::size_t dim : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        const double h1 = bandwidth_from_volume_ratio(box(dim, 0.0, 3.0), 100.0);
        const double h2 = bandwidth_from_volume_ratio(box(dim, 0.0, 6.0), 100.0);
        CHECK(h2 == Catch::Approx(2.0 * h1).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bandwidth_from_volume_ratio(box(1, 0.0, 1.0), 0.0), std::invalid_argument);
}

TEST_CASE("spread bandwidth uses the maximum pairwise distance") {
    const std::vector<Individual> population{make_ind({0.0, 0.0}, 1.0), make_ind({3.0, 4.0}, 2.0),
                                             make_ind({1.0, 1.0}, 3.0)};
    const auto h = bandwidth_from_spread(population, 5.0);
    REQUIRE(h.has_value());
    CHECK(*h == 1.0);

    CHECK_FALSE(bandwidth_from_spread({}, 5.0).has_value());
    CHECK_FALSE(bandwidth_from_spread({make_ind({1.0}, 0.0)}, 5.0).has_value());
    const std::vector<Individual> coincident{make_ind({2.0}, 1.0), make_ind({2.0}, 2.0)};
    CHECK_FALSE(bandwidth_from_spread(coincident, 5.0).has_value());
    CHECK_THROWS_AS(bandwidth_from_spread(population, -1.0), std::invalid_argument);
}

TEST_CASE("bandwidth selection per strategy") {
    const Problem problem = box(2, 0.0, 1.0);
    const std::vector<Individual> population{make_ind({0.0, 0.0}, 1.0), make_ind({0.3, 0.4}, 2.0)};
    const double nan = std::numeric_limits<double>::quiet_NaN();

    CHECK(select_bandwidth(BandwidthStrategy::fixed_value(0.42), problem, population, nan) == 0.42);
    CHECK(select_bandwidth(BandwidthStrategy::volume(2000.0), problem, population, nan) ==
          bandwidth_from_volume_ratio(problem, 2000.0));
    CHECK(select_bandwidth(BandwidthStrategy::spread(5.0), problem, population, nan) ==
          Catch::Approx(0.1).epsilon(1e-12));

    const std::vector<Individual> degenerate{make_ind({0.5, 0.5}, 1.0),
                                             make_ind({0.5, 0.5}, 2.0)};
    CHECK(select_bandwidth(BandwidthStrategy::spread(5.0), problem, degenerate, 0.7) == 0.7);
    CHECK(select_bandwidth(BandwidthStrategy::spread(5.0), problem, degenerate, nan) ==
          bandwidth_from_volume_ratio(problem, 2000.0));
}
