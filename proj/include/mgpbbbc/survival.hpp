#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "core.hpp"

namespace mgpbbbc {

/// One entry of the pairwise-distance enumeration.
struct PairRecord {
    double dist = 0.0;
    std::size_t first = 0;
    std::size_t second = 0;
};

/// survival() shrinks its filter threshold by this factor per decay pass.
inline constexpr double kThresholdDecay = 0.9;
/// Hard cap on decay passes inside one survival() call.
inline constexpr int kMaxDecayPasses = 200;
/// Threshold floor used by runs: this fraction of the initial bandwidth.
inline constexpr double kThresholdFloorScale = 1e-12;

/// Euclidean distances of all index pairs i < j, enumerated in nested scan
/// order (0,1), (0,2), ..., (1,2), ...
inline std::vector<PairRecord> pairwise_distances(const std::vector<Individual>& population) {
    std::vector<PairRecord> records;
    const std::size_t n = population.size();
    if (n < 2) return records;
    records.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            records.push_back({euclidean_distance(population[i].x, population[j].x), i, j});
    return records;
}

namespace detail {

/// Tagging scan of the filtering stage. For every record closer than th
/// whose members are both still untagged, the lower-fitness member gets
/// tagged; on equal fitness the second index loses, so earlier members win.
inline std::vector<char> filter_tags(const std::vector<Individual>& population,
                                     std::span<const PairRecord> records, double th) {
    std::vector<char> tagged(population.size(), 0);
    for (const auto& rec : records) {
        if (!(rec.dist < th)) continue;
        if (tagged[rec.first] || tagged[rec.second]) continue;
        if (population[rec.first].fitness >= population[rec.second].fitness)
            tagged[rec.second] = 1;
        else
            tagged[rec.first] = 1;
    }
    return tagged;
}

/// Partial Fisher-Yates draw of up to k distinct entries from `pool`
/// (reordered in place). One stream index per accepted entry.
inline std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t>& pool,
                                                         std::size_t k, RngStream& rng) {
    std::vector<std::size_t> picked;
    const std::size_t take = std::min(k, pool.size());
    picked.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
        picked.push_back(pool[i]);
    }
    return picked;
}

}  // namespace detail

/// Removes, for each qualifying pair, the lower-fitness member and returns
/// the survivors in their original order. No two survivors lie within th of
/// each other.
inline std::vector<Individual> filter_population(const std::vector<Individual>& population,
                                                 std::span<const PairRecord> records, double th) {
    const std::vector<char> tagged = detail::filter_tags(population, records, th);
    std::vector<Individual> survivors;
    survivors.reserve(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (tagged[i]) continue;
        survivors.push_back(population[i]);
        survivors.back().tag = false;
    }
    return survivors;
}

/// Result of one survival stage: the next archive and the (possibly decayed)
/// filter threshold to carry into the next generation.
struct SurvivalResult {
    std::vector<Individual> archive;
    double threshold = 0.0;
};

/// Merges freshly evaluated offspring into the elite archive.
///
/// With an empty archive the offspring pass through unchanged. Otherwise the
/// archive and the offspring are filtered separately -- always restarting
/// from the original sets -- and th decays by 10% per pass until the union
/// holds at least n = |offspring| members. If th would sink below th_floor,
/// or after 200 decay passes, the shortfall is instead filled with distinct
/// random picks from the filtered-out elites (then filtered-out offspring).
/// The union is stable-sorted by fitness descending (offspring before elites
/// on ties) and truncated to n.
inline SurvivalResult survival(const std::vector<Individual>& offspring,
                               const std::vector<Individual>& archive, double th, RngStream& rng,
                               double th_floor = 0.0) {
    if (archive.empty()) return {offspring, th};

    const std::size_t n = offspring.size();
    const auto dist_archive = pairwise_distances(archive);
    const auto dist_offspring = pairwise_distances(offspring);

    std::vector<char> tag_a;
    std::vector<char> tag_o;
    bool underflow = false;
    int passes = 0;
    for (;;) {
        tag_a = detail::filter_tags(archive, dist_archive, th);
        tag_o = detail::filter_tags(offspring, dist_offspring, th);
        const std::size_t union_size =
            static_cast<std::size_t>(std::count(tag_a.begin(), tag_a.end(), 0)) +
            static_cast<std::size_t>(std::count(tag_o.begin(), tag_o.end(), 0));
        if (union_size >= n) break;
        if (passes >= kMaxDecayPasses) {
            underflow = true;
            break;
        }
        th *= kThresholdDecay;
        ++passes;
        if (th < th_floor) {
            underflow = true;
            break;
        }
    }

    // Union in scan order: offspring survivors first, then elite survivors.
    std::vector<Individual> merged;
    merged.reserve(std::max(n, offspring.size() + archive.size()));
    for (std::size_t i = 0; i < offspring.size(); ++i)
        if (!tag_o[i]) merged.push_back(offspring[i]);
    for (std::size_t i = 0; i < archive.size(); ++i)
        if (!tag_a[i]) merged.push_back(archive[i]);

    if (underflow && merged.size() < n) {
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < archive.size(); ++i)
            if (tag_a[i]) pool.push_back(i);
        for (std::size_t idx : detail::draw_without_replacement(pool, n - merged.size(), rng))
            merged.push_back(archive[idx]);
        if (merged.size() < n) {
            pool.clear();
            for (std::size_t i = 0; i < offspring.size(); ++i)
                if (tag_o[i]) pool.push_back(i);
            for (std::size_t idx : detail::draw_without_replacement(pool, n - merged.size(), rng))
                merged.push_back(offspring[idx]);
        }
    }

    std::stable_sort(merged.begin(), merged.end(),
                     [](const Individual& a, const Individual& b) { return a.fitness > b.fitness; });
    if (merged.size() > n) merged.resize(n);
    return {std::move(merged), th};
}

}  // namespace mgpbbbc
