#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "clustering.hpp"
#include "core.hpp"

namespace mgpbbbc {

/// Scalar plateau levels of the exploitation phase of the extent schedule.
inline constexpr std::array<double, 5> kExploitationLevels{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
/// Fraction of the generation budget spent in the exploration phase.
inline constexpr double kExplorationShare = 0.6;
/// Rejection draws in offspring_per_com give up after 10 * |NC| attempts.
inline constexpr std::size_t kDrawCapFactor = 10;
/// volume_ratio fallback used when the spread strategy starts degenerate.
inline constexpr double kSpreadFallbackVolumeRatio = 2000.0;

/// Per-dimension disturbance extent for big-bang generation `it` of `g`.
///
/// Exploration (it < 0.6 g): every dimension decays logarithmically from
/// e1 = range/4 down to exactly 1e-1 at the phase boundary,
///   e = e1 - a ln(it + 1),  a = (e1 - 1e-1) / ln(0.6 g).
/// Exploitation (it >= 0.6 g): five equal plateaus step through
/// 1e-1 .. 1e-5, each z = max(1, floor(0.4 g / 5)) generations wide, and the
/// extent becomes a scalar replicated across dimensions.
inline std::vector<double> get_extent(std::size_t it, std::size_t g, const Problem& problem) {
    if (it < 1 || it > g) throw std::invalid_argument("get_extent: generation index out of range");
    std::vector<double> extent(problem.dim);
    const double boundary = kExplorationShare * static_cast<double>(g);
    if (static_cast<double>(it) < boundary) {
        const double denom = std::log(boundary);
        for (std::size_t d = 0; d < problem.dim; ++d) {
            const double e1 = problem.range(d) / 4.0;
            const double a = (e1 - kExploitationLevels.front()) / denom;
            // Never hand off below the first plateau: the formula reaches
            // exactly 1e-1 at the boundary only up to rounding, and for a
            // non-integral 0.6 g its last step can overshoot downwards.
            extent[d] = std::max(e1 - a * std::log(static_cast<double>(it) + 1.0),
                                 kExploitationLevels.front());
        }
    } else {
        const auto start = static_cast<std::size_t>(std::ceil(boundary));
        const auto z = std::max<std::size_t>(
            1, static_cast<std::size_t>((1.0 - kExplorationShare) * static_cast<double>(g) /
                                        static_cast<double>(kExploitationLevels.size())));
        const std::size_t level = std::min(kExploitationLevels.size(), 1 + (it - start) / z);
        std::fill(extent.begin(), extent.end(), kExploitationLevels[level - 1]);
    }
    return extent;
}

/// Distributes exactly n offspring across the niche counts NC (one entry per
/// center of mass). Every entry starts at round(mean(NC)), half away from
/// zero; any shortfall is settled by extra offspring for randomly drawn
/// centers with NC <= floor(mean), any excess by removals from centers with
/// NC >= floor(mean). The rejection loops accept any index after 10 * |NC|
/// draws; removals never push an entry below zero (such draws repeat).
inline std::vector<std::size_t> offspring_per_com(std::size_t n,
                                                  const std::vector<std::size_t>& niche_counts,
                                                  RngStream& rng) {
    if (niche_counts.empty())
        throw std::invalid_argument("offspring_per_com: niche counts are empty");
    const std::size_t m = niche_counts.size();
    unsigned long long nc_sum = 0;
    for (std::size_t c : niche_counts) nc_sum += c;
    const double mean = static_cast<double>(nc_sum) / static_cast<double>(m);
    const double floor_mean = std::floor(mean);
    const long long base = std::llround(mean);

    std::vector<long long> opc(m, base);
    long long total = base * static_cast<long long>(m);
    const auto target = static_cast<long long>(n);
    const std::size_t cap = kDrawCapFactor * m;

    if (total < target) {
        for (long long i = 0; i < target - total; ++i) {
            std::size_t draws = 0;
            for (;;) {
                const std::size_t j = rng.index(m);
                ++draws;
                if (draws > cap || static_cast<double>(niche_counts[j]) <= floor_mean) {
                    ++opc[j];
                    break;
                }
            }
        }
    } else if (total > target) {
        for (long long i = 0; i < total - target; ++i) {
            std::size_t draws = 0;
            for (;;) {
                const std::size_t j = rng.index(m);
                ++draws;
                if (opc[j] == 0) continue;
                if (draws > cap || static_cast<double>(niche_counts[j]) >= floor_mean) {
                    --opc[j];
                    break;
                }
            }
        }
    }

    std::vector<std::size_t> out(m);
    for (std::size_t c = 0; c < m; ++c) out[c] = static_cast<std::size_t>(opc[c]);
    return out;
}

/// One elite chosen to seed a niche: its position and fitness, plus how many
/// archive members its cluster holds.
struct CenterOfMass {
    std::vector<double> x;
    double fitness = 0.0;
    std::size_t niche_count = 0;
};

/// Output of the crunch stage: the per-niche centers and the offspring quota
/// of each (aligned with `centers`; the quotas sum to the archive size).
struct CrunchResult {
    std::vector<CenterOfMass> centers;
    std::vector<std::size_t> offspring_counts;
};

/// Clusters the archive with flat-kernel mean-shift at bandwidth h, keeps the
/// best-fitness member of every cluster (the earliest member wins ties), and
/// allocates the next generation's offspring across the clusters.
inline CrunchResult big_crunch(const std::vector<Individual>& archive, double h, RngStream& rng) {
    if (archive.empty()) throw std::invalid_argument("big_crunch: archive is empty");
    std::vector<std::vector<double>> positions;
    positions.reserve(archive.size());
    for (const auto& ind : archive) positions.push_back(ind.x);
    const ClusterSet clusters = mean_shift(positions, h);

    constexpr auto kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> best(clusters.count(), kUnset);
    std::vector<std::size_t> counts(clusters.count(), 0);
    for (std::size_t i = 0; i < archive.size(); ++i) {
        const std::size_t c = clusters.assignment[i];
        ++counts[c];
        if (best[c] == kUnset || archive[best[c]].fitness < archive[i].fitness) best[c] = i;
    }

    CrunchResult result;
    result.centers.resize(clusters.count());
    for (std::size_t c = 0; c < clusters.count(); ++c)
        result.centers[c] = {archive[best[c]].x, archive[best[c]].fitness, counts[c]};
    result.offspring_counts = offspring_per_com(archive.size(), counts, rng);
    return result;
}

/// Spawns sum(offspring_counts) offspring around the centers of mass: every
/// coordinate is disturbed independently by extent * u with u ~ U(-1, 1) and
/// clamped to the box. Stream order: centers outer, then offspring, then
/// dimensions. Fitness stays unevaluated.
inline std::vector<Individual> big_bang(const std::vector<CenterOfMass>& centers,
                                        const std::vector<std::size_t>& offspring_counts,
                                        std::size_t it, std::size_t g, const Problem& problem,
                                        RngStream& rng) {
    if (centers.size() != offspring_counts.size())
        throw std::invalid_argument("big_bang: centers and offspring counts disagree");
    const std::vector<double> extent = get_extent(it, g, problem);

    std::size_t total = 0;
    for (std::size_t k : offspring_counts) total += k;
    std::vector<Individual> offspring;
    offspring.reserve(total);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t k = 0; k < offspring_counts[c]; ++k) {
            Individual ind;
            ind.x.resize(problem.dim);
            for (std::size_t d = 0; d < problem.dim; ++d) {
                const double u = rng.symmetric_unit();
                ind.x[d] = std::clamp(centers[c].x[d] + extent[d] * u, problem.lower[d],
                                      problem.upper[d]);
            }
            offspring.push_back(std::move(ind));
        }
    }
    return offspring;
}

/// Bandwidth such that the box volume is `ratio` times the volume of the
/// D-ball of radius h:  h = (Gamma(D/2 + 1) prod(range) / (pi^(D/2) ratio))^(1/D).
inline double bandwidth_from_volume_ratio(const Problem& problem, double ratio) {
    if (!(ratio > 0.0))
        throw std::invalid_argument("bandwidth_from_volume_ratio: ratio must be positive");
    const auto d = static_cast<double>(problem.dim);
    double volume = 1.0;
    for (std::size_t i = 0; i < problem.dim; ++i) volume *= problem.range(i);
    return std::pow(std::tgamma(d / 2.0 + 1.0) * volume /
                        (std::pow(std::numbers::pi, d / 2.0) * ratio),
                    1.0 / d);
}

/// Bandwidth as (max pairwise distance) / ratio over the given population,
/// recomputed per generation by the spread strategy. Returns nullopt when
/// the spread is degenerate (all points coincide); callers keep the previous
/// bandwidth then, or fall back to volume_ratio 2000 on the first generation.
inline std::optional<double> bandwidth_from_spread(const std::vector<Individual>& population,
                                                   double ratio) {
    if (!(ratio > 0.0))
        throw std::invalid_argument("bandwidth_from_spread: ratio must be positive");
    double max_dist = 0.0;
    for (std::size_t i = 0; i + 1 < population.size(); ++i)
        for (std::size_t j = i + 1; j < population.size(); ++j)
            max_dist = std::max(max_dist, euclidean_distance(population[i].x, population[j].x));
    if (!(max_dist > 0.0)) return std::nullopt;
    return max_dist / ratio;
}

/// Resolves the bandwidth for one generation. `previous` is the bandwidth
/// used last generation (NaN on the first call).
inline double select_bandwidth(const BandwidthStrategy& strategy, const Problem& problem,
                               const std::vector<Individual>& population, double previous) {
    switch (strategy.kind) {
        case BandwidthStrategy::Kind::fixed:
            return strategy.value;
        case BandwidthStrategy::Kind::volume_ratio:
            return bandwidth_from_volume_ratio(problem, strategy.value);
        case BandwidthStrategy::Kind::spread_ratio:
            if (const auto h = bandwidth_from_spread(population, strategy.value)) return *h;
            if (!std::isnan(previous)) return previous;
            return bandwidth_from_volume_ratio(problem, kSpreadFallbackVolumeRatio);
    }
    throw std::logic_error("select_bandwidth: unknown strategy");
}

}  // namespace mgpbbbc
