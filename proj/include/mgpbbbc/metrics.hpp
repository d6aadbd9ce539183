#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "benchmarks.hpp"
#include "core.hpp"

namespace mgpbbbc {

/// Peak-counting outcome for one archive at one accuracy level.
struct RunResult {
    double epsilon = 0.0;
    std::size_t npf = 0;   ///< number of distinct global peaks found
    std::size_t tnp = 0;   ///< total number of global peaks
    bool success = false;  ///< npf == tnp
    std::vector<std::size_t> found_peaks;  ///< claimed registry indices, in claim order
};

/// Counts distinct global peaks represented in `archive` at accuracy level
/// `epsilon`. Individuals within epsilon of fstar are visited best-first
/// (stable on input order); each claims the nearest unclaimed registered
/// peak within the niche radius, ties going to the lowest peak index. A
/// peak can be claimed only once.
inline RunResult count_peaks(const std::vector<Individual>& archive, const PeakRegistry& registry,
                             double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("count_peaks: epsilon must be positive");

    RunResult result;
    result.epsilon = epsilon;
    result.tnp = registry.count();

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < archive.size(); ++i) {
        if (!is_evaluated(archive[i]))
            throw std::invalid_argument("count_peaks: archive contains unevaluated individuals");
        if (registry.fstar - archive[i].fitness <= epsilon) candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return archive[a].fitness > archive[b].fitness;
    });

    std::vector<char> claimed(registry.count(), 0);
    for (std::size_t i : candidates) {
        std::size_t best_peak = registry.count();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < registry.count(); ++p) {
            if (claimed[p]) continue;
            const double dist = euclidean_distance(archive[i].x, registry.peaks[p]);
            if (dist <= registry.niche_radius && dist < best_dist) {
                best_dist = dist;
                best_peak = p;
            }
        }
        if (best_peak < registry.count()) {
            claimed[best_peak] = 1;
            result.found_peaks.push_back(best_peak);
        }
    }
    result.npf = result.found_peaks.size();
    result.success = result.npf == result.tnp;
    return result;
}

/// Peak ratio over a batch of nr runs: sum of per-run peak counts divided
/// by tnp * nr. Accumulation is integral, so the result does not depend on
/// the order of the runs.
inline double peak_ratio(const std::vector<std::size_t>& npf_per_run, std::size_t tnp,
                         std::size_t nr) {
    if (nr == 0 || npf_per_run.size() != nr)
        throw std::invalid_argument("peak_ratio: need exactly nr >= 1 run counts");
    if (tnp == 0) throw std::invalid_argument("peak_ratio: tnp must be positive");
    const std::uint64_t total =
        std::accumulate(npf_per_run.begin(), npf_per_run.end(), std::uint64_t{0});
    return static_cast<double>(total) / static_cast<double>(static_cast<std::uint64_t>(tnp) * nr);
}

/// Fraction of runs that found every global peak.
inline double success_ratio(const std::vector<RunResult>& results) {
    if (results.empty()) throw std::invalid_argument("success_ratio: no runs");
    const auto successes = static_cast<std::uint64_t>(
        std::count_if(results.begin(), results.end(), [](const RunResult& r) { return r.success; }));
    return static_cast<double>(successes) / static_cast<double>(results.size());
}

}  // namespace mgpbbbc
