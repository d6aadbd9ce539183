#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace mgpbbbc {

/// Shift steps shorter than this fraction of h stop a point's iteration.
inline constexpr double kShiftToleranceScale = 1e-3;
/// Hard cap on shift iterations per point.
inline constexpr int kMaxShiftIterations = 500;
/// Converged positions closer than h * kModeMergeScale collapse into one mode.
inline constexpr double kModeMergeScale = 0.5;

/// Flat-kernel mean-shift partition of a point set.
struct ClusterSet {
    std::vector<std::size_t> assignment;     ///< cluster id per input point
    std::vector<std::vector<double>> modes;  ///< converged mode per cluster

    std::size_t count() const { return modes.size(); }
};

/// Partitions `points` by flat-kernel mean-shift with bandwidth h.
///
/// Every point is iteratively replaced by the mean of all *original* points
/// within distance h of its current position (the point itself always
/// qualifies on the first step, so the mean is well defined) until the step
/// is shorter than 1e-3 * h or 500 iterations have run. Converged positions
/// within h/2 of an existing mode join that mode's cluster, in input order,
/// so cluster ids are sorted by the lowest input index they contain.
inline ClusterSet mean_shift(const std::vector<std::vector<double>>& points, double h) {
    if (points.empty()) throw std::invalid_argument("mean_shift: point set is empty");
    if (!(h > 0.0)) throw std::invalid_argument("mean_shift: bandwidth must be positive");

    const std::size_t n = points.size();
    const std::size_t dim = points[0].size();
    for (const auto& p : points)
        if (p.size() != dim) throw std::invalid_argument("mean_shift: mixed point dimensions");

    // Neighborhood tests run on squared distances; the flat origin set lives
    // in one contiguous buffer to keep the hot loop cache-friendly.
    std::vector<double> origin(n * dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) origin[i * dim + d] = points[i][d];

    const double radius2 = h * h;
    const double tol = kShiftToleranceScale * h;
    const double tol2 = tol * tol;

    std::vector<std::vector<double>> converged(n);
    std::vector<double> y(dim);
    std::vector<double> mean(dim);
    for (std::size_t i = 0; i < n; ++i) {
        y = points[i];
        for (int iter = 0; iter < kMaxShiftIterations; ++iter) {
            std::fill(mean.begin(), mean.end(), 0.0);
            std::size_t neighbors = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const double* pj = origin.data() + j * dim;
                double dist2 = 0.0;
                for (std::size_t d = 0; d < dim; ++d) {
                    const double diff = y[d] - pj[d];
                    dist2 += diff * diff;
                }
                if (dist2 <= radius2) {
                    ++neighbors;
                    for (std::size_t d = 0; d < dim; ++d) mean[d] += pj[d];
                }
            }
            if (neighbors == 0) break;  // unreachable except for FP edge cases
            double shift2 = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                mean[d] /= static_cast<double>(neighbors);
                const double diff = mean[d] - y[d];
                shift2 += diff * diff;
            }
            y = mean;
            if (shift2 < tol2) break;
        }
        converged[i] = y;
    }

    ClusterSet clusters;
    clusters.assignment.resize(n);
    const double merge2 = (kModeMergeScale * h) * (kModeMergeScale * h);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t assigned = clusters.modes.size();
        for (std::size_t c = 0; c < clusters.modes.size(); ++c) {
            double dist2 = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double diff = converged[i][d] - clusters.modes[c][d];
                dist2 += diff * diff;
            }
            if (dist2 < merge2) {
                assigned = c;
                break;
            }
        }
        if (assigned == clusters.modes.size()) clusters.modes.push_back(converged[i]);
        clusters.assignment[i] = assigned;
    }
    return clusters;
}

}  // namespace mgpbbbc
