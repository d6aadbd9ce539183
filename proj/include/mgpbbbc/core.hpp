#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgpbbbc {

/// Raised for invalid configurations: bad bounds, unknown benchmark ids,
/// inconsistent budgets, malformed custom-problem descriptions.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when reading or writing experiment artifacts fails.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A candidate solution: position, fitness, and the scratch flag used by
/// distance-based filtering. Fitness stays NaN until evaluated.
struct Individual {
    std::vector<double> x;
    double fitness = std::numeric_limits<double>::quiet_NaN();
    bool tag = false;
};

inline bool is_evaluated(const Individual& ind) { return !std::isnan(ind.fitness); }

/// Euclidean distance between two positions of equal dimension.
inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

/// A box-constrained maximization problem.
struct Problem {
    std::size_t dim = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::function<double(const std::vector<double>&)> evaluate;

    double range(std::size_t d) const { return upper[d] - lower[d]; }

    /// Throws ConfigError unless the box is well-formed and an evaluator is set.
    void validate() const {
        if (dim == 0) throw ConfigError("problem dimension must be positive");
        if (lower.size() != dim || upper.size() != dim)
            throw ConfigError("bound vectors must match the problem dimension");
        for (std::size_t d = 0; d < dim; ++d)
            if (!(lower[d] < upper[d]))
                throw ConfigError("lower bound must be strictly below upper bound in dimension " +
                                  std::to_string(d));
        if (!evaluate) throw ConfigError("problem has no evaluator");
    }
};

/// Seeded random stream. One stream drives a whole run and every operator
/// draws from it in a fixed order, so equal seeds give bit-identical runs
/// on the same build.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// Uniform double in [-1, 1) -- the big-bang disturbance draw.
    double symmetric_unit() { return uniform(-1.0, 1.0); }

    /// Uniform index in {0, ..., n-1}.
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// How the clustering bandwidth h is obtained for a run.
struct BandwidthStrategy {
    enum class Kind { fixed, volume_ratio, spread_ratio };

    Kind kind = Kind::fixed;
    double value = 1.0;  ///< h itself for fixed, otherwise the ratio

    static BandwidthStrategy fixed_value(double h) { return {Kind::fixed, h}; }
    static BandwidthStrategy volume(double ratio) { return {Kind::volume_ratio, ratio}; }
    static BandwidthStrategy spread(double ratio) { return {Kind::spread_ratio, ratio}; }

    void validate() const {
        if (!(value > 0.0)) throw ConfigError("bandwidth value or ratio must be positive");
    }
};

/// Configuration for a single optimizer run. Exactly one of `generations`
/// and `max_fes` is set; the other is derived with g = floor(max_fes / n).
/// Each of the g big-bang generations evaluates exactly n offspring on top
/// of the evaluated initial population, so a completed run uses g*n + n
/// evaluations and never exceeds max_fes + n.
struct RunConfig {
    std::size_t population_size = 0;  ///< n
    std::size_t generations = 0;      ///< g; 0 means "derive from max_fes"
    std::uint64_t max_fes = 0;        ///< 0 means "derive from generations"
    BandwidthStrategy bandwidth{};
    std::vector<double> epsilon_levels{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    std::uint64_t seed = 1;

    std::size_t resolved_generations() const {
        if (generations > 0 || population_size == 0) return generations;
        return static_cast<std::size_t>(max_fes / population_size);
    }

    std::uint64_t resolved_max_fes() const {
        if (max_fes > 0) return max_fes;
        return static_cast<std::uint64_t>(generations) * population_size;
    }

    void validate() const {
        if (population_size < 2) throw ConfigError("population size must be at least 2");
        if ((generations == 0) == (max_fes == 0))
            throw ConfigError("exactly one of generations and max_fes must be set");
        bandwidth.validate();
        if (epsilon_levels.empty()) throw ConfigError("at least one accuracy level is required");
        for (double eps : epsilon_levels)
            if (!(eps > 0.0)) throw ConfigError("accuracy levels must be positive");
        if (resolved_generations() < 2)
            throw ConfigError("budget must allow at least two generations");
    }
};

/// Draws n individuals uniformly inside the box. Stream order: individuals
/// outer, dimensions inner. Fitness stays unevaluated.
inline std::vector<Individual> random_init(std::size_t n, const Problem& problem, RngStream& rng) {
    std::vector<Individual> population(n);
    for (auto& ind : population) {
        ind.x.resize(problem.dim);
        for (std::size_t d = 0; d < problem.dim; ++d)
            ind.x[d] = rng.uniform(problem.lower[d], problem.upper[d]);
    }
    return population;
}

/// Function-evaluation accounting for one run.
struct EvalBudget {
    std::uint64_t used = 0;
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();

    bool would_exceed(std::size_t batch) const { return used + batch > limit; }
};

/// Evaluates every member of `population`, charging one FE each. Returns
/// false -- and evaluates nothing -- when the batch would push the counter
/// past the limit; the caller then stops and keeps its current archive.
inline bool evaluate_population(std::vector<Individual>& population, const Problem& problem,
                                EvalBudget& budget) {
    if (budget.would_exceed(population.size())) return false;
    for (auto& ind : population) ind.fitness = problem.evaluate(ind.x);
    budget.used += population.size();
    return true;
}

}  // namespace mgpbbbc
