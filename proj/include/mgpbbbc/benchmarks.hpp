#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace mgpbbbc {

/// Known global peaks of a problem plus the matching rule parameters used by
/// peak counting: the optimum fitness and the niche radius.
struct PeakRegistry {
    std::vector<std::vector<double>> peaks;
    double fstar = 0.0;
    double niche_radius = 0.0;

    std::size_t count() const { return peaks.size(); }
};

/// A ready-to-run problem: evaluator, box, peak registry, default settings.
struct Benchmark {
    std::string id;
    Problem problem;
    PeakRegistry registry;
    std::size_t default_population = 0;
    double default_bandwidth = 0.0;
    std::uint64_t default_max_fes = 0;
};

/// A registered peak may evaluate at most this far from fstar.
inline constexpr double kCustomPeakTolerance = 1e-6;

/// Per-benchmark settings: peak count, matching radius, and the default
/// population size, fixed bandwidth and evaluation budget.
struct BenchmarkDefaults {
    std::size_t tnp = 0;
    double niche_radius = 0.0;
    std::size_t population = 0;
    double bandwidth = 0.0;
    std::uint64_t max_fes = 0;

    friend bool operator==(const BenchmarkDefaults&, const BenchmarkDefaults&) = default;
};

/// The compiled-in settings of the ten built-in benchmarks. The shipped
/// data/benchmarks.json mirrors this table; load_benchmark_data() reads that
/// file (or an alternate) so the radii can be swapped without a rebuild.
inline const std::map<std::string, BenchmarkDefaults>& builtin_defaults() {
    static const std::map<std::string, BenchmarkDefaults> table{
        {"F1", {2, 0.01, 1000, 0.80, 50000}},  {"F2", {5, 0.01, 1000, 0.08, 50000}},
        {"F3", {1, 0.01, 1000, 0.80, 50000}},  {"F4", {4, 0.01, 1000, 0.80, 50000}},
        {"F5", {2, 0.5, 1000, 0.80, 50000}},   {"F6", {18, 0.5, 1000, 0.20, 200000}},
        {"F7", {36, 0.2, 500, 0.20, 200000}},  {"F8", {81, 0.5, 1000, 0.60, 400000}},
        {"F9", {216, 0.2, 1000, 0.40, 400000}}, {"F10", {12, 0.01, 1000, 0.40, 200000}},
    };
    return table;
}

namespace detail {

// ------------------------------------------------------------------ evaluators

inline double five_uneven_peak_trap(double x) {
    if (x < 2.5) return 80.0 * (2.5 - x);
    if (x < 5.0) return 64.0 * (x - 2.5);
    if (x < 7.5) return 64.0 * (7.5 - x);
    if (x < 12.5) return 28.0 * (x - 7.5);
    if (x < 17.5) return 28.0 * (17.5 - x);
    if (x < 22.5) return 32.0 * (x - 17.5);
    if (x < 27.5) return 32.0 * (27.5 - x);
    return 80.0 * (x - 27.5);
}

inline double equal_maxima(double x) {
    const double s = std::sin(5.0 * std::numbers::pi * x);
    const double s2 = s * s;
    return s2 * s2 * s2;
}

inline double uneven_decreasing_maxima(double x) {
    const double arg = (x - 0.08) / 0.854;
    const double envelope = std::exp(-2.0 * std::numbers::ln2 * arg * arg);
    const double s = std::sin(5.0 * std::numbers::pi * (std::pow(x, 0.75) - 0.05));
    const double s2 = s * s;
    return envelope * s2 * s2 * s2;
}

inline double himmelblau(double x, double y) {
    const double a = x * x + y - 11.0;
    const double b = x + y * y - 7.0;
    return 200.0 - a * a - b * b;
}

inline double six_hump_camel_back(double x, double y) {
    const double x2 = x * x;
    const double y2 = y * y;
    return -((4.0 - 2.1 * x2 + x2 * x2 / 3.0) * x2 + x * y + (4.0 * y2 - 4.0) * y2);
}

/// One coordinate factor of the Shubert product.
inline double shubert_factor(double t) {
    double sum = 0.0;
    for (int j = 1; j <= 5; ++j)
        sum += static_cast<double>(j) * std::cos(static_cast<double>(j + 1) * t + j);
    return sum;
}

inline double shubert(const std::vector<double>& x) {
    double product = 1.0;
    for (double t : x) product *= shubert_factor(t);
    return -product;
}

inline double vincent(const std::vector<double>& x) {
    double sum = 0.0;
    for (double t : x) sum += std::sin(10.0 * std::log(t));
    return sum / static_cast<double>(x.size());
}

inline double modified_rastrigin_2d(double x, double y) {
    const double two_pi = 2.0 * std::numbers::pi;
    return -((10.0 + 9.0 * std::cos(two_pi * 3.0 * x)) + (10.0 + 9.0 * std::cos(two_pi * 4.0 * y)));
}

// --------------------------------------------------------- registry generators

/// Derivative of the Shubert coordinate factor.
inline double shubert_factor_slope(double t) {
    double sum = 0.0;
    for (int j = 1; j <= 5; ++j)
        sum += static_cast<double>(j * (j + 1)) * std::sin(static_cast<double>(j + 1) * t + j);
    return -sum;
}

/// Locations of the global minima (argmins, value min_value) and maxima
/// (argmaxs, value max_value) of the Shubert factor on [-10, 10], via a
/// sign-change scan of the slope plus bisection polish.
inline void shubert_factor_extrema(std::vector<double>& argmins, std::vector<double>& argmaxs,
                                   double& min_value, double& max_value) {
    constexpr double lo = -10.0;
    constexpr double hi = 10.0;
    constexpr int segments = 40000;

    std::vector<double> critical;
    double prev_t = lo;
    double prev_s = shubert_factor_slope(lo);
    for (int i = 1; i <= segments; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / segments;
        const double s = shubert_factor_slope(t);
        if (prev_s == 0.0) {
            critical.push_back(prev_t);
        } else if (prev_s * s < 0.0) {
            double a = prev_t;
            double b = t;
            double sa = prev_s;
            for (int iter = 0; iter < 100; ++iter) {
                const double mid = 0.5 * (a + b);
                const double sm = shubert_factor_slope(mid);
                if (sa * sm <= 0.0)
                    b = mid;
                else {
                    a = mid;
                    sa = sm;
                }
            }
            critical.push_back(0.5 * (a + b));
        }
        prev_t = t;
        prev_s = s;
    }

    min_value = critical.empty() ? 0.0 : shubert_factor(critical.front());
    max_value = min_value;
    for (double t : critical) {
        const double v = shubert_factor(t);
        min_value = std::min(min_value, v);
        max_value = std::max(max_value, v);
    }
    argmins.clear();
    argmaxs.clear();
    for (double t : critical) {
        const double v = shubert_factor(t);
        if (std::abs(v - min_value) <= 1e-9) argmins.push_back(t);
        if (std::abs(v - max_value) <= 1e-9) argmaxs.push_back(t);
    }
    if (argmins.size() != 3 || argmaxs.size() != 3)
        throw std::logic_error("shubert_factor_extrema: expected 3 minima and 3 maxima");
}

/// Cartesian product of per-dimension coordinate lists.
inline std::vector<std::vector<double>> coordinate_grid(
    const std::vector<std::vector<double>>& per_dim) {
    std::vector<std::vector<double>> grid;
    std::size_t total = 1;
    for (const auto& coords : per_dim) total *= coords.size();
    grid.reserve(total);
    std::vector<std::size_t> odo(per_dim.size(), 0);
    for (std::size_t i = 0; i < total; ++i) {
        std::vector<double> point(per_dim.size());
        for (std::size_t d = 0; d < per_dim.size(); ++d) point[d] = per_dim[d][odo[d]];
        grid.push_back(std::move(point));
        for (std::size_t d = per_dim.size(); d-- > 0;) {
            if (++odo[d] < per_dim[d].size()) break;
            odo[d] = 0;
        }
    }
    return grid;
}

/// The D * 3^D Shubert peaks: exactly one dimension sits on a factor
/// minimizer, all others on factor maximizers.
inline std::vector<std::vector<double>> shubert_peaks(std::size_t dim) {
    std::vector<double> argmins;
    std::vector<double> argmaxs;
    double min_value = 0.0;
    double max_value = 0.0;
    shubert_factor_extrema(argmins, argmaxs, min_value, max_value);

    std::vector<std::vector<double>> peaks;
    for (std::size_t min_dim = 0; min_dim < dim; ++min_dim) {
        std::vector<std::vector<double>> per_dim(dim, argmaxs);
        per_dim[min_dim] = argmins;
        for (auto& peak : coordinate_grid(per_dim)) peaks.push_back(std::move(peak));
    }
    return peaks;
}

/// Per-dimension maximizer coordinates of the Vincent sum on [lo, hi]:
/// exp((pi/2 + 2 k pi) / 10) for every integer k landing inside the box.
inline std::vector<double> vincent_axis_peaks(double lo, double hi) {
    const double half_pi = std::numbers::pi / 2.0;
    const double two_pi = 2.0 * std::numbers::pi;
    const auto k_lo = static_cast<long long>(std::ceil((10.0 * std::log(lo) - half_pi) / two_pi));
    const auto k_hi = static_cast<long long>(std::floor((10.0 * std::log(hi) - half_pi) / two_pi));
    std::vector<double> coords;
    for (long long k = k_lo; k <= k_hi; ++k)
        coords.push_back(std::exp((half_pi + two_pi * static_cast<double>(k)) / 10.0));
    return coords;
}

/// Golden-section maximization of a unimodal 1-D slice.
inline void golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                               double& argmax, double& value) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int iter = 0; iter < 200 && (b - a) > 1e-16; ++iter) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    argmax = 0.5 * (a + b);
    value = f(argmax);
}

/// Newton iteration for a 2-D root problem with analytic Jacobian.
template <typename F, typename J>
inline std::array<double, 2> newton2(F f, J jac, std::array<double, 2> p) {
    for (int iter = 0; iter < 80; ++iter) {
        const auto [fx, fy] = f(p[0], p[1]);
        const auto m = jac(p[0], p[1]);  // row-major 2x2
        const double det = m[0] * m[3] - m[1] * m[2];
        const double dx = (fx * m[3] - fy * m[1]) / det;
        const double dy = (fy * m[0] - fx * m[2]) / det;
        p[0] -= dx;
        p[1] -= dy;
        if (std::abs(dx) < 1e-15 && std::abs(dy) < 1e-15) break;
    }
    return p;
}

/// The four Himmelblau maxima: common roots of x^2 + y - 11 and x + y^2 - 7.
inline std::vector<std::vector<double>> himmelblau_peaks() {
    const auto residual = [](double x, double y) {
        return std::array<double, 2>{x * x + y - 11.0, x + y * y - 7.0};
    };
    const auto jacobian = [](double x, double y) {
        return std::array<double, 4>{2.0 * x, 1.0, 1.0, 2.0 * y};
    };
    const std::array<std::array<double, 2>, 4> seeds{
        {{3.0, 2.0}, {-2.8, 3.1}, {-3.78, -3.28}, {3.58, -1.85}}};
    std::vector<std::vector<double>> peaks;
    for (const auto& seed : seeds) {
        const auto p = newton2(residual, jacobian, seed);
        peaks.push_back({p[0], p[1]});
    }
    return peaks;
}

/// The two camel-back maxima (stationary points polished by Newton; the
/// second is the exact point reflection of the first).
inline std::vector<std::vector<double>> six_hump_camel_back_peaks() {
    const auto gradient = [](double x, double y) {
        return std::array<double, 2>{8.0 * x - 8.4 * x * x * x + 2.0 * std::pow(x, 5.0) + y,
                                     x + 16.0 * y * y * y - 8.0 * y};
    };
    const auto hessian = [](double x, double y) {
        return std::array<double, 4>{8.0 - 25.2 * x * x + 10.0 * std::pow(x, 4.0), 1.0, 1.0,
                                     48.0 * y * y - 8.0};
    };
    const auto p = newton2(gradient, hessian, {0.09, -0.71});
    return {{p[0], p[1]}, {-p[0], -p[1]}};
}

inline Problem box_problem(std::size_t dim, std::vector<double> lower, std::vector<double> upper,
                           std::function<double(const std::vector<double>&)> evaluate) {
    Problem problem;
    problem.dim = dim;
    problem.lower = std::move(lower);
    problem.upper = std::move(upper);
    problem.evaluate = std::move(evaluate);
    return problem;
}

inline Problem uniform_box_problem(std::size_t dim, double lo, double hi,
                                   std::function<double(const std::vector<double>&)> evaluate) {
    return box_problem(dim, std::vector<double>(dim, lo), std::vector<double>(dim, hi),
                       std::move(evaluate));
}

}  // namespace detail

/// Named evaluators usable from declarative custom-problem files.
/// `shubert` and `vincent` accept any dimension; the others are fixed.
using EvaluatorRegistry = std::map<std::string, std::function<double(const std::vector<double>&)>>;

inline EvaluatorRegistry default_evaluators() {
    EvaluatorRegistry reg;
    reg["five_uneven_peak_trap"] = [](const std::vector<double>& x) {
        return detail::five_uneven_peak_trap(x[0]);
    };
    reg["equal_maxima"] = [](const std::vector<double>& x) { return detail::equal_maxima(x[0]); };
    reg["uneven_decreasing_maxima"] = [](const std::vector<double>& x) {
        return detail::uneven_decreasing_maxima(x[0]);
    };
    reg["himmelblau"] = [](const std::vector<double>& x) {
        return detail::himmelblau(x[0], x[1]);
    };
    reg["six_hump_camel_back"] = [](const std::vector<double>& x) {
        return detail::six_hump_camel_back(x[0], x[1]);
    };
    reg["shubert"] = [](const std::vector<double>& x) { return detail::shubert(x); };
    reg["vincent"] = [](const std::vector<double>& x) { return detail::vincent(x); };
    reg["modified_rastrigin_2d"] = [](const std::vector<double>& x) {
        return detail::modified_rastrigin_2d(x[0], x[1]);
    };
    return reg;
}

/// Validates and assembles a benchmark: peaks must exist, lie inside the box
/// and evaluate within 1e-6 of fstar (offending coordinates are reported).
inline Benchmark register_custom(std::string id, Problem problem, PeakRegistry registry,
                                 std::size_t default_population, double default_bandwidth,
                                 std::uint64_t default_max_fes) {
    problem.validate();
    if (registry.peaks.empty())
        throw ConfigError("benchmark '" + id + "': peak registry is empty");
    if (!(registry.niche_radius > 0.0))
        throw ConfigError("benchmark '" + id + "': niche radius must be positive");
    for (std::size_t p = 0; p < registry.peaks.size(); ++p) {
        const auto& peak = registry.peaks[p];
        if (peak.size() != problem.dim)
            throw ConfigError("benchmark '" + id + "': peak " + std::to_string(p) +
                              " has wrong dimension");
        for (std::size_t d = 0; d < problem.dim; ++d)
            if (peak[d] < problem.lower[d] || peak[d] > problem.upper[d])
                throw ConfigError("benchmark '" + id + "': peak " + std::to_string(p) +
                                  " coordinate " + std::to_string(d) + " = " +
                                  std::to_string(peak[d]) + " lies outside [" +
                                  std::to_string(problem.lower[d]) + ", " +
                                  std::to_string(problem.upper[d]) + "]");
        const double value = problem.evaluate(peak);
        if (!(std::abs(value - registry.fstar) < kCustomPeakTolerance))
            throw ConfigError("benchmark '" + id + "': peak " + std::to_string(p) +
                              " evaluates to " + std::to_string(value) + ", more than " +
                              std::to_string(kCustomPeakTolerance) + " away from fstar " +
                              std::to_string(registry.fstar));
    }
    return {std::move(id), std::move(problem), std::move(registry), default_population,
            default_bandwidth, default_max_fes};
}

inline const std::vector<std::string>& benchmark_ids() {
    static const std::vector<std::string> ids{"F1", "F2", "F3", "F4", "F5",
                                              "F6", "F7", "F8", "F9", "F10"};
    return ids;
}

/// Builds one of the ten built-in benchmarks. Peak locations that have no
/// closed form are polished numerically at construction time; for those the
/// stored fstar is the evaluated optimum rather than a rounded textbook
/// value, so registered peaks always evaluate within 1e-7 of fstar.
inline Benchmark make_benchmark(const std::string& id) {
    const auto& table = builtin_defaults();
    const auto it = table.find(id);
    if (it == table.end()) throw ConfigError("unknown benchmark id '" + id + "'");
    const BenchmarkDefaults& defaults = it->second;

    Problem problem;
    PeakRegistry registry;
    registry.niche_radius = defaults.niche_radius;

    if (id == "F1") {
        problem = detail::uniform_box_problem(1, 0.0, 30.0, [](const std::vector<double>& x) {
            return detail::five_uneven_peak_trap(x[0]);
        });
        registry.peaks = {{0.0}, {30.0}};
        registry.fstar = 200.0;
    } else if (id == "F2") {
        problem = detail::uniform_box_problem(1, 0.0, 1.0, [](const std::vector<double>& x) {
            return detail::equal_maxima(x[0]);
        });
        registry.peaks = {{0.1}, {0.3}, {0.5}, {0.7}, {0.9}};
        registry.fstar = 1.0;
    } else if (id == "F3") {
        problem = detail::uniform_box_problem(1, 0.0, 1.0, [](const std::vector<double>& x) {
            return detail::uneven_decreasing_maxima(x[0]);
        });
        double argmax = 0.0;
        double value = 0.0;
        detail::golden_section_max(detail::uneven_decreasing_maxima, 0.07, 0.09, argmax, value);
        registry.peaks = {{argmax}};
        registry.fstar = value;
    } else if (id == "F4") {
        problem = detail::uniform_box_problem(2, -6.0, 6.0, [](const std::vector<double>& x) {
            return detail::himmelblau(x[0], x[1]);
        });
        registry.peaks = detail::himmelblau_peaks();
        registry.fstar = 200.0;
    } else if (id == "F5") {
        problem = detail::box_problem(2, {-1.9, -1.1}, {1.9, 1.1}, [](const std::vector<double>& x) {
            return detail::six_hump_camel_back(x[0], x[1]);
        });
        registry.peaks = detail::six_hump_camel_back_peaks();
        registry.fstar = problem.evaluate(registry.peaks[0]);
    } else if (id == "F6" || id == "F8") {
        const std::size_t dim = (id == "F6") ? 2 : 3;
        problem = detail::uniform_box_problem(dim, -10.0, 10.0, detail::shubert);
        registry.peaks = detail::shubert_peaks(dim);
        double best = problem.evaluate(registry.peaks[0]);
        for (const auto& peak : registry.peaks) best = std::max(best, problem.evaluate(peak));
        registry.fstar = best;
    } else if (id == "F7" || id == "F9") {
        const std::size_t dim = (id == "F7") ? 2 : 3;
        problem = detail::uniform_box_problem(dim, 0.25, 10.0, detail::vincent);
        const std::vector<double> axis = detail::vincent_axis_peaks(0.25, 10.0);
        registry.peaks =
            detail::coordinate_grid(std::vector<std::vector<double>>(dim, axis));
        registry.fstar = 1.0;
    } else {  // F10
        problem = detail::uniform_box_problem(2, 0.0, 1.0, [](const std::vector<double>& x) {
            return detail::modified_rastrigin_2d(x[0], x[1]);
        });
        std::vector<std::vector<double>> per_dim(2);
        for (int m = 0; m < 3; ++m) per_dim[0].push_back((2.0 * m + 1.0) / 6.0);
        for (int m = 0; m < 4; ++m) per_dim[1].push_back((2.0 * m + 1.0) / 8.0);
        registry.peaks = detail::coordinate_grid(per_dim);
        registry.fstar = -2.0;
    }

    return register_custom(id, std::move(problem), std::move(registry), defaults.population,
                           defaults.bandwidth, defaults.max_fes);
}

}  // namespace mgpbbbc
