#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "benchmarks.hpp"
#include "core.hpp"
#include "crunchbang.hpp"
#include "metrics.hpp"
#include "survival.hpp"

namespace mgpbbbc {

// --------------------------------------------------------------- single run

/// Per-generation snapshot handed to an observer callback.
struct GenerationStats {
    std::size_t generation = 0;       ///< 1-based bang-generation index
    std::size_t offspring_count = 0;  ///< offspring spawned this generation
    std::size_t center_count = 0;     ///< centers of mass after the crunch
    std::size_t opc_total = 0;        ///< sum of per-center offspring quotas
    double bandwidth = 0.0;           ///< h used by this generation's crunch
    double threshold = 0.0;           ///< filter threshold after survival
    std::vector<double> extent;       ///< disturbance extent of the bang
};

using GenerationObserver = std::function<void(const GenerationStats&)>;

/// What a finished run hands back.
struct RunOutcome {
    std::vector<Individual> archive;
    std::uint64_t fes_used = 0;
    std::size_t generations_completed = 0;
};

/// Executes one optimization run: a free evaluation of the random initial
/// population, then g big-crunch/big-bang generations of n budgeted
/// evaluations each, so fes_used never exceeds max_fes + n. With neither
/// budget field set the run degenerates to zero generations and returns the
/// evaluated initial population unchanged. The filter threshold starts at
/// the initial bandwidth and its decay floor is 1e-12 of that value.
inline RunOutcome run(const Problem& problem, const RunConfig& config, RngStream& rng,
                      const GenerationObserver& observer = {}) {
    problem.validate();
    if (config.population_size < 2) throw ConfigError("population size must be at least 2");
    if (config.generations > 0 && config.max_fes > 0)
        throw ConfigError("at most one of generations and max_fes may be set");
    config.bandwidth.validate();

    const std::size_t n = config.population_size;
    const std::size_t g = config.resolved_generations();
    EvalBudget budget{0, config.resolved_max_fes() + n};

    std::vector<Individual> archive = random_init(n, problem, rng);
    evaluate_population(archive, problem, budget);

    double h = select_bandwidth(config.bandwidth, problem, archive,
                                std::numeric_limits<double>::quiet_NaN());
    double th = h;
    const double th_floor = kThresholdFloorScale * h;
    archive = survival(archive, {}, th, rng, th_floor).archive;

    RunOutcome outcome;
    for (std::size_t it = 1; it <= g; ++it) {
        h = select_bandwidth(config.bandwidth, problem, archive, h);
        const CrunchResult crunch = big_crunch(archive, h, rng);
        std::vector<Individual> offspring =
            big_bang(crunch.centers, crunch.offspring_counts, it, g, problem, rng);
        if (!evaluate_population(offspring, problem, budget)) break;
        SurvivalResult next = survival(offspring, archive, th, rng, th_floor);
        archive = std::move(next.archive);
        th = next.threshold;
        ++outcome.generations_completed;
        if (observer) {
            GenerationStats stats;
            stats.generation = it;
            stats.offspring_count = offspring.size();
            stats.center_count = crunch.centers.size();
            for (std::size_t quota : crunch.offspring_counts) stats.opc_total += quota;
            stats.bandwidth = h;
            stats.threshold = th;
            stats.extent = get_extent(it, g, problem);
            observer(stats);
        }
    }
    outcome.archive = std::move(archive);
    outcome.fes_used = budget.used;
    return outcome;
}

/// Convenience overload seeding the stream from config.seed.
inline RunOutcome run(const Problem& problem, const RunConfig& config,
                      const GenerationObserver& observer = {}) {
    RngStream rng(config.seed);
    return run(problem, config, rng, observer);
}

// --------------------------------------------------------------- experiments

/// Peak count of one run at one accuracy level.
struct LevelCount {
    double epsilon = 0.0;
    std::size_t npf = 0;
    bool success = false;

    friend bool operator==(const LevelCount&, const LevelCount&) = default;
};

/// One run of a batch. Wall time is recorded for reporting but deliberately
/// ignored by equality: two runs agree when their measurable outcomes do.
struct RunRecord {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    std::uint64_t fes_used = 0;
    double wall_ms = 0.0;
    std::vector<LevelCount> levels;

    friend bool operator==(const RunRecord& a, const RunRecord& b) {
        return a.run_index == b.run_index && a.seed == b.seed && a.fes_used == b.fes_used &&
               a.levels == b.levels;
    }
};

/// Aggregate over the whole batch at one accuracy level.
struct LevelSummary {
    double epsilon = 0.0;
    double pr = 0.0;
    double sr = 0.0;

    friend bool operator==(const LevelSummary&, const LevelSummary&) = default;
};

struct ExperimentReport {
    std::string problem;
    std::size_t tnp = 0;
    std::size_t runs = 0;
    std::vector<RunRecord> records;
    std::vector<LevelSummary> levels;

    friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Batch protocol: `runs` independent runs of `run` with seeds
/// run.seed + 0 ... run.seed + runs - 1, scored at run.epsilon_levels.
struct ExperimentConfig {
    RunConfig run;
    std::size_t runs = 1;
    std::filesystem::path output_dir;  ///< empty: keep the report in memory only

    void validate() const {
        run.validate();
        if (runs == 0) throw ConfigError("at least one run is required");
        for (std::size_t i = 0; i + 1 < run.epsilon_levels.size(); ++i)
            if (!(run.epsilon_levels[i] > run.epsilon_levels[i + 1]))
                throw ConfigError("accuracy levels must be strictly descending");
    }
};

/// Scores one archive at every accuracy level.
inline std::vector<LevelCount> score_archive(const std::vector<Individual>& archive,
                                             const PeakRegistry& registry,
                                             const std::vector<double>& epsilon_levels) {
    std::vector<LevelCount> levels;
    levels.reserve(epsilon_levels.size());
    for (double eps : epsilon_levels) {
        const RunResult result = count_peaks(archive, registry, eps);
        levels.push_back({eps, result.npf, result.success});
    }
    return levels;
}

/// Recomputes the per-level aggregates from per-run records.
inline std::vector<LevelSummary> aggregate_levels(const std::vector<RunRecord>& records,
                                                  std::size_t tnp) {
    if (records.empty()) throw std::invalid_argument("aggregate_levels: no records");
    std::vector<LevelSummary> levels;
    levels.reserve(records[0].levels.size());
    for (std::size_t l = 0; l < records[0].levels.size(); ++l) {
        const double epsilon = records[0].levels[l].epsilon;
        std::vector<std::size_t> npfs;
        std::vector<RunResult> results;
        npfs.reserve(records.size());
        results.reserve(records.size());
        for (const auto& record : records) {
            const LevelCount& count = record.levels.at(l);
            if (count.epsilon != epsilon)
                throw std::invalid_argument("aggregate_levels: records disagree on levels");
            npfs.push_back(count.npf);
            RunResult result;
            result.epsilon = count.epsilon;
            result.npf = count.npf;
            result.tnp = tnp;
            result.success = count.success;
            results.push_back(std::move(result));
        }
        levels.push_back({epsilon, peak_ratio(npfs, tnp, records.size()),
                          success_ratio(results)});
    }
    return levels;
}

/// Runs one seeded, timed, scored run of a batch.
inline std::pair<RunRecord, std::vector<Individual>> execute_run(const Benchmark& benchmark,
                                                                 const RunConfig& config,
                                                                 std::size_t run_index) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome outcome = run(benchmark.problem, config);
    const auto stop = std::chrono::steady_clock::now();

    RunRecord record;
    record.run_index = run_index;
    record.seed = config.seed;
    record.fes_used = outcome.fes_used;
    record.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    record.levels = score_archive(outcome.archive, benchmark.registry, config.epsilon_levels);
    return {std::move(record), std::move(outcome.archive)};
}

// ------------------------------------------------------------- serialization

namespace detail {

inline std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw IoError("malformed number '" + std::string(text) + "'");
    return value;
}

inline std::uint64_t parse_uint(std::string_view text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw IoError("malformed integer '" + std::string(text) + "'");
    return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == sep) {
            parts.push_back(text.substr(begin, i - begin));
            begin = i + 1;
        }
    }
    return parts;
}

inline void append_csv_rows(std::string& out, const std::string& problem, std::size_t tnp,
                            const RunRecord& record) {
    for (const auto& level : record.levels) {
        out += problem;
        out += ',';
        out += std::to_string(record.run_index);
        out += ',';
        out += std::to_string(record.seed);
        out += ',';
        out += format_double(level.epsilon);
        out += ',';
        out += std::to_string(level.npf);
        out += ',';
        out += std::to_string(tnp);
        out += ',';
        out += level.success ? '1' : '0';
        out += ',';
        out += std::to_string(record.fes_used);
        out += '\n';
    }
}

}  // namespace detail

inline constexpr std::string_view kCsvHeader =
    "problem,run_index,seed,epsilon,npf,tnp,success,fes_used";

/// Per-run CSV: one row per run and accuracy level.
inline std::string emit_csv(const ExperimentReport& report) {
    std::string out{kCsvHeader};
    out += '\n';
    for (const auto& record : report.records)
        detail::append_csv_rows(out, report.problem, report.tnp, record);
    return out;
}

/// One parsed CSV row.
struct CsvRow {
    std::string problem;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    std::size_t npf = 0;
    std::size_t tnp = 0;
    bool success = false;
    std::uint64_t fes_used = 0;
};

inline std::vector<CsvRow> parse_csv(const std::string& text) {
    std::vector<CsvRow> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            if (line != kCsvHeader) throw IoError("unexpected CSV header '" + line + "'");
            first = false;
            continue;
        }
        const auto parts = detail::split(line, ',');
        if (parts.size() != 8) throw IoError("malformed CSV row '" + line + "'");
        CsvRow row;
        row.problem = std::string(parts[0]);
        row.run_index = static_cast<std::size_t>(detail::parse_uint(parts[1]));
        row.seed = detail::parse_uint(parts[2]);
        row.epsilon = detail::parse_double(parts[3]);
        row.npf = static_cast<std::size_t>(detail::parse_uint(parts[4]));
        row.tnp = static_cast<std::size_t>(detail::parse_uint(parts[5]));
        if (parts[6] != "0" && parts[6] != "1") throw IoError("malformed CSV row '" + line + "'");
        row.success = parts[6] == "1";
        row.fes_used = detail::parse_uint(parts[7]);
        rows.push_back(std::move(row));
    }
    if (first) throw IoError("CSV is empty");
    return rows;
}

/// Structured-text summary of a report (JSON).
inline std::string emit_summary(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["problem"] = report.problem;
    j["tnp"] = report.tnp;
    j["runs"] = report.runs;
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& record : report.records) {
        nlohmann::ordered_json r;
        r["run_index"] = record.run_index;
        r["seed"] = record.seed;
        r["fes_used"] = record.fes_used;
        r["wall_ms"] = record.wall_ms;
        r["levels"] = nlohmann::ordered_json::array();
        for (const auto& level : record.levels) {
            nlohmann::ordered_json l;
            l["epsilon"] = level.epsilon;
            l["npf"] = level.npf;
            l["success"] = level.success;
            r["levels"].push_back(std::move(l));
        }
        j["records"].push_back(std::move(r));
    }
    j["levels"] = nlohmann::ordered_json::array();
    for (const auto& level : report.levels) {
        nlohmann::ordered_json l;
        l["epsilon"] = level.epsilon;
        l["pr"] = level.pr;
        l["sr"] = level.sr;
        j["levels"].push_back(std::move(l));
    }
    return j.dump(2) + "\n";
}

inline ExperimentReport parse_summary(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ExperimentReport report;
        report.problem = j.at("problem").get<std::string>();
        report.tnp = j.at("tnp").get<std::size_t>();
        report.runs = j.at("runs").get<std::size_t>();
        for (const auto& r : j.at("records")) {
            RunRecord record;
            record.run_index = r.at("run_index").get<std::size_t>();
            record.seed = r.at("seed").get<std::uint64_t>();
            record.fes_used = r.at("fes_used").get<std::uint64_t>();
            record.wall_ms = r.at("wall_ms").get<double>();
            for (const auto& l : r.at("levels")) {
                record.levels.push_back({l.at("epsilon").get<double>(),
                                         l.at("npf").get<std::size_t>(),
                                         l.at("success").get<bool>()});
            }
            report.records.push_back(std::move(record));
        }
        for (const auto& l : j.at("levels")) {
            report.levels.push_back({l.at("epsilon").get<double>(), l.at("pr").get<double>(),
                                     l.at("sr").get<double>()});
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed summary: ") + e.what());
    }
}

/// Full-precision archive dump: one elite per line, the coordinates first,
/// then the fitness, space separated. Shortest round-trip formatting, so
/// parse_archive(format_archive(a)) reproduces every double bit for bit.
inline std::string format_archive(const std::vector<Individual>& archive) {
    std::string out;
    for (const auto& ind : archive) {
        for (double coord : ind.x) {
            out += detail::format_double(coord);
            out += ' ';
        }
        out += detail::format_double(ind.fitness);
        out += '\n';
    }
    return out;
}

inline std::vector<Individual> parse_archive(const std::string& text) {
    std::vector<Individual> archive;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto parts = detail::split(line, ' ');
        if (parts.size() < 2) throw IoError("malformed archive line '" + line + "'");
        Individual ind;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i)
            ind.x.push_back(detail::parse_double(parts[i]));
        ind.fitness = detail::parse_double(parts.back());
        archive.push_back(std::move(ind));
    }
    return archive;
}

// ---------------------------------------------------------------- file I/O

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
    return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("cannot write '" + path.string() + "'");
}

/// Reads a report back from the directory run_experiment wrote to.
inline ExperimentReport parse_report(const std::filesystem::path& dir) {
    return parse_summary(read_text_file(dir / "summary.json"));
}

/// Runs the whole batch serially. When output_dir is set, per-run CSV rows
/// and archive dumps are flushed as each run finishes (an I/O failure
/// surfaces as IoError with everything already written left on disk) and
/// summary.json lands at the end.
inline ExperimentReport run_experiment(const Benchmark& benchmark,
                                       const ExperimentConfig& config) {
    config.validate();

    ExperimentReport report;
    report.problem = benchmark.id;
    report.tnp = benchmark.registry.count();
    report.runs = config.runs;

    const bool persist = !config.output_dir.empty();
    std::ofstream csv;
    if (persist) {
        std::error_code ec;
        std::filesystem::create_directories(config.output_dir, ec);
        if (ec)
            throw IoError("cannot create '" + config.output_dir.string() + "': " + ec.message());
        const auto csv_path = config.output_dir / "runs.csv";
        csv.open(csv_path, std::ios::binary | std::ios::trunc);
        if (!csv) throw IoError("cannot write '" + csv_path.string() + "'");
        csv << kCsvHeader << '\n';
    }

    for (std::size_t k = 0; k < config.runs; ++k) {
        RunConfig run_config = config.run;
        run_config.seed = config.run.seed + k;
        auto [record, archive] = execute_run(benchmark, run_config, k);
        if (persist) {
            std::string rows;
            detail::append_csv_rows(rows, report.problem, report.tnp, record);
            csv << rows;
            csv.flush();
            if (!csv) throw IoError("cannot write '" + (config.output_dir / "runs.csv").string() + "'");
            write_text_file(config.output_dir / ("archive_run_" + std::to_string(k) + ".txt"),
                            format_archive(archive));
        }
        report.records.push_back(std::move(record));
    }

    report.levels = aggregate_levels(report.records, report.tnp);
    if (persist) write_text_file(config.output_dir / "summary.json", emit_summary(report));
    return report;
}

// ---------------------------------------------------- declarative benchmarks

/// Reads a benchmark-settings file (the shape of data/benchmarks.json):
/// {"version": 1, "benchmarks": {"F1": {"tnp": ..., "niche_radius": ...,
/// "population": ..., "bandwidth": ..., "max_fes": ...}, ...}}.
inline std::map<std::string, BenchmarkDefaults> load_benchmark_data(
    const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("version").get<int>() != 1)
            throw ConfigError("unsupported benchmark data version in '" + path.string() + "'");
        std::map<std::string, BenchmarkDefaults> table;
        for (const auto& [id, entry] : j.at("benchmarks").items()) {
            BenchmarkDefaults d;
            d.tnp = entry.at("tnp").get<std::size_t>();
            d.niche_radius = entry.at("niche_radius").get<double>();
            d.population = entry.at("population").get<std::size_t>();
            d.bandwidth = entry.at("bandwidth").get<double>();
            d.max_fes = entry.at("max_fes").get<std::uint64_t>();
            table.emplace(id, d);
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid benchmark data '" + path.string() + "': " + e.what());
    }
}

/// Applies file-loaded settings on top of a built benchmark. The peak count
/// is structural and must match the registry.
inline void apply_benchmark_data(Benchmark& benchmark, const BenchmarkDefaults& data) {
    if (data.tnp != benchmark.registry.count())
        throw ConfigError("benchmark '" + benchmark.id + "': data file says " +
                          std::to_string(data.tnp) + " peaks, registry holds " +
                          std::to_string(benchmark.registry.count()));
    if (!(data.niche_radius > 0.0))
        throw ConfigError("benchmark '" + benchmark.id + "': niche radius must be positive");
    benchmark.registry.niche_radius = data.niche_radius;
    benchmark.default_population = data.population;
    benchmark.default_bandwidth = data.bandwidth;
    benchmark.default_max_fes = data.max_fes;
}

/// Loads a custom problem from a JSON file:
/// {"id": ..., "evaluator": <name in the registry>, "dim": ..., "lower":
/// [...], "upper": [...], "fstar": ..., "niche_radius": ..., "peaks":
/// [[...], ...]} plus optional "population", "bandwidth", "max_fes".
/// An unreadable file is an IoError; bad content is a ConfigError.
inline Benchmark load_custom_benchmark(const std::filesystem::path& path,
                                       const EvaluatorRegistry& evaluators) {
    const std::string text = read_text_file(path);
    try {
        const auto j = nlohmann::json::parse(text);

        const auto id = j.at("id").get<std::string>();
        const auto evaluator_name = j.at("evaluator").get<std::string>();
        const auto evaluator = evaluators.find(evaluator_name);
        if (evaluator == evaluators.end())
            throw ConfigError("custom problem '" + id + "': unknown evaluator '" +
                              evaluator_name + "'");

        Problem problem;
        problem.dim = j.at("dim").get<std::size_t>();
        problem.lower = j.at("lower").get<std::vector<double>>();
        problem.upper = j.at("upper").get<std::vector<double>>();
        problem.evaluate = evaluator->second;

        PeakRegistry registry;
        registry.fstar = j.at("fstar").get<double>();
        registry.niche_radius = j.at("niche_radius").get<double>();
        registry.peaks = j.at("peaks").get<std::vector<std::vector<double>>>();

        const auto population = j.value("population", std::size_t{1000});
        const auto bandwidth =
            j.contains("bandwidth") ? j.at("bandwidth").get<double>()
                                    : bandwidth_from_volume_ratio(problem, 2000.0);
        const auto max_fes = j.value("max_fes", std::uint64_t{50000});

        return register_custom(id, std::move(problem), std::move(registry), population, bandwidth,
                               max_fes);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid custom problem '" + path.string() + "': " + e.what());
    }
}

}  // namespace mgpbbbc
