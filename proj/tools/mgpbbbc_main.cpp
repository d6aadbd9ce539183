#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mgpbbbc/mgpbbbc.hpp"

namespace {

mgpbbbc::BandwidthStrategy parse_bandwidth(const std::string& text) {
    const auto parse_number = [&](std::string_view tail) {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), value);
        if (ec != std::errc{} || ptr != tail.data() + tail.size())
            throw mgpbbbc::ConfigError("invalid bandwidth '" + text + "'");
        return value;
    };
    const std::string_view view(text);
    if (view.starts_with("vol:"))
        return mgpbbbc::BandwidthStrategy::volume(parse_number(view.substr(4)));
    if (view.starts_with("spread:"))
        return mgpbbbc::BandwidthStrategy::spread(parse_number(view.substr(7)));
    return mgpbbbc::BandwidthStrategy::fixed_value(parse_number(view));
}

std::vector<double> parse_accuracy(const std::string& text) {
    std::vector<double> levels;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            const std::string_view item(text.data() + begin, i - begin);
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
            if (ec != std::errc{} || ptr != item.data() + item.size())
                throw mgpbbbc::ConfigError("invalid accuracy list '" + text + "'");
            levels.push_back(value);
            begin = i + 1;
        }
    }
    return levels;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
    std::vector<std::size_t> values;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            const std::string_view item(text.data() + begin, i - begin);
            std::size_t value = 0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
            if (ec != std::errc{} || ptr != item.data() + item.size())
                throw mgpbbbc::ConfigError("invalid " + what + " list '" + text + "'");
            values.push_back(value);
            begin = i + 1;
        }
    }
    return values;
}

mgpbbbc::Benchmark resolve_problem(const std::string& name, const std::string& data_path) {
    mgpbbbc::Benchmark benchmark = [&] {
        const auto& ids = mgpbbbc::benchmark_ids();
        if (std::find(ids.begin(), ids.end(), name) != ids.end())
            return mgpbbbc::make_benchmark(name);
        if (std::filesystem::exists(name))
            return mgpbbbc::load_custom_benchmark(name, mgpbbbc::default_evaluators());
        throw mgpbbbc::ConfigError("unknown problem '" + name +
                                   "' (not a built-in id or a readable file)");
    }();
    if (!data_path.empty()) {
        const auto table = mgpbbbc::load_benchmark_data(data_path);
        const auto it = table.find(benchmark.id);
        if (it == table.end())
            throw mgpbbbc::ConfigError("no entry for '" + benchmark.id + "' in '" + data_path +
                                       "'");
        mgpbbbc::apply_benchmark_data(benchmark, it->second);
    }
    return benchmark;
}

struct RunFlags {
    std::string problem;
    std::string data;
    std::size_t pop = 0;
    std::string bandwidth;
    std::uint64_t max_fes = 0;
    std::size_t runs = 1;
    std::uint64_t seed = 1;
    std::string accuracy = "1e-1,1e-2,1e-3,1e-4,1e-5";
    std::string out;
};

mgpbbbc::ExperimentConfig build_config(const mgpbbbc::Benchmark& benchmark, const RunFlags& flags,
                                       bool pop_set, bool bandwidth_set, bool fes_set) {
    mgpbbbc::ExperimentConfig config;
    config.run.population_size = pop_set ? flags.pop : benchmark.default_population;
    config.run.max_fes = fes_set ? flags.max_fes : benchmark.default_max_fes;
    config.run.bandwidth = bandwidth_set
                               ? parse_bandwidth(flags.bandwidth)
                               : mgpbbbc::BandwidthStrategy::fixed_value(benchmark.default_bandwidth);
    config.run.epsilon_levels = parse_accuracy(flags.accuracy);
    config.run.seed = flags.seed;
    config.runs = flags.runs;
    config.output_dir = flags.out;
    return config;
}

int cmd_run(const RunFlags& flags, bool pop_set, bool bandwidth_set, bool fes_set) {
    const mgpbbbc::Benchmark benchmark = resolve_problem(flags.problem, flags.data);
    const mgpbbbc::ExperimentConfig config =
        build_config(benchmark, flags, pop_set, bandwidth_set, fes_set);
    const mgpbbbc::ExperimentReport report = mgpbbbc::run_experiment(benchmark, config);
    std::cout << mgpbbbc::emit_summary(report);
    return 0;
}

int cmd_verify_registry(const std::string& problem, const std::string& data) {
    const mgpbbbc::Benchmark benchmark = resolve_problem(problem, data);
    std::cout << benchmark.id << ": " << benchmark.registry.count() << " peaks, fstar "
              << benchmark.registry.fstar << ", niche radius " << benchmark.registry.niche_radius
              << ", all peaks inside the box and within " << mgpbbbc::kCustomPeakTolerance
              << " of fstar\n";
    return 0;
}

int cmd_sweep(const RunFlags& flags, const std::string& pop_grid, const std::string& bandwidth_grid,
              bool fes_set) {
    const mgpbbbc::Benchmark benchmark = resolve_problem(flags.problem, flags.data);
    const auto pops = parse_size_list(pop_grid, "population");
    const auto bandwidths = parse_accuracy(bandwidth_grid);
    if (pops.empty() || bandwidths.empty())
        throw mgpbbbc::ConfigError("sweep grids must be non-empty");

    std::cout << "problem,population,bandwidth,epsilon,pr,sr\n";
    for (std::size_t pop : pops) {
        for (double h : bandwidths) {
            RunFlags combo = flags;
            combo.pop = pop;
            mgpbbbc::ExperimentConfig config = build_config(benchmark, combo, true, false, fes_set);
            config.run.bandwidth = mgpbbbc::BandwidthStrategy::fixed_value(h);
            if (!flags.out.empty()) {
                config.output_dir = std::filesystem::path(flags.out) /
                                    (benchmark.id + "_n" + std::to_string(pop) + "_h" +
                                     mgpbbbc::detail::format_double(h));
            }
            const mgpbbbc::ExperimentReport report = mgpbbbc::run_experiment(benchmark, config);
            for (const auto& level : report.levels) {
                std::cout << benchmark.id << ',' << pop << ','
                          << mgpbbbc::detail::format_double(h) << ','
                          << mgpbbbc::detail::format_double(level.epsilon) << ','
                          << mgpbbbc::detail::format_double(level.pr) << ','
                          << mgpbbbc::detail::format_double(level.sr) << '\n';
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal optimization by big-bang/big-crunch niching"};
    app.require_subcommand(1);

    RunFlags flags;
    std::string pop_grid;
    std::string bandwidth_grid;

    CLI::App* run_cmd = app.add_subcommand("run", "Run a batch of seeded optimization runs");
    run_cmd->add_option("--problem", flags.problem, "Built-in id (F1..F10) or custom problem file")
        ->required();
    auto* pop_opt = run_cmd->add_option("--pop", flags.pop, "Population size n");
    auto* bw_opt = run_cmd->add_option("--bandwidth", flags.bandwidth,
                                       "Bandwidth: h, vol:<ratio> or spread:<ratio>");
    auto* fes_opt = run_cmd->add_option("--max-fes", flags.max_fes, "Evaluation budget");
    run_cmd->add_option("--runs", flags.runs, "Number of runs (seeds seed..seed+runs-1)");
    run_cmd->add_option("--seed", flags.seed, "Base seed");
    run_cmd->add_option("--accuracy", flags.accuracy, "Comma-separated accuracy levels");
    run_cmd->add_option("--out", flags.out, "Output directory (omit to skip persistence)");
    run_cmd->add_option("--data", flags.data, "Alternate benchmark settings file");

    CLI::App* verify_cmd =
        app.add_subcommand("verify-registry", "Validate a problem's peak registry");
    verify_cmd->add_option("--problem", flags.problem, "Built-in id or custom problem file")
        ->required();
    verify_cmd->add_option("--data", flags.data, "Alternate benchmark settings file");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Grid sweep over population and bandwidth");
    sweep_cmd->add_option("--problem", flags.problem, "Built-in id or custom problem file")
        ->required();
    sweep_cmd->add_option("--pop-grid", pop_grid, "Comma-separated population sizes")->required();
    sweep_cmd->add_option("--bandwidth-grid", bandwidth_grid, "Comma-separated fixed bandwidths")
        ->required();
    auto* sweep_fes_opt = sweep_cmd->add_option("--max-fes", flags.max_fes, "Evaluation budget");
    sweep_cmd->add_option("--runs", flags.runs, "Number of runs per grid point");
    sweep_cmd->add_option("--seed", flags.seed, "Base seed");
    sweep_cmd->add_option("--accuracy", flags.accuracy, "Comma-separated accuracy levels");
    sweep_cmd->add_option("--out", flags.out, "Output directory (omit to skip persistence)");
    sweep_cmd->add_option("--data", flags.data, "Alternate benchmark settings file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed())
            return cmd_run(flags, pop_opt->count() > 0, bw_opt->count() > 0, fes_opt->count() > 0);
        if (verify_cmd->parsed()) return cmd_verify_registry(flags.problem, flags.data);
        if (sweep_cmd->parsed())
            return cmd_sweep(flags, pop_grid, bandwidth_grid, sweep_fes_opt->count() > 0);
    } catch (const mgpbbbc::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const mgpbbbc::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
