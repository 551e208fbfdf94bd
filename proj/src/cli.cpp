#include "aldc/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aldc/dataio.hpp"
#include "aldc/protocol.hpp"

namespace aldc::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::optional<int> seed;
    std::string out_dir;
    std::string data_dir;
    std::string param;
    std::string values;
    std::string in_path;
};

ExperimentConfig load_config(const Options& o) {
    ExperimentConfig config = io::read_config(o.config_path);
    if (o.seed) config.seed = *o.seed;
    return validate_config(config);
}

datagen::Benchmark benchmark_for(const Options& o, const ExperimentConfig& config) {
    if (!o.data_dir.empty()) return io::load_benchmark(o.data_dir, config);
    return datagen::generate_benchmark(config);
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string cell = text.substr(start, comma - start);
        double v = 0.0;
        const char* end = cell.data() + cell.size();
        auto [ptr, ec] = std::from_chars(cell.data(), end, v);
        if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
            throw UsageError("--values: '" + cell + "' is not a number");
        }
        out.push_back(v);
        start = comma + 1;
    }
    return out;
}

void print_summary(std::ostream& out, std::span<const io::ReportRow> rows) {
    std::size_t width = 3;
    for (const auto& r : rows) width = std::max(width, r.label.size());
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.insert(0, w - s.size(), ' ');
        return s;
    };
    out << pad("run", width);
    const std::size_t n = rows.empty() ? 0 : rows.front().sessions.size();
    for (std::size_t t = 0; t < n; ++t) out << pad("s" + std::to_string(t), 8);
    out << pad("avg", 8) << '\n';
    for (const auto& r : rows) {
        out << pad(r.label, width);
        for (double v : r.sessions) out << pad(io::format_fixed2(v), 8);
        out << pad(io::format_fixed2(r.avg), 8) << '\n';
    }
}

// Writes the report and echoes the table exactly as it will be read back.
void emit(const fs::path& path, std::span<const protocol::RunReport> runs, std::ostream& out) {
    const std::string text = io::format_report(runs);
    fs::create_directories(path.parent_path());
    io::write_text(path, text);
    print_summary(out, io::parse_report(text).rows);
}

void cmd_gen(const Options& o, std::ostream& out) {
    const ExperimentConfig config = load_config(o);
    const datagen::Benchmark bench = datagen::generate_benchmark(config);
    io::save_benchmark(o.out_dir, bench);
    io::write_config(fs::path(o.out_dir) / "config.cfg", config);
    std::size_t labeled = 0, pool = 0, test = 0;
    for (const auto& s : bench.sessions) {
        labeled += s.labeled.size();
        pool += s.unlabeled.size();
        test += s.test.size();
    }
    out << "sessions " << bench.sessions.size() << ", labeled " << labeled << ", unlabeled " << pool
        << ", test " << test << '\n';
}

void cmd_run(const Options& o, std::ostream& out) {
    const ExperimentConfig config = load_config(o);
    const auto bench = benchmark_for(o, config);
    const protocol::RunReport report = protocol::run_on_benchmark(config, bench, config.strategy);
    emit(fs::path(o.out_dir) / "report.csv", std::span(&report, 1), out);
}

void cmd_ablate(const Options& o, std::ostream& out) {
    const ExperimentConfig config = load_config(o);
    const auto bench = benchmark_for(o, config);
    std::vector<protocol::RunReport> runs;
    for (auto& [s, r] : protocol::run_ablation(config, bench)) runs.push_back(std::move(r));
    emit(fs::path(o.out_dir) / "ablation.csv", runs, out);
}

void cmd_sweep(const Options& o, std::ostream& out) {
    protocol::SweepParam param;
    try {
        param = protocol::parse_sweep_param(o.param);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    const std::vector<protocol::SweepAxis> grid{{param, parse_values(o.values)}};
    const ExperimentConfig config = load_config(o);
    const auto runs = protocol::sweep(config, grid);
    emit(fs::path(o.out_dir) / "sweep.csv", runs, out);
}

void cmd_report(const Options& o, std::ostream& out) {
    const io::ParsedReport report = io::read_report(o.in_path);
    for (const auto& r : report.rows) {
        double sum = 0.0;
        for (double v : r.sessions) sum += v;
        const double mean = sum / static_cast<double>(r.sessions.size());
        if (std::abs(mean - r.avg) > 1e-9) {
            throw DataError("run " + r.label + ": avg " + io::format_double(r.avg) +
                            " does not match the session mean " + io::format_double(mean));
        }
    }
    print_summary(out, report.rows);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semi-supervised few-shot class-incremental simulation harness", "aldc"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* sub, bool needs_out) {
        sub->add_option("--config", o.config_path, "experiment config file")->required();
        sub->add_option("--seed", o.seed, "override the config seed");
        auto* opt = sub->add_option("--out", o.out_dir, "output directory");
        if (needs_out) opt->required();
    };

    auto* gen = app.add_subcommand("gen", "generate a synthetic benchmark");
    add_common(gen, true);
    auto* run = app.add_subcommand("run", "run one strategy");
    add_common(run, true);
    run->add_option("--data", o.data_dir, "load the benchmark from a directory written by gen");
    auto* ablate = app.add_subcommand("ablate", "run all four strategies on one benchmark");
    add_common(ablate, true);
    ablate->add_option("--data", o.data_dir, "load the benchmark from a directory written by gen");
    auto* sweep = app.add_subcommand("sweep", "sweep one hyperparameter");
    add_common(sweep, true);
    sweep->add_option("--param", o.param, "unlabeled_count, base_to_novel_ratio, m or alpha")->required();
    sweep->add_option("--values", o.values, "comma-separated values")->required();
    auto* report = app.add_subcommand("report", "check and summarize a report file");
    report->add_option("--in", o.in_path, "report file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const CLI::App* active = &app;
        for (const auto* sub : app.get_subcommands()) active = sub;
        err << active->help();
        return 2;
    }

    try {
        if (*gen) cmd_gen(o, out);
        else if (*run) cmd_run(o, out);
        else if (*ablate) cmd_ablate(o, out);
        else if (*sweep) cmd_sweep(o, out);
        else if (*report) cmd_report(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace aldc::cli
