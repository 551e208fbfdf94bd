#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aldc/datagen.hpp"
#include "aldc/protocol.hpp"

namespace aldc::io {

/// Shortest decimal text that parses back to exactly `v`; integral values
/// keep a trailing ".0".
std::string format_double(double v);

/// Fixed two-decimal text, as used for accuracy percentages.
std::string format_fixed2(double v);

struct FeatureFileHeader {
    int dim = 0;
    int class_count = 0;
    std::size_t sample_count = 0;
};

/// Header `dim=<d>,classes=<c>,samples=<n>`, then one `class_id,v1,...,vd` row
/// per sample.
void write_features(const std::filesystem::path& path, std::span<const LabeledFeature> samples);

/// Rows get sample ids first_id, first_id + 1, ... in file order.
std::vector<LabeledFeature> read_features(const std::filesystem::path& path, SampleId first_id = 0);
std::vector<LabeledFeature> parse_features(std::string_view text, SampleId first_id = 0);
std::string format_features(std::span<const LabeledFeature> samples);

/// `key=value` lines, one per field. Blank lines and `#` comments are skipped.
std::string format_config(const ExperimentConfig& config);
ExperimentConfig parse_config(std::string_view text);
void write_config(const std::filesystem::path& path, const ExperimentConfig& config);
ExperimentConfig read_config(const std::filesystem::path& path);

/// Comma-separated table (one row per run: label, session accuracies with two
/// decimals, Avg) followed by one `[run <label>]` key-value block per run.
/// Avg is the mean of the emitted session values.
std::string format_report(std::span<const protocol::RunReport> runs);
void write_report(const std::filesystem::path& path, std::span<const protocol::RunReport> runs);

struct ReportRow {
    std::string label;
    std::vector<double> sessions;
    double avg = 0.0;
};

struct ReportBlock {
    std::string label;
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string& at(std::string_view key) const;
};

struct ParsedReport {
    std::vector<ReportRow> rows;
    std::vector<ReportBlock> blocks;
};

ParsedReport parse_report(std::string_view text);
ParsedReport read_report(const std::filesystem::path& path);

/// Rebuilds the config echoed in a report block.
ExperimentConfig config_from_block(const ReportBlock& block);

/// Writes session_<t>_{labeled,unlabeled,test}.csv under `dir`. Unlabeled
/// files carry the hidden class in the class column.
void save_benchmark(const std::filesystem::path& dir, const datagen::Benchmark& bench);

/// Loads sessions 0..config.session_count written by save_benchmark or by an
/// external embedding pipeline using the same layout.
datagen::Benchmark load_benchmark(const std::filesystem::path& dir, const ExperimentConfig& config);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace aldc::io
