#include "aldc/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace aldc::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

double parse_double_cell(std::string_view s, std::size_t line) {
    double v = 0.0;
    if (!parse_number(s, v) || !std::isfinite(v)) {
        throw DataError("line " + std::to_string(line) + ": non-numeric cell '" + std::string(trim(s)) + "'");
    }
    return v;
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("failed writing " + path.string());
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    std::string s(buf, ptr);
    if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string format_fixed2(double v) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------------------
// Feature files

std::string format_features(std::span<const LabeledFeature> samples) {
    if (samples.empty()) throw DataError("empty dataset");
    const Eigen::Index d = samples.front().vector.size();
    if (d == 0) throw DataError("features must have at least one component");
    std::set<ClassId> classes;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].vector.size() != d) {
            throw DataError("sample " + std::to_string(i) + " has dimension " +
                            std::to_string(samples[i].vector.size()) + ", expected " + std::to_string(d));
        }
        if (samples[i].class_id < 0) throw DataError("negative class id in sample " + std::to_string(i));
        classes.insert(samples[i].class_id);
    }

    std::string out = "dim=" + std::to_string(d) + ",classes=" + std::to_string(classes.size()) +
                      ",samples=" + std::to_string(samples.size()) + "\n";
    for (const auto& s : samples) {
        out += std::to_string(s.class_id);
        for (Eigen::Index j = 0; j < d; ++j) {
            out += ',';
            out += format_double(s.vector[j]);
        }
        out += '\n';
    }
    return out;
}

void write_features(const std::filesystem::path& path, std::span<const LabeledFeature> samples) {
    write_text(path, format_features(samples));
}

std::vector<LabeledFeature> parse_features(std::string_view text, SampleId first_id) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw DataError("empty dataset");

    FeatureFileHeader header;
    {
        const auto fields = split(trim(lines.front()), ',');
        bool ok = fields.size() == 3;
        long long dim = 0, classes = 0, samples = 0;
        const char* keys[] = {"dim=", "classes=", "samples="};
        long long* slots[] = {&dim, &classes, &samples};
        for (std::size_t i = 0; ok && i < 3; ++i) {
            const auto f = trim(fields[i]);
            ok = f.substr(0, std::string_view(keys[i]).size()) == keys[i] &&
                 parse_number(f.substr(std::string_view(keys[i]).size()), *slots[i]);
        }
        if (!ok) throw DataError("line 1: expected header 'dim=<d>,classes=<c>,samples=<n>'");
        if (dim <= 0 || classes <= 0 || samples <= 0) throw DataError("line 1: header counts must be positive");
        header = {static_cast<int>(dim), static_cast<int>(classes), static_cast<std::size_t>(samples)};
    }

    std::vector<LabeledFeature> out;
    std::set<ClassId> classes;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line = i + 1;
        const auto row = trim(lines[i]);
        if (row.empty()) continue;
        const auto cells = split(row, ',');
        if (cells.size() != static_cast<std::size_t>(header.dim) + 1) {
            throw DataError(line_prefix(line) + "expected " + std::to_string(header.dim + 1) + " fields, got " +
                            std::to_string(cells.size()));
        }
        long long c = 0;
        if (!parse_number(cells[0], c) || c < 0 || c > std::numeric_limits<ClassId>::max()) {
            throw DataError(line_prefix(line) + "invalid class id '" + std::string(trim(cells[0])) + "'");
        }
        Vector v(header.dim);
        for (int j = 0; j < header.dim; ++j) v[j] = parse_double_cell(cells[static_cast<std::size_t>(j) + 1], line);
        classes.insert(static_cast<ClassId>(c));
        out.push_back({std::move(v), static_cast<ClassId>(c), first_id + out.size()});
    }
    if (out.size() != header.sample_count) {
        throw DataError("header declares " + std::to_string(header.sample_count) + " samples but file has " +
                        std::to_string(out.size()));
    }
    if (classes.size() != static_cast<std::size_t>(header.class_count)) {
        throw DataError("header declares " + std::to_string(header.class_count) + " classes but file has " +
                        std::to_string(classes.size()));
    }
    return out;
}

std::vector<LabeledFeature> read_features(const std::filesystem::path& path, SampleId first_id) {
    try {
        return parse_features(read_text(path), first_id);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Config files

namespace {

struct ConfigKey {
    const char* name;
    bool required;
    std::function<bool(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
ConfigKey int_key(const char* name, bool required, T ExperimentConfig::*field) {
    return {name, required,
            [field](ExperimentConfig& c, std::string_view v) { return parse_number(v, c.*field); },
            [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

ConfigKey real_key(const char* name, bool required, double ExperimentConfig::*field) {
    return {name, required,
            [field](ExperimentConfig& c, std::string_view v) {
                return parse_number(v, c.*field) && std::isfinite(c.*field);
            },
            [field](const ExperimentConfig& c) { return format_double(c.*field); }};
}

ConfigKey bool_key(const char* name, bool ExperimentConfig::*field) {
    return {name, false,
            [field](ExperimentConfig& c, std::string_view v) {
                if (v == "true") c.*field = true;
                else if (v == "false") c.*field = false;
                else return false;
                return true;
            },
            [field](const ExperimentConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

ConfigKey auto_int_key(const char* name, bool required, std::optional<int> ExperimentConfig::*field) {
    return {name, required,
            [field](ExperimentConfig& c, std::string_view v) {
                if (v == "auto") {
                    c.*field = std::nullopt;
                    return true;
                }
                int x = 0;
                if (!parse_number(v, x)) return false;
                c.*field = x;
                return true;
            },
            [field](const ExperimentConfig& c) { return c.*field ? std::to_string(*(c.*field)) : std::string("auto"); }};
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        int_key("dim", true, &ExperimentConfig::dim),
        int_key("base_class_count", true, &ExperimentConfig::base_class_count),
        int_key("ways", true, &ExperimentConfig::ways),
        int_key("shots", true, &ExperimentConfig::shots),
        int_key("session_count", true, &ExperimentConfig::session_count),
        int_key("unlabeled_count", true, &ExperimentConfig::unlabeled_count),
        real_key("base_to_novel_ratio", true, &ExperimentConfig::base_to_novel_ratio),
        real_key("m", true, &ExperimentConfig::smoothing),
        real_key("alpha", true, &ExperimentConfig::alpha),
        int_key("k_base", true, &ExperimentConfig::k_base),
        auto_int_key("generated_per_class", true, &ExperimentConfig::generated_per_class),
        {"strategy", true,
         [](ExperimentConfig& c, std::string_view v) {
             try {
                 c.strategy = parse_strategy(v);
             } catch (const ConfigError&) {
                 return false;
             }
             return true;
         },
         [](const ExperimentConfig& c) { return std::string(to_string(c.strategy)); }},
        real_key("static_threshold", true, &ExperimentConfig::static_threshold),
        int_key("seed", true, &ExperimentConfig::seed),
        int_key("test_per_class", true, &ExperimentConfig::test_per_class),
        int_key("base_samples_per_class", false, &ExperimentConfig::base_samples_per_class),
        auto_int_key("novel_class_count", false, &ExperimentConfig::novel_class_count),
        real_key("separation_radius", false, &ExperimentConfig::separation_radius),
        real_key("class_variance", false, &ExperimentConfig::class_variance),
        real_key("novel_mixing", false, &ExperimentConfig::novel_mixing),
        bool_key("update_base_weights", &ExperimentConfig::update_base_weights),
        bool_key("retain_base_evidence", &ExperimentConfig::retain_base_evidence),
        bool_key("include_ambiguous_in_stats", &ExperimentConfig::include_ambiguous_in_stats),
    };
    return keys;
}

ExperimentConfig config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs,
                                   const std::vector<std::size_t>& lines) {
    ExperimentConfig config;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [key, value] = pairs[i];
        const std::string where = lines.empty() ? "" : line_prefix(lines[i]);
        const ConfigKey* entry = nullptr;
        for (const auto& k : config_keys()) {
            if (key == k.name) entry = &k;
        }
        if (!entry) throw ConfigError(where + "unknown key: " + key);
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key: " + key);
        if (!entry->set(config, value)) throw ConfigError(where + "invalid value for " + key + ": '" + value + "'");
    }
    for (const auto& k : config_keys()) {
        if (k.required && seen.count(k.name) == 0) throw ConfigError(std::string("missing key: ") + k.name);
    }
    return validate_config(config);
}

}  // namespace

std::string format_config(const ExperimentConfig& config) {
    std::string out;
    for (const auto& k : config_keys()) out += std::string(k.name) + "=" + k.get(config) + "\n";
    return out;
}

ExperimentConfig parse_config(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::size_t> line_numbers;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_prefix(i + 1) + "expected key=value");
        pairs.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
        line_numbers.push_back(i + 1);
    }
    return config_from_pairs(pairs, line_numbers);
}

void write_config(const std::filesystem::path& path, const ExperimentConfig& config) {
    write_text(path, format_config(config));
}

ExperimentConfig read_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string optional_pct(const std::optional<double>& v) { return v ? format_fixed2(*v) : "-"; }
std::string optional_real(const std::optional<double>& v) { return v ? format_double(*v) : "-"; }

// The value that a two-decimal cell parses back to.
double emitted(double v) { return std::stod(format_fixed2(v)); }

}  // namespace

const std::string& ReportBlock::at(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return v;
    }
    throw DataError("report block '" + label + "' has no key " + std::string(key));
}

std::string format_report(std::span<const protocol::RunReport> runs) {
    if (runs.empty()) throw DataError("report has no runs");
    const std::size_t n_sessions = runs.front().sessions.size();
    for (const auto& r : runs) {
        if (r.sessions.size() != n_sessions || n_sessions == 0) {
            throw DataError("all runs in a report need the same, nonzero number of sessions");
        }
        if (r.label.find_first_of(",\n[]") != std::string::npos) {
            throw DataError("run label '" + r.label + "' contains a reserved character");
        }
    }

    std::string out = "run";
    for (std::size_t t = 0; t < n_sessions; ++t) out += ",session_" + std::to_string(t);
    out += ",avg\n";
    for (const auto& r : runs) {
        out += r.label;
        double sum = 0.0;
        for (const auto& m : r.sessions) {
            out += "," + format_fixed2(m.acc_all);
            sum += emitted(m.acc_all);
        }
        out += "," + format_double(sum / static_cast<double>(n_sessions)) + "\n";
    }

    for (const auto& r : runs) {
        out += "\n[run " + r.label + "]\n";
        const std::string config_text = format_config(r.config);
        for (const auto& line : lines_of(config_text)) out += "config." + std::string(line) + "\n";
        for (const auto& m : r.sessions) {
            const std::string p = "session." + std::to_string(m.session_index) + ".";
            out += p + "acc_all=" + format_fixed2(m.acc_all) + "\n";
            out += p + "acc_base=" + optional_pct(m.acc_base) + "\n";
            out += p + "acc_novel=" + optional_pct(m.acc_novel) + "\n";
            out += p + "pseudo_precision=" + optional_real(m.pseudo_precision) + "\n";
            out += p + "n_confident=" + std::to_string(m.n_confident) + "\n";
            out += p + "n_ambiguous=" + std::to_string(m.n_ambiguous) + "\n";
            out += p + "n_generated=" + std::to_string(m.n_generated) + "\n";
            out += p + "tau_used=" + optional_real(m.tau_used) + "\n";
        }
        out += "avg_all=" + format_double(r.avg_all) + "\n";
    }
    return out;
}

void write_report(const std::filesystem::path& path, std::span<const protocol::RunReport> runs) {
    write_text(path, format_report(runs));
}

ParsedReport parse_report(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw DataError("empty report");
    const auto header = split(trim(lines.front()), ',');
    if (header.size() < 3 || header.front() != "run" || header.back() != "avg") {
        throw DataError("line 1: expected report header 'run,session_0,...,avg'");
    }
    const std::size_t n_sessions = header.size() - 2;

    ParsedReport report;
    std::size_t i = 1;
    for (; i < lines.size(); ++i) {
        const auto row = trim(lines[i]);
        if (row.empty()) break;
        const auto cells = split(row, ',');
        if (cells.size() != header.size()) {
            throw DataError(line_prefix(i + 1) + "expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(cells.size()));
        }
        ReportRow r;
        r.label = std::string(cells.front());
        for (std::size_t t = 0; t < n_sessions; ++t) r.sessions.push_back(parse_double_cell(cells[t + 1], i + 1));
        r.avg = parse_double_cell(cells.back(), i + 1);
        report.rows.push_back(std::move(r));
    }
    for (; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.size() < 6 || line.substr(0, 5) != "[run " || line.back() != ']') {
                throw DataError(line_prefix(i + 1) + "malformed block header");
            }
            report.blocks.push_back({std::string(line.substr(5, line.size() - 6)), {}});
            continue;
        }
        if (report.blocks.empty()) throw DataError(line_prefix(i + 1) + "entry outside a run block");
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw DataError(line_prefix(i + 1) + "expected key=value");
        report.blocks.back().entries.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }
    return report;
}

ParsedReport read_report(const std::filesystem::path& path) { return parse_report(read_text(path)); }

ExperimentConfig config_from_block(const ReportBlock& block) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [k, v] : block.entries) {
        if (k.rfind("config.", 0) == 0) pairs.emplace_back(k.substr(7), v);
    }
    return config_from_pairs(pairs, {});
}

// ---------------------------------------------------------------------------
// Benchmark directories

namespace {

std::filesystem::path session_file(const std::filesystem::path& dir, int t, const char* split_name) {
    return dir / ("session_" + std::to_string(t) + "_" + split_name + ".csv");
}

}  // namespace

void save_benchmark(const std::filesystem::path& dir, const datagen::Benchmark& bench) {
    std::filesystem::create_directories(dir);
    for (const auto& s : bench.sessions) {
        if (!s.labeled.empty()) write_features(session_file(dir, s.session_index, "labeled"), s.labeled);
        if (!s.unlabeled.empty()) {
            std::vector<LabeledFeature> pool;
            pool.reserve(s.unlabeled.size());
            for (std::size_t i = 0; i < s.unlabeled.size(); ++i) {
                pool.push_back({s.unlabeled[i].vector, s.hidden_labels[i], s.unlabeled[i].sample_id});
            }
            write_features(session_file(dir, s.session_index, "unlabeled"), pool);
        }
        if (!s.test.empty()) write_features(session_file(dir, s.session_index, "test"), s.test);
    }
}

datagen::Benchmark load_benchmark(const std::filesystem::path& dir, const ExperimentConfig& config) {
    validate_config(config);
    datagen::Benchmark bench;
    SampleId next_id = 0;
    auto load = [&](int t, const char* name, bool required) {
        const auto path = session_file(dir, t, name);
        if (!std::filesystem::exists(path)) {
            if (required) throw DataError("missing " + path.string());
            return std::vector<LabeledFeature>{};
        }
        auto items = read_features(path, next_id);
        next_id += items.size();
        return items;
    };

    int dim = -1;
    for (int t = 0; t <= config.session_count; ++t) {
        datagen::SessionData s;
        s.session_index = t;
        s.new_classes.session_index = t;
        s.labeled = load(t, "labeled", true);
        std::set<ClassId> ids;
        for (const auto& f : s.labeled) ids.insert(f.class_id);
        s.new_classes.class_ids.assign(ids.begin(), ids.end());
        for (auto& f : load(t, "unlabeled", false)) {
            s.hidden_labels.push_back(f.class_id);
            s.unlabeled.push_back({std::move(f.vector), f.sample_id});
        }
        s.test = load(t, "test", true);
        for (const auto* split : {&s.labeled, &s.test}) {
            for (const auto& f : *split) {
                if (dim < 0) dim = static_cast<int>(f.vector.size());
                if (f.vector.size() != dim) throw DataError("feature dimension differs across benchmark files");
            }
        }
        for (const auto& u : s.unlabeled) {
            if (u.vector.size() != dim) throw DataError("feature dimension differs across benchmark files");
        }
        bench.sessions.push_back(std::move(s));
    }
    if (dim != config.dim) {
        throw ConfigError("benchmark features have dim " + std::to_string(dim) + " but config says " +
                          std::to_string(config.dim));
    }
    return bench;
}

}  // namespace aldc::io
