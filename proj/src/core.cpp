#include "aldc/core.hpp"

#include <cmath>

namespace aldc {

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::kBaseline: return "baseline";
        case Strategy::kDrop: return "drop";
        case Strategy::kStatic: return "static";
        case Strategy::kDynamic: return "dynamic";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view text) {
    for (Strategy s : kAllStrategies) {
        if (to_string(s) == text) return s;
    }
    throw ConfigError("unknown strategy: " + std::string(text));
}

int ExperimentConfig::resolved_generated_per_class() const {
    if (generated_per_class) return *generated_per_class;
    return ways > 0 ? unlabeled_count / ways : 0;
}

int ExperimentConfig::resolved_novel_class_count() const {
    return novel_class_count.value_or(ways * session_count);
}

namespace {

void check(bool ok, const char* message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

const ExperimentConfig& validate_config(const ExperimentConfig& c) {
    check(c.dim > 0, "dim must be positive");
    check(c.base_class_count > 0, "base_class_count must be positive");
    check(c.ways >= 0, "ways must be non-negative");
    check(c.shots >= 0, "shots must be non-negative");
    check(c.session_count >= 0, "session_count must be non-negative");
    check(c.unlabeled_count >= 0, "unlabeled_count must be non-negative");
    check(std::isfinite(c.base_to_novel_ratio) && c.base_to_novel_ratio >= 0.0 &&
              c.base_to_novel_ratio <= 1.0,
          "base_to_novel_ratio must lie in [0, 1]");
    check(std::isfinite(c.smoothing) && c.smoothing >= 0.0, "m must be non-negative");
    check(std::isfinite(c.alpha) && c.alpha >= 0.0, "alpha must be non-negative");
    check(c.k_base >= 0, "k_base must be non-negative");
    check(!c.generated_per_class || *c.generated_per_class >= 0,
          "generated_per_class must be non-negative");
    check(std::isfinite(c.static_threshold), "static_threshold must be finite");
    check(c.test_per_class >= 0, "test_per_class must be non-negative");
    check(c.base_samples_per_class > 0, "base_samples_per_class must be positive");
    check(!c.novel_class_count || *c.novel_class_count >= 0,
          "novel_class_count must be non-negative");
    check(c.ways * c.session_count <= c.resolved_novel_class_count(),
          "ways * session_count exceeds novel_class_count");
    check(std::isfinite(c.separation_radius) && c.separation_radius > 0.0,
          "separation_radius must be positive");
    check(std::isfinite(c.class_variance) && c.class_variance >= 0.0,
          "class_variance must be non-negative");
    check(std::isfinite(c.novel_mixing) && c.novel_mixing >= 0.0 && c.novel_mixing <= 1.0,
          "novel_mixing must lie in [0, 1]");
    return c;
}

void require_finite(const Vector& v, std::string_view what) {
    if (!v.allFinite()) throw DataError(std::string(what) + " has non-finite components");
}

}  // namespace aldc
