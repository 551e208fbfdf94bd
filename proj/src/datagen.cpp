#include "aldc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aldc/random.hpp"

namespace aldc::datagen {

namespace {

// Stream tags for derive_seed.
enum Stream : std::uint64_t { kMeans = 1, kBaseTrain, kShots, kPool, kTest };

Vector random_direction(int dim, Rng& rng) {
    for (;;) {
        Vector v = standard_normal(dim, rng);
        const double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

class SampleFactory {
public:
    explicit SampleFactory(const GeneratorSet& set) {
        samplers_.reserve(set.classes.size());
        for (const auto& g : set.classes) {
            samplers_.emplace_back(g.true_mean, psd_factor(g.true_covariance));
        }
    }

    LabeledFeature labeled(ClassId c, Rng& rng) {
        return {samplers_.at(static_cast<std::size_t>(c))(rng), c, next_id_++};
    }

private:
    std::vector<GaussianSampler> samplers_;
    SampleId next_id_ = 0;
};

}  // namespace

Vector mix_novel_mean(const Vector& fresh, const Vector& parent_mean, double mixing) {
    if (fresh.size() != parent_mean.size()) {
        throw std::invalid_argument("mix_novel_mean: dimension mismatch");
    }
    return (1.0 - mixing) * fresh + mixing * parent_mean;
}

int base_share(double ratio, int pool_size) {
    // Absorbs representation error such as 0.1 * 30 = 3.0000000000000004.
    const double exact = ratio * static_cast<double>(pool_size);
    const int count = static_cast<int>(std::ceil(exact - 1e-9));
    return std::clamp(count, 0, pool_size);
}

GeneratorSet make_class_generators(const ExperimentConfig& config) {
    validate_config(config);
    const int d = config.dim;
    Rng rng = make_rng(config.seed, {kMeans});
    const Matrix cov = config.class_variance * Matrix::Identity(d, d);

    GeneratorSet set;
    set.classes.reserve(static_cast<std::size_t>(config.total_class_count()));
    for (ClassId c = 0; c < config.base_class_count; ++c) {
        ClassGenerator g;
        g.class_id = c;
        g.true_mean = config.separation_radius * random_direction(d, rng);
        g.true_covariance = cov;
        set.classes.push_back(std::move(g));
    }
    const int novel = config.resolved_novel_class_count();
    for (int j = 0; j < novel; ++j) {
        ClassGenerator g;
        g.class_id = config.base_class_count + j;
        g.parent_base_id = j % config.base_class_count;
        g.mixing = config.novel_mixing;
        g.fresh_direction = config.separation_radius * random_direction(d, rng);
        g.true_mean = mix_novel_mean(g.fresh_direction,
                                     set.classes[static_cast<std::size_t>(*g.parent_base_id)].true_mean,
                                     g.mixing);
        g.true_covariance = cov;
        set.classes.push_back(std::move(g));
    }

    double min_sep = config.base_class_count > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    for (int a = 0; a < config.base_class_count; ++a) {
        for (int b = a + 1; b < config.base_class_count; ++b) {
            min_sep = std::min(min_sep, (set.classes[a].true_mean - set.classes[b].true_mean).norm());
        }
    }
    set.min_base_separation = min_sep;
    return set;
}

Benchmark generate_benchmark(const ExperimentConfig& config) {
    validate_config(config);
    const int base = config.base_class_count;
    if (config.ways * config.session_count > config.resolved_novel_class_count()) {
        throw ConfigError("insufficient novel classes for the requested sessions");
    }

    Benchmark bench;
    bench.generators = make_class_generators(config);
    SampleFactory factory(bench.generators);

    // Test items are drawn once per class and reused by every later session.
    const int seen_total = base + config.ways * config.session_count;
    std::vector<std::vector<LabeledFeature>> test_by_class(static_cast<std::size_t>(seen_total));
    for (ClassId c = 0; c < seen_total; ++c) {
        Rng rng = make_rng(config.seed, {kTest, static_cast<std::uint64_t>(c)});
        auto& items = test_by_class[static_cast<std::size_t>(c)];
        items.reserve(static_cast<std::size_t>(config.test_per_class));
        for (int i = 0; i < config.test_per_class; ++i) items.push_back(factory.labeled(c, rng));
    }
    auto test_through = [&](int seen) {
        std::vector<LabeledFeature> out;
        out.reserve(static_cast<std::size_t>(seen * config.test_per_class));
        for (ClassId c = 0; c < seen; ++c) {
            const auto& items = test_by_class[static_cast<std::size_t>(c)];
            out.insert(out.end(), items.begin(), items.end());
        }
        return out;
    };

    SessionData s0;
    s0.session_index = 0;
    s0.new_classes.session_index = 0;
    for (ClassId c = 0; c < base; ++c) {
        s0.new_classes.class_ids.push_back(c);
        Rng rng = make_rng(config.seed, {kBaseTrain, static_cast<std::uint64_t>(c)});
        for (int i = 0; i < config.base_samples_per_class; ++i) s0.labeled.push_back(factory.labeled(c, rng));
    }
    s0.test = test_through(base);
    bench.sessions.push_back(std::move(s0));

    const int n_base_pool = base_share(config.base_to_novel_ratio, config.unlabeled_count);
    for (int t = 1; t <= config.session_count; ++t) {
        SessionData s;
        s.session_index = t;
        s.new_classes.session_index = t;
        const ClassId first_new = base + (t - 1) * config.ways;
        for (ClassId c = first_new; c < first_new + config.ways; ++c) {
            s.new_classes.class_ids.push_back(c);
            Rng rng = make_rng(config.seed, {kShots, static_cast<std::uint64_t>(c)});
            for (int i = 0; i < config.shots; ++i) s.labeled.push_back(factory.labeled(c, rng));
        }

        const int novel_seen = t * config.ways;
        const int n_novel_pool = config.unlabeled_count - n_base_pool;
        if (n_novel_pool > 0 && novel_seen == 0) {
            throw ConfigError("unlabeled pool needs novel classes but ways is 0");
        }
        Rng rng = make_rng(config.seed, {kPool, static_cast<std::uint64_t>(t)});
        std::vector<ClassId> hidden;
        hidden.reserve(static_cast<std::size_t>(config.unlabeled_count));
        std::uniform_int_distribution<ClassId> pick_base(0, base - 1);
        for (int i = 0; i < n_base_pool; ++i) hidden.push_back(pick_base(rng));
        if (n_novel_pool > 0) {
            std::uniform_int_distribution<ClassId> pick_novel(base, base + novel_seen - 1);
            for (int i = 0; i < n_novel_pool; ++i) hidden.push_back(pick_novel(rng));
        }
        std::shuffle(hidden.begin(), hidden.end(), rng);
        for (ClassId c : hidden) {
            LabeledFeature f = factory.labeled(c, rng);
            s.unlabeled.push_back({std::move(f.vector), f.sample_id});
        }
        s.hidden_labels = std::move(hidden);
        s.test = test_through(base + novel_seen);
        bench.sessions.push_back(std::move(s));
    }
    return bench;
}

}  // namespace aldc::datagen
