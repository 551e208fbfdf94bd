#include <doctest.h>

#include <set>

#include "aldc/protocol.hpp"

using namespace aldc;
using namespace aldc::protocol;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.dim = 16;
    c.base_class_count = 8;
    c.base_samples_per_class = 40;
    c.session_count = 3;
    c.ways = 3;
    c.shots = 4;
    c.unlabeled_count = 30;
    c.test_per_class = 20;
    return c;
}

}  // namespace

TEST_CASE("base session shape") {
    ExperimentConfig c;
    c.base_class_count = 60;
    c.base_samples_per_class = 5;
    c.test_per_class = 2;
    c.session_count = 0;
    c.dim = 32;
    const auto bench = datagen::generate_benchmark(c);
    const auto state = run_base_session(c, bench.sessions[0]);
    CHECK(state.weights.size() == 60);
    CHECK(state.base_stats.size() == 60);
}

TEST_CASE("single-sample base class stores a zero covariance") {
    auto c = small_config();
    c.base_samples_per_class = 1;
    const auto bench = datagen::generate_benchmark(c);
    const auto state = run_base_session(c, bench.sessions[0]);
    for (const auto& [id, s] : state.base_stats) {
        CHECK(s.count == 1);
        CHECK(s.covariance.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("base session with a missing class") {
    const auto c = small_config();
    auto bench = datagen::generate_benchmark(c);
    auto& labeled = bench.sessions[0].labeled;
    std::erase_if(labeled, [](const LabeledFeature& f) { return f.class_id == 3; });
    CHECK_THROWS_AS(run_base_session(c, bench.sessions[0]), DataError);
}

TEST_CASE("strategy bookkeeping") {
    const auto c = small_config();
    const auto bench = datagen::generate_benchmark(c);
    const auto s0 = run_base_session(c, bench.sessions[0]);

    const auto base = run_incremental_session(c, s0, bench.sessions[1], Strategy::kBaseline);
    CHECK(base.metrics.n_ambiguous == 0);
    CHECK(base.metrics.n_confident == 30);
    CHECK(base.metrics.n_generated == 0);
    CHECK(base.metrics.tau_used == -1.0);

    const auto drop = run_incremental_session(c, s0, bench.sessions[1], Strategy::kDrop);
    CHECK(drop.metrics.n_generated == 0);
    CHECK(drop.metrics.n_confident + drop.metrics.n_ambiguous == 30);
    CHECK(drop.update_ids.size() == 12 + drop.metrics.n_confident);

    const auto stat = run_incremental_session(c, s0, bench.sessions[1], Strategy::kStatic);
    CHECK(stat.metrics.tau_used == c.static_threshold);
    CHECK(stat.metrics.n_generated == 3 * 10);

    const auto dyn = run_incremental_session(c, s0, bench.sessions[1], Strategy::kDynamic);
    CHECK(dyn.metrics.n_confident + dyn.metrics.n_ambiguous == 30);
    CHECK(dyn.metrics.n_confident == drop.metrics.n_confident);
    CHECK(dyn.metrics.tau_used == drop.metrics.tau_used);
    CHECK(dyn.state.weights.size() == 11);
    CHECK(dyn.state.base_stats == s0.base_stats);
}

TEST_CASE("drop uses ambiguous samples for nothing") {
    const auto c = small_config();
    const auto bench = datagen::generate_benchmark(c);
    const auto s0 = run_base_session(c, bench.sessions[0]);
    const auto out = run_incremental_session(c, s0, bench.sessions[1], Strategy::kDrop);
    std::set<SampleId> pool_ids;
    for (const auto& u : bench.sessions[1].unlabeled) pool_ids.insert(u.sample_id);
    std::size_t pooled = 0;
    for (SampleId id : out.update_ids) pooled += pool_ids.count(id);
    CHECK(pooled == out.metrics.n_confident);
    CHECK(out.metrics.n_ambiguous > 0);
}

TEST_CASE("default size gives fifty generated features per session") {
    ExperimentConfig c;
    c.base_samples_per_class = 30;
    c.test_per_class = 10;
    c.session_count = 1;
    c.novel_class_count = 5;
    const auto r = run_experiment(c);
    REQUIRE(r.sessions.size() == 2);
    CHECK(r.sessions[1].n_generated == 50);
}

TEST_CASE("no incremental sessions") {
    auto c = small_config();
    c.session_count = 0;
    const auto r = run_experiment(c);
    REQUIRE(r.sessions.size() == 1);
    CHECK(r.avg_all == r.sessions[0].acc_all);
    CHECK_FALSE(r.sessions[0].acc_novel.has_value());
    CHECK_FALSE(r.sessions[0].tau_used.has_value());
}

TEST_CASE("runs are deterministic") {
    const auto c = small_config();
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    CHECK(a.sessions == b.sessions);
    CHECK(a.avg_all == b.avg_all);
    const auto abl = run_ablation(c);
    CHECK(abl.at(Strategy::kDynamic).sessions == a.sessions);
    CHECK(abl.size() == 4);
}

TEST_CASE("weight count grows by ways per session") {
    const auto c = small_config();
    const auto bench = datagen::generate_benchmark(c);
    auto state = run_base_session(c, bench.sessions[0]);
    for (int t = 1; t <= c.session_count; ++t) {
        state = run_incremental_session(c, state, bench.sessions[t], Strategy::kDynamic).state;
        CHECK(state.weights.size() == static_cast<std::size_t>(8 + 3 * t));
    }
}

TEST_CASE("sessions must come in order") {
    const auto c = small_config();
    const auto bench = datagen::generate_benchmark(c);
    const auto s0 = run_base_session(c, bench.sessions[0]);
    CHECK_THROWS_AS(run_incremental_session(c, s0, bench.sessions[2], Strategy::kDynamic), DataError);
}

TEST_CASE("freezing base weights keeps them") {
    auto c = small_config();
    c.update_base_weights = false;
    const auto bench = datagen::generate_benchmark(c);
    const auto s0 = run_base_session(c, bench.sessions[0]);
    const auto out = run_incremental_session(c, s0, bench.sessions[1], Strategy::kBaseline);
    for (ClassId b : s0.weights.base_ids().class_ids) CHECK(out.state.weights.weight(b) == s0.weights.weight(b));
}

TEST_CASE("empty pool") {
    auto c = small_config();
    c.unlabeled_count = 0;
    const auto r = run_experiment(c);
    CHECK(r.sessions[1].n_confident == 0);
    CHECK_FALSE(r.sessions[1].pseudo_precision.has_value());
    CHECK_FALSE(r.sessions[1].tau_used.has_value());
}

TEST_CASE("sweep grids") {
    auto c = small_config();
    c.session_count = 1;
    c.novel_class_count = 3;
    const std::vector<SweepAxis> m_grid{{SweepParam::kUnlabeledCount, {25, 50, 75, 125}}};
    const auto runs = sweep(c, m_grid);
    REQUIRE(runs.size() == 4);
    CHECK(runs[0].label == "unlabeled_count=25");
    CHECK(runs[3].config.unlabeled_count == 125);

    const std::vector<SweepAxis> smooth{{SweepParam::kSmoothing, {0, 0.2, 0.4, 0.6, 0.8, 1.0}}};
    const auto s = sweep(c, smooth);
    REQUIRE(s.size() == 6);
    CHECK(s[1].label == "m=0.2");
    CHECK(s[5].config.smoothing == 1.0);

    const std::vector<SweepAxis> two{{SweepParam::kSmoothing, {0.1, 0.3}}, {SweepParam::kAlpha, {0.1, 0.2, 0.3}}};
    const auto g = sweep(c, two);
    REQUIRE(g.size() == 6);
    CHECK(g[4].label == "m=0.3;alpha=0.2");

    CHECK_THROWS_WITH_AS(sweep(c, {}), "sweep grid is empty", ConfigError);
    const std::vector<SweepAxis> bad{{SweepParam::kRatio, {1.5}}};
    CHECK_THROWS_AS(sweep(c, bad), ConfigError);
    const std::vector<SweepAxis> frac{{SweepParam::kUnlabeledCount, {2.5}}};
    CHECK_THROWS_AS(sweep(c, frac), ConfigError);
}

TEST_CASE("sweep parameter names") {
    CHECK(parse_sweep_param("M") == SweepParam::kUnlabeledCount);
    CHECK(parse_sweep_param("ratio") == SweepParam::kRatio);
    CHECK(parse_sweep_param("alpha") == SweepParam::kAlpha);
    for (auto p : {SweepParam::kUnlabeledCount, SweepParam::kRatio, SweepParam::kSmoothing, SweepParam::kAlpha}) {
        CHECK(parse_sweep_param(to_string(p)) == p);
    }
    CHECK_THROWS_AS(parse_sweep_param("beta"), ConfigError);
}
