#include <doctest.h>

#include <cmath>
#include <random>

#include "aldc/classifier.hpp"
#include "oracles.hpp"

using namespace aldc;
using namespace aldc::classifier;

namespace {

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Vector unit(int d, int i) {
    Vector v = Vector::Zero(d);
    v[i] = 1.0;
    return v;
}

}  // namespace

TEST_CASE("base weights are normalized class means") {
    const auto w = init_base_weights(std::vector<LabeledFeature>{{v2(1, 0), 0, 0}, {v2(1, 0), 0, 1}});
    CHECK(w.size() == 1);
    CHECK(w.weight(0) == v2(1, 0));

    const auto w2 = init_base_weights(std::vector<LabeledFeature>{{v2(2, 0), 0, 0}, {v2(0, 2), 0, 1}});
    CHECK(w2.weight(0)[0] == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(w2.weight(0)[1] == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(w2.is_base(0));
    CHECK(w2.base_ids().class_ids == std::vector<ClassId>{0});
}

TEST_CASE("zero class mean is a degenerate prototype") {
    const std::vector<LabeledFeature> xs{{v2(1, 1), 4, 0}, {v2(-1, -1), 4, 1}};
    CHECK_THROWS_WITH_AS(init_base_weights(xs), doctest::Contains("degenerate prototype"), DataError);
}

TEST_CASE("novel weights from one shot") {
    std::vector<LabeledFeature> base;
    for (int c = 0; c < 60; ++c) base.push_back({unit(70, c), c, static_cast<SampleId>(c)});
    const auto w = init_base_weights(base);
    CHECK(w.size() == 60);

    Vector shot = Vector::Zero(70);
    shot[1] = 1.0;
    const auto w1 = init_novel_weights(w, std::vector<LabeledFeature>{{shot, 60, 100}});
    CHECK(w1.weight(60) == shot);
    CHECK_FALSE(w1.is_base(60));

    std::vector<LabeledFeature> shots;
    for (int c = 60; c < 65; ++c) shots.push_back({unit(70, c), c, static_cast<SampleId>(c)});
    const auto w5 = init_novel_weights(w, shots);
    CHECK(w5.size() == 65);
    CHECK(w5.novel_ids() == std::vector<ClassId>{60, 61, 62, 63, 64});
    REQUIRE(w5.novel_ids_by_session().size() == 1);
    CHECK(w5.novel_ids_by_session()[0].session_index == 1);
    for (int c = 0; c < 60; ++c) CHECK(w5.weight(c) == w.weight(c));

    CHECK_THROWS_AS(init_novel_weights(w1, std::vector<LabeledFeature>{{shot, 60, 101}}), DataError);
}

TEST_CASE("classify picks the best cosine") {
    std::vector<LabeledFeature> base;
    for (int c = 0; c < 5; ++c) base.push_back({unit(5, c), c, 0});
    const auto w = init_base_weights(base);
    const auto p = classify(unit(5, 3), w);
    CHECK(p.class_id == 3);
    CHECK(p.score == doctest::Approx(1.0));

    const auto w2 = init_base_weights(
        std::vector<LabeledFeature>{{v2(1, 0), 0, 0}, {v2(std::sqrt(0.5), std::sqrt(0.5)), 1, 1}});
    const auto q = classify(v2(1, 0), w2);
    CHECK(q.class_id == 0);
    CHECK(q.score == doctest::Approx(1.0));
    CHECK(v2(1, 0).dot(w2.weight(1)) == doctest::Approx(0.70711).epsilon(1e-5));
}

TEST_CASE("ties go to the lower class id") {
    const auto w = init_base_weights(std::vector<LabeledFeature>{{v2(0, 1), 7, 0}, {v2(0, 1), 2, 1}});
    CHECK(classify(v2(0, 5), w).class_id == 2);
}

TEST_CASE("classify agrees with a brute-force scan") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    std::vector<LabeledFeature> base;
    for (int c = 0; c < 12; ++c) {
        Vector x(8);
        for (int j = 0; j < 8; ++j) x[j] = g(rng);
        base.push_back({x, c, 0});
    }
    const auto w = init_base_weights(base);
    std::vector<std::pair<ClassId, oracle::Vec>> cands;
    for (const auto& [c, vec] : w.all()) cands.emplace_back(c, oracle::to_vec(vec));
    for (int i = 0; i < 200; ++i) {
        Vector x(8);
        for (int j = 0; j < 8; ++j) x[j] = g(rng);
        const auto want = oracle::best_match(oracle::to_vec(x), cands);
        const auto got = classify(x, w);
        CHECK(got.class_id == want.id);
        CHECK(got.score == doctest::Approx(want.score).epsilon(1e-12));
    }
}

TEST_CASE("zero feature is rejected") {
    const auto w = init_base_weights(std::vector<LabeledFeature>{{v2(1, 0), 0, 0}});
    CHECK_THROWS_AS(classify(v2(0, 0), w), DataError);
}

TEST_CASE("re-estimating from the original samples is a fixed point") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(1.0, 1.0);
    std::vector<LabeledFeature> base;
    for (int c = 0; c < 4; ++c) {
        for (int i = 0; i < 30; ++i) {
            Vector x(6);
            for (int j = 0; j < 6; ++j) x[j] = g(rng) + (j == c ? 4.0 : 0.0);
            base.push_back({x, c, static_cast<SampleId>(base.size())});
        }
    }
    const auto w = init_base_weights(base);
    const auto u = update_weights(w, base);
    for (int c = 0; c < 4; ++c) CHECK((u.weight(c) - w.weight(c)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("update from shots plus generated features") {
    const auto w = init_base_weights(std::vector<LabeledFeature>{{v2(1, 0), 0, 0}});
    const auto w1 = init_novel_weights(w, std::vector<LabeledFeature>{{v2(0, 1), 60, 1}});
    const auto u = update_weights(w1, std::vector<LabeledFeature>{{v2(0, 1), 60, 1}, {v2(0, 3), 60}});
    CHECK(u.weight(60)[0] == doctest::Approx(0.0));
    CHECK(u.weight(60)[1] == doctest::Approx(1.0));
    CHECK(u.weight(0) == w1.weight(0));
}

TEST_CASE("empty update changes nothing") {
    const auto w = init_base_weights(std::vector<LabeledFeature>{{v2(1, 2), 0, 0}, {v2(3, -1), 1, 1}});
    const auto u = update_weights(w, {});
    CHECK(u.all() == w.all());
    const auto r = update_weights(w, {}, {{0, {v2(5, 5), 10}}});
    CHECK(r.all() == w.all());
}

TEST_CASE("retained evidence is count-weighted") {
    const auto w = init_base_weights(std::vector<LabeledFeature>{{v2(1, 0), 0, 0}});
    // 3 retained at (1,0) and one new at (0,4): mean (0.75, 1) -> normalized (0.6, 0.8).
    const auto u = update_weights(w, std::vector<LabeledFeature>{{v2(0, 4), 0, 9}}, {{0, {v2(1, 0), 3}}});
    CHECK(u.weight(0)[0] == doctest::Approx(0.6));
    CHECK(u.weight(0)[1] == doctest::Approx(0.8));
}

TEST_CASE("orthogonal prototypes score perfectly") {
    std::vector<LabeledFeature> base;
    for (int c = 0; c < 3; ++c) base.push_back({unit(4, c), c, 0});
    auto w = init_base_weights(base);
    w = init_novel_weights(w, std::vector<LabeledFeature>{{unit(4, 3), 3, 9}});
    std::vector<LabeledFeature> test;
    for (int c = 0; c < 4; ++c) test.push_back({unit(4, c), c, 0});
    const auto e = evaluate(test, w);
    CHECK(e.acc_all == 100.0);
    CHECK(e.acc_base == 100.0);
    CHECK(e.acc_novel == 100.0);
}

TEST_CASE("session 0 has no novel accuracy") {
    std::vector<LabeledFeature> base;
    for (int c = 0; c < 3; ++c) base.push_back({unit(3, c), c, 0});
    const auto e = evaluate(base, init_base_weights(base));
    CHECK(e.acc_base.has_value());
    CHECK_FALSE(e.acc_novel.has_value());
}

TEST_CASE("mixed evaluation counted by hand") {
    std::vector<LabeledFeature> base{{unit(4, 0), 0, 0}, {unit(4, 1), 1, 1}};
    auto w = init_base_weights(base);
    w = init_novel_weights(w, std::vector<LabeledFeature>{{unit(4, 2), 2, 2}});
    const std::vector<LabeledFeature> test{
        {unit(4, 0), 0, 10}, {unit(4, 1), 1, 11}, {unit(4, 0), 0, 12}, {unit(4, 2), 1, 13},  // 3/4 base
        {unit(4, 2), 2, 14}, {unit(4, 0), 2, 15},                                            // 1/2 novel
    };
    const auto e = evaluate(test, w);
    CHECK(e.correct_all == 4);
    CHECK(e.n_all == 6);
    CHECK(e.acc_all == doctest::Approx(400.0 / 6.0));
    CHECK(*e.acc_base == doctest::Approx(75.0));
    CHECK(*e.acc_novel == doctest::Approx(50.0));
    CHECK_THROWS_AS(evaluate({}, w), DataError);
}
