#include <doctest.h>

#include <cmath>
#include <random>

#include "aldc/alt.hpp"
#include "oracles.hpp"

using namespace aldc;
using namespace aldc::alt;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

classifier::ClassifierWeights two_blocks(const std::vector<Vector>& base, const std::vector<Vector>& novel) {
    std::vector<LabeledFeature> b, n;
    for (std::size_t i = 0; i < base.size(); ++i) b.push_back({base[i], static_cast<ClassId>(i), i});
    for (std::size_t i = 0; i < novel.size(); ++i) {
        n.push_back({novel[i], static_cast<ClassId>(base.size() + i), 1000 + i});
    }
    return classifier::init_novel_weights(classifier::init_base_weights(b), n);
}

SampleScore score(double b, double n) { return {b, 0, n, 1}; }

}  // namespace

TEST_CASE("self-match against the base block") {
    const auto w = two_blocks({vec({1, 0, 0}), vec({0, 1, 0})}, {vec({0, 0, 1})});
    const auto s = score_unlabeled(std::vector<Vector>{vec({0, 1, 0})}, w);
    REQUIRE(s.size() == 1);
    CHECK(s[0].s_base == doctest::Approx(1.0));
    CHECK(s[0].base_arg == 1);
    CHECK(s[0].s_novel == doctest::Approx(0.0));
    CHECK(s[0].novel_arg == 2);
    CHECK(s[0].gap() == doctest::Approx(1.0));
}

TEST_CASE("hand cosine example") {
    const auto w = two_blocks({vec({1, 0})}, {vec({std::sqrt(0.5), std::sqrt(0.5)})});
    const auto s = score_unlabeled(std::vector<Vector>{vec({1, 0})}, w);
    CHECK(s[0].s_base == doctest::Approx(1.0));
    CHECK(s[0].s_novel == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(s[0].gap() == doctest::Approx(0.29289).epsilon(1e-5));
}

TEST_CASE("equidistant feature has zero gap") {
    const auto w = two_blocks({vec({1, 0})}, {vec({0, 1})});
    const auto s = score_unlabeled(std::vector<Vector>{vec({2, 2})}, w);
    CHECK(s[0].gap() == doctest::Approx(0.0));
    const auto p = partition(s, fixed_threshold(-1.0));
    REQUIRE(p.confident.size() == 1);
    CHECK(p.confident[0].pseudo_label == 0);
}

TEST_CASE("scoring matches brute-force block maxima") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    auto rnd = [&](int d) {
        Vector v(d);
        for (int j = 0; j < d; ++j) v[j] = g(rng);
        return v;
    };
    std::vector<Vector> base, novel;
    for (int i = 0; i < 6; ++i) base.push_back(rnd(5));
    for (int i = 0; i < 3; ++i) novel.push_back(rnd(5));
    const auto w = two_blocks(base, novel);
    std::vector<std::pair<ClassId, oracle::Vec>> bc, nc;
    for (ClassId c : w.base_ids().class_ids) bc.emplace_back(c, oracle::to_vec(w.weight(c)));
    for (ClassId c : w.novel_ids()) nc.emplace_back(c, oracle::to_vec(w.weight(c)));
    std::vector<Vector> pool;
    for (int i = 0; i < 300; ++i) pool.push_back(rnd(5));
    const auto s = score_unlabeled(pool, w);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto x = oracle::to_vec(pool[i]);
        const auto b = oracle::best_match(x, bc);
        const auto n = oracle::best_match(x, nc);
        CHECK(s[i].base_arg == b.id);
        CHECK(s[i].novel_arg == n.id);
        CHECK(std::abs(s[i].s_base - b.score) < 1e-12);
        CHECK(std::abs(s[i].s_novel - n.score) < 1e-12);
    }
}

TEST_CASE("scoring needs both blocks") {
    const auto w = classifier::init_base_weights(std::vector<LabeledFeature>{{vec({1, 0}), 0, 0}});
    CHECK_THROWS_AS(score_unlabeled(std::vector<Vector>{vec({1, 0})}, w), DataError);
}

TEST_CASE("threshold examples") {
    CHECK(compute_threshold(std::vector{score(0.3, 0.3), score(0.9, 0.9)}, 0.5).tau == doctest::Approx(0.5));
    const auto t = compute_threshold(std::vector{score(0.9, 0.3), score(0.1, 0.3)}, 0.2);
    CHECK(t.tau == doctest::Approx(0.6));
    CHECK(t.n_scored == 2);
    CHECK(t.smoothing == 0.2);
    CHECK(compute_threshold(std::vector{score(0.8, 0.35)}, 0.0).tau == doctest::Approx(0.45));
    CHECK_THROWS_AS(compute_threshold({}, 0.2), DataError);
}

TEST_CASE("threshold matches the oracle") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SampleScore> s;
        std::vector<std::pair<double, double>> raw;
        for (int i = 0; i < 1 + trial % 50; ++i) {
            const double b = u(rng), n = u(rng);
            s.push_back(score(b, n));
            raw.emplace_back(b, n);
        }
        const double m = (trial % 11) / 10.0;
        CHECK(std::abs(compute_threshold(s, m).tau - oracle::threshold(raw, m)) <= 1e-10);
    }
}

TEST_CASE("partition examples") {
    const auto p = partition(std::vector<SampleScore>{{0.9, 4, 0.2, 21}}, fixed_threshold(0.6));
    REQUIRE(p.confident.size() == 1);
    CHECK(p.confident[0].pseudo_label == 4);
    const auto q = partition(std::vector<SampleScore>{{0.1, 4, 0.95, 21}}, fixed_threshold(0.6));
    REQUIRE(q.confident.size() == 1);
    CHECK(q.confident[0].pseudo_label == 21);

    const std::vector<SampleScore> all{{1.0, 0, -1.0, 5}, {0.5, 1, 0.4, 6}, {-0.2, 2, 0.3, 7}};
    const auto none = partition(all, fixed_threshold(2.5));
    CHECK(none.confident.empty());
    CHECK(none.ambiguous.size() == 3);
    CHECK(none.ambiguous[1].base_arg == 1);
    CHECK(none.ambiguous[1].novel_arg == 6);
    CHECK(partition(all, fixed_threshold(0.0)).confident.size() == 3);
}

TEST_CASE("gap equal to tau is ambiguous") {
    const auto p = partition(std::vector{score(0.75, 0.25)}, fixed_threshold(0.5));
    CHECK(p.confident.empty());
    CHECK(p.ambiguous.size() == 1);
}

TEST_CASE("non-finite threshold is rejected") {
    CHECK_THROWS(partition(std::vector{score(0.5, 0.1)}, fixed_threshold(std::nan(""))));
}
