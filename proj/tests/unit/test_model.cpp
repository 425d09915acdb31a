#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "bmdp/generator.hpp"
#include "bmdp/model.hpp"
#include "bmdp/random.hpp"
#include "bmdp/suite.hpp"

using namespace bmdp;

namespace {

constexpr TypeId T{0};
constexpr TypeId S{1};
constexpr TypeId H{2};

Config random_config(Rng& rng, std::size_t n_types) {
    const std::size_t len = rng.uniform_index(6);
    std::vector<TypeId> out;
    for (std::size_t i = 0; i < len; ++i) out.push_back(TypeId{rng.uniform_index(n_types)});
    return Config(std::move(out));
}

}  // namespace

TEST(Validate, Cloud1IsValid) { EXPECT_TRUE(validate(cloud1()).empty()); }

TEST(Validate, ProbabilitySumReported) {
    Bmdp m = cloud1();
    m.types[1].actions[1].outcomes = {{0.4, {S}}, {0.5, {}}};
    const auto v = validate(m);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].message, "probabilities sum to 0.9");
    EXPECT_EQ(v[0].type, 1u);
    EXPECT_EQ(v[0].action, 1u);
}

TEST(Validate, ZeroCostReported) {
    Bmdp m = cloud1();
    m.types[0].actions[1].cost = 0.0;
    const auto v = validate(m);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].message, "cost must be strictly positive");
    EXPECT_EQ(describe(v[0], m), "type T, action a2: cost must be strictly positive");
}

TEST(Validate, StructuralProblems) {
    Bmdp m;
    EXPECT_FALSE(validate(m).empty());

    m = cloud1();
    m.types[1].actions.clear();
    EXPECT_EQ(validate(m).size(), 1u);

    m = cloud1();
    m.init = Config{TypeId{7}};
    EXPECT_EQ(validate(m).size(), 1u);

    m = cloud1();
    m.types[0].actions[0].outcomes[0].offspring = Config{TypeId{5}};
    EXPECT_EQ(validate(m).size(), 1u);

    m = cloud1();
    m.types[1].name = "T";
    EXPECT_EQ(validate(m).size(), 1u);

    m = cloud1();
    m.types[1].actions[1].outcomes = {{0.5, {S}}, {0.5, {S}}};
    EXPECT_EQ(validate(m).size(), 1u);

    m = cloud1();
    m.types[1].actions[1].outcomes = {{1.5, {S}}, {-0.5, {}}};
    EXPECT_EQ(validate(m).size(), 2u);
}

TEST(Normalize, AbsorbsResidualIdempotently) {
    Bmdp m = cloud1();
    m.types[1].actions[1].outcomes = {{0.4, {S}}, {0.6 - 4e-10, {}}};
    ASSERT_TRUE(validate(m).empty());
    normalize_probabilities(m);
    const auto& o = m.types[1].actions[1].outcomes;
    EXPECT_EQ(o[0].probability + o[1].probability, 1.0);
    const Bmdp once = m;
    normalize_probabilities(m);
    EXPECT_EQ(m, once);
}

TEST(Config, ConcatExamples) {
    EXPECT_EQ(config_concat(Config{T}, Config{S, S}), (Config{T, S, S}));
    EXPECT_EQ(config_concat(Config{}, Config{H}), Config{H});
    EXPECT_EQ(config_concat(Config{S}, Config{}), Config{S});
}

TEST(Config, ConcatIsAssociativeWithIdentity) {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const Config a = random_config(rng, 4), b = random_config(rng, 4), c = random_config(rng, 4);
        EXPECT_EQ(config_concat(config_concat(a, b), c), config_concat(a, config_concat(b, c)));
        EXPECT_EQ(config_concat(a, Config{}), a);
        EXPECT_EQ(config_concat(Config{}, a), a);
        EXPECT_EQ(config_concat(a, b).size(), a.size() + b.size());
    }
}

TEST(QTable, LayoutFollowsModel) {
    const Bmdp m = cloud2();
    QTable q(m, 3.0);
    EXPECT_EQ(q.type_count(), 3u);
    EXPECT_EQ(q.size(), m.pair_count());
    EXPECT_EQ(q.action_count(H), 1u);
    for (std::size_t k = 0; k < q.size(); ++k) {
        const auto [type, action] = q.pair_at(k);
        EXPECT_EQ(q.flat_index(type, action), k);
    }
    q(S, ActionId{1}) = 1.0;
    EXPECT_EQ(q.min_value(S), 1.0);
    EXPECT_EQ(q.argmin(S), ActionId{1});
    EXPECT_EQ(q.argmin(T), ActionId{0});
    EXPECT_EQ(q.greedy_values(), (ValueVector{3.0, 1.0, 3.0}));
}

TEST(QTable, BroadcastFillsEveryAction) {
    const Bmdp m = cloud1();
    const QTable q = broadcast(m, {5.8, 1.6});
    EXPECT_EQ(q(T, ActionId{1}), 5.8);
    EXPECT_EQ(q(S, ActionId{0}), 1.6);
    EXPECT_EQ(q(S, ActionId{1}), 1.6);
}

TEST(Strategy, ValidityAndRestriction) {
    const Bmdp m = cloud1();
    EXPECT_TRUE(is_valid_strategy(m, {ActionId{0}, ActionId{1}}));
    EXPECT_FALSE(is_valid_strategy(m, {ActionId{0}}));
    EXPECT_FALSE(is_valid_strategy(m, {ActionId{0}, ActionId{2}}));
    const Bmdp chain = restrict_to_strategy(m, {ActionId{1}, ActionId{1}});
    EXPECT_TRUE(chain.is_chain());
    EXPECT_FALSE(m.is_chain());
    EXPECT_EQ(chain.types[0].actions[0].cost, 8.0);
    EXPECT_EQ(chain.types[1].actions[0].name, "a2");
    EXPECT_TRUE(validate(chain).empty());
}

TEST(Values, Validity) {
    EXPECT_TRUE(is_valid_values(std::vector<double>{0.0, 1.0, std::numeric_limits<double>::infinity()}));
    EXPECT_FALSE(is_valid_values(std::vector<double>{-1.0}));
    EXPECT_FALSE(is_valid_values(std::vector<double>{std::nan("")}));
}

TEST(Lookup, FindByName) {
    const Bmdp m = cloud2();
    EXPECT_EQ(m.find_type("H"), H);
    EXPECT_FALSE(m.find_type("X").has_value());
    EXPECT_EQ(m.find_action(H, "run"), ActionId{0});
    EXPECT_FALSE(m.find_action(T, "run").has_value());
}

TEST(Generated, ModelsValidate) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        GenParams p;
        p.seed = seed;
        p.hierarchical = seed % 2 == 1;
        EXPECT_TRUE(validate(gen_random_bmdp(p)).empty()) << "seed " << seed;
    }
}
