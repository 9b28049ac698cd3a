#include <gtest/gtest.h>

#include <random>

#include "cpir/cpir.hpp"

using namespace cpir;

namespace {

FiniteDomain xy() { return FiniteDomain({{"X", {"1", "2", "3"}}, {"Y", {"a", "b"}}}); }

}  // namespace

TEST(Domain, MixedRadixLastVariableFastest) {
    const FiniteDomain d = xy();
    EXPECT_EQ(d.size(), 6u);
    EXPECT_EQ(d.encode(Point{1, 0}), 2u);
    EXPECT_EQ(d.decode(5), (Point{2, 1}));
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d.encode(d.decode(i)), i);
    EXPECT_EQ(d.labels(3), (std::vector<std::string>{"2", "b"}));
}

TEST(Domain, RejectsDuplicatesAndEmptyVariables) {
    EXPECT_THROW(FiniteDomain({{"X", {"1"}}, {"X", {"2"}}}), DomainError);
    EXPECT_THROW(FiniteDomain({Variable{"X", {}}}), DomainError);
    EXPECT_THROW(FiniteDomain({{"X", {"1", "1"}}}), DomainError);
    EXPECT_THROW(xy().index_of("Z"), DomainError);
}

TEST(Domain, NumericLabels) {
    FiniteDomain d({{"X", {"-1.5", "+2", "two"}}});
    EXPECT_DOUBLE_EQ(*d.numeric_value(0, 0), -1.5);
    EXPECT_DOUBLE_EQ(*d.numeric_value(0, 1), 2.0);
    EXPECT_FALSE(d.numeric_value(0, 2).has_value());
}

TEST(Relation, MembershipAndReorder) {
    const Relation s = Relation::from_labels(xy(), {{"1", "a"}, {"3", "b"}});
    EXPECT_EQ(s.size(), 2u);
    EXPECT_TRUE(s.contains(Point{0, 0}));
    EXPECT_FALSE(s.contains(Point{0, 1}));
    const Relation t = s.reordered({"Y", "X"});
    EXPECT_TRUE(t.contains(Point{1, 2}));
    EXPECT_EQ(t.reordered({"X", "Y"}), s);
    EXPECT_THROW(s.reordered({"X"}), DomainError);
}

TEST(Table, ExactMassMustBeOne) {
    EXPECT_THROW(ExactTable(xy(), std::vector<Rational>(6, Rational(1, 5))), DomainError);
    EXPECT_THROW(ExactTable(xy(), {Rational(-1), 2, 0, 0, 0, 0}), DomainError);
    EXPECT_NO_THROW(ExactTable::uniform(xy()));
}

TEST(Table, MarginalizeAndCondition) {
    const ExactTable t(xy(), {Rational(1, 6), Rational(1, 6), Rational(1, 3), 0, Rational(1, 6), Rational(1, 6)});
    const ExactTable px = marginalize(t, {"X"});
    EXPECT_EQ(px[0], Rational(1, 3));
    EXPECT_EQ(px[1], Rational(1, 3));
    const auto c = condition(t, {"X"}, {"Y"});
    EXPECT_EQ(c(1, 0), Rational(1));
    EXPECT_EQ(c(0, 1), Rational(1, 2));
    const ExactTable r = reordered(t, {"Y", "X"});
    EXPECT_EQ(r.at(Point{0, 1}), Rational(1, 3));
}

TEST(Entropy, ExactMatchesFloating) {
    const ExactTable t(xy(), {Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 8), 0, 0});
    EXPECT_NEAR(entropy(t).value(), entropy(to_floating(t)), 1e-14);
    EXPECT_NEAR(bits(entropy(to_floating(t))), 1.75, 1e-14);
    EXPECT_TRUE(entropy(t) == LogCombination::log_of(2) * Rational(7, 4));
}

TEST(Entropy, ChainRuleExact) {
    const ExactTable t(xy(), {Rational(1, 6), Rational(1, 6), Rational(1, 3), 0, Rational(1, 6), Rational(1, 6)});
    EXPECT_TRUE(entropy(t) == entropy(marginalize(t, {"X"})) + conditional_entropy(t, {"X"}));
}

TEST(LogCombination, CoprimeRefinementDecidesEquality) {
    auto a = LogCombination::log_of(6);
    auto b = LogCombination::log_of(2) + LogCombination::log_of(3);
    EXPECT_TRUE(a == b);
    EXPECT_FALSE(LogCombination::log_of(4) == LogCombination::log_of(2));
    EXPECT_TRUE(LogCombination::log_of(4) == LogCombination::log_of(2) * Rational(2));
    EXPECT_TRUE((LogCombination::log_of(Rational(12, 18)) - LogCombination::log_of(Rational(2, 3))).is_zero());
}

TEST(Constraint, ValidationAndEvaluation) {
    EXPECT_THROW(LinearConstraint("c", xy(), {1, 2}, 0), DomainError);
    EXPECT_THROW(LinearConstraint("c", xy(), std::vector<double>(6, 1.0), 0, -1), DomainError);
    const auto c = LinearConstraint::from_function("mean", xy(), [](const Point& p) { return double(p[0] + 1); }, 2.0);
    EXPECT_DOUBLE_EQ(c.expectation(ProbTable::uniform(xy())), 2.0);
    EXPECT_TRUE(c.satisfied_by(ProbTable::uniform(xy())));
    const Relation s = Relation::from_labels(xy(), {{"1", "a"}});
    EXPECT_THROW(relation_to_constraint(Relation(xy(), {})), ValidationError);
    EXPECT_EQ(mass_outside(ExactTable::uniform(xy()), s), Rational(5, 6));
}

TEST(Numeric, FactorialBinomialAndRationals) {
    EXPECT_EQ(binomial(100, 50), BigInt("100891344545564193334812497256"));
    EXPECT_EQ(factorial(20), BigInt("2432902008176640000"));
    EXPECT_EQ(parse_rational("6/8"), Rational(3, 4));
    EXPECT_EQ(to_fraction_string(Rational(3, 4)), "3/4");
    EXPECT_EQ(to_fraction_string(Rational(2)), "2");
    EXPECT_THROW(parse_rational("1/0"), DomainError);
    EXPECT_THROW(parse_rational("x"), DomainError);
    EXPECT_NEAR(log_big(binomial(1000, 500)), std::lgamma(1001) - 2 * std::lgamma(501), 1e-9);
}

TEST(Serialize, ExactTableRoundTrip) {
    const ExactTable t(xy(), {Rational(1, 6), Rational(1, 6), Rational(1, 3), 0, Rational(1, 6), Rational(1, 6)});
    const auto j = json::to_json(t);
    EXPECT_EQ(j.at("entries")[0].at("p"), "1/6");
    EXPECT_EQ(json::table_from_json<Rational>(j), t);
    EXPECT_EQ(json::to_json(json::table_from_json<Rational>(j)).dump(), j.dump());
}

TEST(Serialize, FloatTableStableAtTwelveDigits) {
    const ProbTable t(FiniteDomain({{"X", {"0", "1", "2"}}}), {1.0 / 3, 1.0 / 3, 1.0 / 3});
    const auto j = json::to_json(t);
    EXPECT_NE(j.dump().find("0.333333333333"), std::string::npos);
    EXPECT_EQ(j.dump().find("0.3333333333333"), std::string::npos);
    const auto back = json::table_from_json<double>(j);
    EXPECT_EQ(json::to_json(back).dump(), j.dump());
}

TEST(Serialize, KeysSortedAndObjectsRoundTrip) {
    const Relation s = Relation::from_labels(xy(), {{"1", "a"}, {"3", "b"}});
    const auto j = json::to_json(s);
    EXPECT_LT(j.dump().find("\"domain\""), j.dump().find("\"members\""));
    EXPECT_EQ(json::relation_from_json(j), s);
    const auto c = LinearConstraint::from_function("m", xy(), [](const Point& p) { return double(p[1]); }, 0.5, 0.1);
    const auto cj = json::to_json(c);
    const auto c2 = json::constraint_from_json(cj);
    EXPECT_EQ(c2.f, c.f);
    EXPECT_EQ(c2.epsilon, c.epsilon);
    const Dag g({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}});
    const Dag g2 = json::dag_from_json(json::to_json(g));
    EXPECT_EQ(g2.nodes(), g.nodes());
    EXPECT_EQ(g2.edges(), g.edges());
}

TEST(Serialize, RejectsMalformed) {
    EXPECT_THROW(json::domain_from_json(json::Json::object()), DomainError);
    EXPECT_THROW(json::point_from_json(xy(), json::Json::array({"1"})), DomainError);
    EXPECT_THROW(json::point_from_json(xy(), json::Json::array({"9", "a"})), DomainError);
}

TEST(Property, RandomTablesMarginalsSumToOne) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> w(0, 9);
    for (int trial = 0; trial < 50; ++trial) {
        const FiniteDomain d({{"A", {"0", "1"}}, {"B", {"0", "1", "2"}}, {"C", {"0", "1"}}});
        std::vector<Rational> raw(d.size());
        Rational total = 0;
        for (auto& x : raw) total += x = w(rng) + 1;
        for (auto& x : raw) x /= total;
        const ExactTable t(d, raw);
        for (const auto& keep : std::vector<std::vector<std::string>>{{"A"}, {"B", "C"}, {"C", "A"}}) {
            const ExactTable m = marginalize(t, keep);
            Rational s = 0;
            for (const auto& v : m.weights()) s += v;
            EXPECT_EQ(s, 1);
        }
        EXPECT_GE(mutual_information(to_floating(t), {"A"}, {"B"}), -1e-12);
        EXPECT_TRUE(mutual_information(t, {"A"}, {"B", "C"}) ==
                    entropy(marginalize(t, {"A"})) + entropy(marginalize(t, {"B", "C"})) - entropy(t));
    }
}
