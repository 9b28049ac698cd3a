#include <gtest/gtest.h>

#include <cmath>

#include "cpir/counting.hpp"
#include "support/oracles.hpp"

using namespace cpir;
using namespace cpir::counting;

namespace {

oracle::BoolMatrix device_matrix() {
    oracle::BoolMatrix m(3, std::vector<bool>(3, false));
    m[0][1] = m[0][2] = m[1][0] = m[2][0] = true;
    return m;
}

std::vector<oracle::Frac> cells(const ExactTable& t) { return {t.weights().begin(), t.weights().end()}; }

void sum_over_compositions(std::size_t n, std::size_t k, FrequencyVector& f, std::size_t part, BigInt& acc) {
    if (part + 1 == k) {
        f[part] = n;
        acc += count_realizations(f);
        return;
    }
    for (std::size_t c = 0; c <= n; ++c) {
        f[part] = c;
        sum_over_compositions(n - c, k, f, part + 1, acc);
    }
}

}  // namespace

TEST(Counting, MultinomialCounts) {
    EXPECT_EQ(count_realizations({2, 1, 1}), BigInt(12));
    EXPECT_EQ(count_realizations({7, 0, 0}), BigInt(1));
    EXPECT_EQ(count_realizations({50, 50}), BigInt("100891344545564193334812497256"));
    EXPECT_THROW(count_realizations({}), DomainError);
    EXPECT_THROW(count_realizations({0, 0}), DomainError);
}

TEST(Counting, CountsSumToAllSequences) {
    for (std::size_t k = 1; k <= 4; ++k)
        for (std::size_t n = 1; n <= 12; ++n) {
            FrequencyVector f(k, 0);
            BigInt acc = 0;
            sum_over_compositions(n, k, f, 0, acc);
            BigInt expected = 1;
            for (std::size_t i = 0; i < n; ++i) expected *= k;
            EXPECT_EQ(acc, expected) << "k=" << k << " n=" << n;
        }
}

TEST(Counting, EntropyGapFrozenValues) {
    EXPECT_NEAR(log_count_entropy_gap({50, 50}), 0.025308764039771049, 1e-12);
    EXPECT_NEAR(gap_envelope({50, 50}), 0.18420680743952367, 1e-15);
    EXPECT_NEAR(log_count_entropy_gap({10, 10}), 0.08680761482982247, 1e-12);
    EXPECT_NEAR(log_count_entropy_gap({200, 200}), 0.008055371563868707, 1e-12);
    EXPECT_DOUBLE_EQ(log_count_entropy_gap({9, 0}), 0.0);
}

TEST(Counting, EntropyGapShrinksAndStaysUnderEnvelope) {
    double prev = INFINITY;
    for (std::size_t t : {1, 2, 5, 10, 20, 50}) {
        const FrequencyVector f{10 * t, 10 * t};
        const double g = log_count_entropy_gap(f);
        EXPECT_LT(g, prev);
        EXPECT_LE(g, gap_envelope(f));
        prev = g;
    }
    for (std::size_t n : {30, 60, 120, 240}) {
        const FrequencyVector f{n / 6, n / 3, n / 2};
        EXPECT_LE(log_count_entropy_gap(f), gap_envelope(f));
    }
}

TEST(Counting, ConditionalCounts) {
    EXPECT_EQ(conditional_count({2, 2}, {{1, 1}, {1, 1}}), BigInt(4));
    EXPECT_EQ(conditional_count({4, 4}, {{2, 2}, {2, 2}}), BigInt(36));
    EXPECT_THROW(conditional_count({2, 2}, {{1, 1}, {2, 1}}), DomainError);
    EXPECT_THROW(conditional_count({2, 2}, {{1, 1}, {2}}), DomainError);
    EXPECT_THROW(conditional_count({2, 2}, {{2}}), DomainError);
}

TEST(Counting, SingleRowReducesToPlainCount) {
    for (const FrequencyVector f : {FrequencyVector{3, 1, 4}, FrequencyVector{5, 5}, FrequencyVector{1, 0, 2, 6}}) {
        const FrequencyVector cause{total(f)};
        EXPECT_EQ(conditional_count(cause, {f}), count_realizations(f));
        EXPECT_NEAR(empirical_conditional_entropy(cause, {f}), empirical_entropy(f), 1e-15);
        EXPECT_NEAR(log_conditional_count_gap(cause, {f}), log_count_entropy_gap(f), 1e-15);
    }
}

TEST(Census, DeviceMassesAgainstRawEnumeration) {
    const Relation s = pir::device_relation();
    for (std::size_t n : {1, 2, 3, 4, 5, 6}) {
        const Census c = concentration_census(s, {"X"}, n);
        const auto causal = cells(c.causal_joint);
        const auto symmetric = cells(c.symmetric_joint);
        for (const auto& delta : default_deltas()) {
            const auto near_causal = oracle::raw_causal_census(device_matrix(), n, causal, delta);
            const auto near_symmetric = oracle::raw_causal_census(device_matrix(), n, symmetric, delta);
            EXPECT_EQ(c.mass("causal", "causal", delta), near_causal.mass) << n;
            EXPECT_EQ(c.mass("causal", "symmetric", delta), near_symmetric.mass) << n;
            EXPECT_EQ(c.mass("uniform", "causal", delta), oracle::raw_census_mass(symmetric, causal, n, delta)) << n;
            EXPECT_EQ(c.mass("uniform", "symmetric", delta), oracle::raw_census_mass(symmetric, symmetric, n, delta))
                << n;
            EXPECT_EQ(cells(c.expected_causal), near_causal.expected);
        }
    }
}

TEST(Census, FrozenDeviceMasses) {
    const Relation s = pir::device_relation();
    const Rational delta(2, 5);
    const Census c4 = concentration_census(s, {"X"}, 4);
    EXPECT_EQ(c4.mass("causal", "causal", delta), Rational(2, 27));
    EXPECT_EQ(c4.mass("uniform", "symmetric", delta), Rational(3, 32));
    const Census c8 = concentration_census(s, {"X"}, 8);
    EXPECT_EQ(c8.mass("causal", "causal", delta), Rational(3955, 13122));
    EXPECT_EQ(c8.mass("causal", "symmetric", delta), Rational(1085, 4374));
    EXPECT_EQ(c8.mass("uniform", "causal", delta), Rational(1645, 8192));
    EXPECT_EQ(c8.mass("uniform", "symmetric", delta), Rational(2835, 8192));
    EXPECT_EQ(concentration_census(s, {"X"}, 12).mass("causal", "causal", delta), Rational(439901, 708588));
}

TEST(Census, ExpectationIdentity) {
    const Relation s = pir::device_relation();
    for (std::size_t n : {1, 3, 7, 10}) {
        const Census c = concentration_census(s, {"X"}, n);
        EXPECT_EQ(c.expected_causal, c.causal_joint);
        EXPECT_EQ(c.expected_uniform, c.symmetric_joint);
    }
}

TEST(Census, CausalConcentrationGrowsWithN) {
    const Relation s = pir::device_relation();
    const Rational delta(2, 5);
    Rational prev = -1;
    for (std::size_t n : {1, 4, 8, 12}) {
        const Rational m = concentration_census(s, {"X"}, n).mass("causal", "causal", delta);
        EXPECT_GE(m, prev) << n;
        prev = m;
    }
}

TEST(Census, SizeCap) {
    const Relation s = pir::device_relation();
    EXPECT_EQ(concentration_census(s, {"X"}, 6).type_classes, 84u);
    EXPECT_THROW(concentration_census(s, {"X"}, 6, default_deltas(), 83), SizeError);
    EXPECT_NO_THROW(concentration_census(s, {"X"}, 6, default_deltas(), 84));
    EXPECT_THROW(concentration_census(s, {"X"}, 0), DomainError);
}
