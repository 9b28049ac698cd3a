#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cpir/entropy.hpp"
#include "cpir/pir.hpp"

namespace cpir::counting {

/// Occurrence counts n_1..n_k of the k values of a domain.
using FrequencyVector = std::vector<std::size_t>;

/// Per cause value i, the counts n^i_j of the effect values.
using ConditionalFrequencyTable = std::vector<FrequencyVector>;

inline std::size_t total(const FrequencyVector& freq) {
    std::size_t n = 0;
    for (std::size_t c : freq) n += c;
    return n;
}

inline void validate(const FrequencyVector& freq) {
    if (freq.empty()) throw DomainError("frequency vector has no categories");
    if (total(freq) == 0) throw DomainError("frequency vector has total count 0");
}

/// n! / (n_1! ... n_k!), the number of n-tuples with these frequencies.
inline BigInt count_realizations(const FrequencyVector& freq) {
    validate(freq);
    BigInt out = 1;
    std::size_t running = 0;
    for (std::size_t c : freq) {
        running += c;
        out *= binomial(static_cast<unsigned>(running), static_cast<unsigned>(c));
    }
    return out;
}

/// Entropy of the relative frequencies, in nats.
inline double empirical_entropy(const FrequencyVector& freq) {
    const double n = static_cast<double>(total(freq));
    double h = 0.0;
    for (std::size_t c : freq)
        if (c > 0) h -= (c / n) * std::log(c / n);
    return h;
}

/// |(1/n) log #(n_1..n_k) - H(n_j / n)|.
inline double log_count_entropy_gap(const FrequencyVector& freq) {
    const double n = static_cast<double>(total(freq));
    return std::abs(log_big(count_realizations(freq)) / n - empirical_entropy(freq));
}

/// Sanity envelope C k log(n) / n with C = 2, checked rather than assumed.
inline double gap_envelope(const FrequencyVector& freq, double constant = 2.0) {
    validate(freq);
    const double n = static_cast<double>(total(freq));
    if (n < 2) return 0.0;
    return constant * static_cast<double>(freq.size()) * std::log(n) / n;
}

inline void validate(const FrequencyVector& cause, const ConditionalFrequencyTable& table) {
    validate(cause);
    if (table.size() != cause.size()) throw DomainError("conditional table needs one row per cause value");
    const std::size_t width = table.empty() ? 0 : table.front().size();
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].size() != width) throw DomainError("conditional table rows differ in length");
        if (total(table[i]) != cause[i])
            throw DomainError("row " + std::to_string(i) + " sums to " + std::to_string(total(table[i])) +
                              " but the cause count is " + std::to_string(cause[i]));
    }
}

/// prod_i n_i! / (n^i_1! ... n^i_l!): effect tuples compatible with a fixed
/// cause tuple and the given joint counts.
inline BigInt conditional_count(const FrequencyVector& cause, const ConditionalFrequencyTable& table) {
    validate(cause, table);
    BigInt out = 1;
    for (const auto& row : table)
        if (total(row) > 0) out *= count_realizations(row);
    return out;
}

/// Conditional entropy of the empirical table, in nats.
inline double empirical_conditional_entropy(const FrequencyVector& cause, const ConditionalFrequencyTable& table) {
    validate(cause, table);
    const double n = static_cast<double>(total(cause));
    double h = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i)
        if (cause[i] > 0) h += (cause[i] / n) * empirical_entropy(table[i]);
    return h;
}

/// |(1/n) log conditional_count - H_emp(effect | cause)|.
inline double log_conditional_count_gap(const FrequencyVector& cause, const ConditionalFrequencyTable& table) {
    const double n = static_cast<double>(total(cause));
    return std::abs(log_big(conditional_count(cause, table)) / n - empirical_conditional_entropy(cause, table));
}

inline constexpr std::size_t kCensusCap = 10'000'000;

struct CensusRecord {
    std::size_t n = 0;
    Rational delta = 0;
    std::string measure;    // causal or uniform
    std::string reference;  // causal or symmetric
    Rational mass = 0;
};

struct Census {
    std::size_t n = 0;
    std::size_t type_classes = 0;
    ExactTable causal_joint;         // Causal PIR joint, also the causal MaxEnt joint here
    ExactTable symmetric_joint;      // uniform over S
    ExactTable expected_causal;      // expected empirical joint under the causal measure
    ExactTable expected_uniform;     // expected empirical joint under the uniform measure
    std::vector<CensusRecord> records;

    Rational mass(const std::string& measure, const std::string& reference, const Rational& delta) const {
        for (const auto& r : records)
            if (r.measure == measure && r.reference == reference && r.delta == delta) return r.mass;
        throw DomainError("no census record for " + measure + "/" + reference);
    }
};

inline std::vector<Rational> default_deltas() { return {Rational(1, 10), Rational(1, 5), Rational(2, 5)}; }

namespace detail {

// Calls visit(counts) for every composition of n into k parts.
template <class Visit>
void compositions(std::size_t n, std::size_t k, std::vector<std::size_t>& counts, std::size_t part, Visit& visit) {
    if (part + 1 == k) {
        counts[part] = n;
        visit(counts);
        return;
    }
    for (std::size_t c = 0; c <= n; ++c) {
        counts[part] = c;
        compositions(n - c, k, counts, part + 1, visit);
    }
}

}  // namespace detail

/// Exhaustive census of empirical joints of n i.i.d. draws over the members
/// of S. The causal measure draws each pair from the Causal PIR joint (a
/// uniform cause in S_X, then a uniform option); the uniform measure draws
/// uniformly from S. Both are exchangeable, so the census runs over type
/// classes (counts per member of S) weighted by their exact probabilities.
inline Census concentration_census(const Relation& s, const std::vector<std::string>& causes, std::size_t n,
                                   const std::vector<Rational>& deltas = default_deltas(),
                                   std::size_t cap = kCensusCap) {
    if (n == 0) throw DomainError("census needs n >= 1");
    Census out;
    out.n = n;
    out.causal_joint = pir::causal_pir_joint(s, causes);
    out.symmetric_joint = pir::symmetric_pir_joint(s);
    const auto& members = s.members();
    const std::size_t k = members.size();
    const BigInt classes = binomial(static_cast<unsigned>(n + k - 1), static_cast<unsigned>(k - 1));
    if (classes > BigInt(cap))
        throw SizeError("census over " + classes.str() + " type classes exceeds the cap of " + std::to_string(cap));
    out.type_classes = classes.convert_to<std::size_t>();

    struct Measure {
        std::string name;
        std::vector<Rational> p;  // per member
        std::vector<Rational> expected;
    };
    std::vector<Measure> measures = {{"causal", {}, {}}, {"uniform", {}, {}}};
    for (std::size_t m : members) {
        measures[0].p.push_back(out.causal_joint[m]);
        measures[1].p.push_back(out.symmetric_joint[m]);
    }
    struct Reference {
        std::string name;
        std::vector<Rational> q;
    };
    std::vector<Reference> refs = {{"causal", measures[0].p}, {"symmetric", measures[1].p}};
    // mass[measure][reference][delta]
    std::vector<std::vector<std::vector<Rational>>> mass(
        2, std::vector<std::vector<Rational>>(2, std::vector<Rational>(deltas.size(), Rational(0))));
    for (auto& me : measures) me.expected.assign(k, Rational(0));

    const Rational inv_n(1, n);
    std::vector<std::size_t> counts(k, 0);
    auto visit = [&](const std::vector<std::size_t>& c) {
        const BigInt ways = count_realizations(c);
        std::vector<Rational> weight(2, Rational(ways));
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t i = 0; i < k; ++i)
                if (c[i] > 0) weight[a] *= power(measures[a].p[i], static_cast<unsigned>(c[i]));
        std::vector<Rational> dist(2, Rational(0));
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t i = 0; i < k; ++i) dist[r] += abs(Rational(c[i]) * inv_n - refs[r].q[i]);
        for (std::size_t a = 0; a < 2; ++a) {
            if (weight[a] == 0) continue;
            for (std::size_t i = 0; i < k; ++i)
                if (c[i] > 0) measures[a].expected[i] += weight[a] * Rational(c[i]) * inv_n;
            for (std::size_t r = 0; r < 2; ++r)
                for (std::size_t d = 0; d < deltas.size(); ++d)
                    if (dist[r] <= deltas[d]) mass[a][r][d] += weight[a];
        }
    };
    detail::compositions(n, k, counts, 0, visit);

    auto expand = [&](const std::vector<Rational>& per_member) {
        std::vector<Rational> w(s.domain().size(), Rational(0));
        for (std::size_t i = 0; i < k; ++i) w[members[i]] = per_member[i];
        return ExactTable(s.domain(), std::move(w));
    };
    out.expected_causal = expand(measures[0].expected);
    out.expected_uniform = expand(measures[1].expected);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t d = 0; d < deltas.size(); ++d)
                out.records.push_back({n, deltas[d], measures[a].name, refs[r].name, mass[a][r][d]});
    return out;
}

}  // namespace cpir::counting
