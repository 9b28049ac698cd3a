#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "cpir/entropy.hpp"
#include "cpir/relation.hpp"
#include "cpir/table.hpp"

namespace cpir::pir {

/// Which mechanism generated a bivariate relation: the first variable causing
/// the second, the reverse, or a symmetric (agnostic) assignment.
enum class Direction { cause_to_effect, effect_to_cause, symmetric };

/// Outcome of a likelihood comparison between the two causal directions.
enum class Verdict { x_to_y, y_to_x, tie };

inline std::string to_string(Direction d) {
    switch (d) {
        case Direction::cause_to_effect: return "X->Y";
        case Direction::effect_to_cause: return "Y->X";
        case Direction::symmetric: return "symmetric";
    }
    return "unknown";
}

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::x_to_y: return "X->Y";
        case Verdict::y_to_x: return "Y->X";
        case Verdict::tie: return "tie";
    }
    return "unknown";
}

/// Split of a relation's variables into causes and effects, with the flat
/// index maps between the full domain and the two subdomains.
struct CauseSplit {
    std::vector<std::size_t> cause_vars;
    std::vector<std::size_t> effect_vars;
    FiniteDomain causes;
    FiniteDomain effects;

    std::size_t cause_of(const FiniteDomain& domain, std::size_t flat) const { return domain.project(flat, cause_vars); }
    std::size_t effect_of(const FiniteDomain& domain, std::size_t flat) const {
        return domain.project(flat, effect_vars);
    }
};

inline CauseSplit split_causes(const FiniteDomain& domain, const std::vector<std::string>& causes) {
    if (causes.empty()) throw DomainError("at least one cause variable is required");
    CauseSplit out;
    out.cause_vars = domain.indices_of(causes);
    for (std::size_t v = 0; v < domain.rank(); ++v)
        if (std::find(out.cause_vars.begin(), out.cause_vars.end(), v) == out.cause_vars.end())
            out.effect_vars.push_back(v);
    if (out.effect_vars.empty()) throw DomainError("every variable is a cause; no effect remains");
    out.causes = domain.subdomain(std::span<const std::size_t>(out.cause_vars));
    out.effects = domain.subdomain(std::span<const std::size_t>(out.effect_vars));
    return out;
}

struct FunctionClassSummary {
    FiniteDomain causes;
    FiniteDomain effects;
    std::vector<std::size_t> cause_support;          // S_X as flat cause indices
    std::vector<std::vector<std::size_t>> options;   // opts(x) per flat cause index; empty off S_X
    BigInt count = 0;                                // |S_F|
};

inline void require_nonempty(const Relation& s) {
    if (s.empty()) throw ValidationError("relation is empty");
}

/// S_X: cause configurations that occur in some member of S.
inline std::vector<std::size_t> cause_support(const Relation& s, const std::vector<std::string>& causes) {
    require_nonempty(s);
    const CauseSplit split = split_causes(s.domain(), causes);
    std::vector<bool> seen(split.causes.size(), false);
    for (std::size_t m : s.members()) seen[split.cause_of(s.domain(), m)] = true;
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < seen.size(); ++x)
        if (seen[x]) out.push_back(x);
    return out;
}

inline std::vector<std::size_t> cause_support(const Relation& s, const std::string& cause) {
    return cause_support(s, std::vector<std::string>{cause});
}

/// Option sets and the closed-form size of the admissible function class
/// S_F = { f : (x, f(x)) in S for all x in S_X }.
inline FunctionClassSummary function_class(const Relation& s, const std::vector<std::string>& causes) {
    require_nonempty(s);
    const CauseSplit split = split_causes(s.domain(), causes);
    FunctionClassSummary out;
    out.causes = split.causes;
    out.effects = split.effects;
    out.options.assign(split.causes.size(), {});
    for (std::size_t m : s.members()) out.options[split.cause_of(s.domain(), m)].push_back(split.effect_of(s.domain(), m));
    out.count = 1;
    for (std::size_t x = 0; x < out.options.size(); ++x) {
        auto& opts = out.options[x];
        std::sort(opts.begin(), opts.end());
        if (opts.empty()) {
            out.count *= split.effects.size();
        } else {
            out.cause_support.push_back(x);
            out.count *= opts.size();
        }
    }
    return out;
}

inline FunctionClassSummary function_class(const Relation& s, const std::string& cause) {
    return function_class(s, std::vector<std::string>{cause});
}

/// Default cap on the number of functions enumerated by the brute-force path.
inline constexpr std::size_t kFunctionEnumerationCap = 1'000'000;

/// Result of enumerating every function from cause configurations to effect
/// configurations: how many lie in S_F, and for each (x, y) how many of those
/// map x to y.
struct FunctionEnumeration {
    BigInt admissible = 0;
    std::vector<std::vector<BigInt>> hits;  // [x][y]
};

inline FunctionEnumeration enumerate_function_class(const Relation& s, const std::vector<std::string>& causes,
                                                    std::size_t cap = kFunctionEnumerationCap) {
    require_nonempty(s);
    const CauseSplit split = split_causes(s.domain(), causes);
    const std::size_t nx = split.causes.size();
    const std::size_t ny = split.effects.size();
    BigInt total = 1;
    for (std::size_t i = 0; i < nx; ++i) total *= ny;
    if (total > BigInt(cap))
        throw SizeError("function space has " + total.str() + " elements, above the cap of " + std::to_string(cap));
    std::vector<std::vector<bool>> allowed(nx, std::vector<bool>(ny, false));
    std::vector<bool> in_support(nx, false);
    for (std::size_t m : s.members()) {
        const std::size_t x = split.cause_of(s.domain(), m);
        allowed[x][split.effect_of(s.domain(), m)] = true;
        in_support[x] = true;
    }
    FunctionEnumeration out;
    out.hits.assign(nx, std::vector<BigInt>(ny, 0));
    std::vector<std::size_t> f(nx, 0);
    const std::size_t n = total.convert_to<std::size_t>();
    for (std::size_t count = 0; count < n; ++count) {
        bool ok = true;
        for (std::size_t x = 0; x < nx && ok; ++x) ok = !in_support[x] || allowed[x][f[x]];
        if (ok) {
            ++out.admissible;
            for (std::size_t x = 0; x < nx; ++x) ++out.hits[x][f[x]];
        }
        for (std::size_t x = nx; x-- > 0;) {
            if (++f[x] < ny) break;
            f[x] = 0;
        }
    }
    return out;
}

/// Causal PIR: uniform over S_X, then uniform over the options of each cause.
inline ExactTable causal_pir_joint(const Relation& s, const std::vector<std::string>& causes) {
    const FunctionClassSummary fc = function_class(s, causes);
    const CauseSplit split = split_causes(s.domain(), causes);
    const Rational px(1, fc.cause_support.size());
    std::vector<Rational> w(s.domain().size(), Rational(0));
    for (std::size_t m : s.members()) {
        const std::size_t x = split.cause_of(s.domain(), m);
        w[m] = px / Rational(fc.options[x].size());
    }
    return ExactTable(s.domain(), std::move(w));
}

inline ExactTable causal_pir_joint(const Relation& s, const std::string& cause) {
    return causal_pir_joint(s, std::vector<std::string>{cause});
}

/// Standard PIR: uniform over the members of S.
inline ExactTable symmetric_pir_joint(const Relation& s) {
    require_nonempty(s);
    std::vector<Rational> w(s.domain().size(), Rational(0));
    const Rational each(1, s.size());
    for (std::size_t m : s.members()) w[m] = each;
    return ExactTable(s.domain(), std::move(w));
}

/// PIR prior of a bivariate relation under a direction; the first variable
/// is X, the second Y.
inline ExactTable pir_joint(const Relation& s, Direction direction) {
    if (s.domain().rank() != 2) throw DomainError("directional PIR needs exactly two variables");
    const auto names = variable_names(s.domain());
    switch (direction) {
        case Direction::cause_to_effect: return causal_pir_joint(s, names[0]);
        case Direction::effect_to_cause: return causal_pir_joint(s, names[1]);
        case Direction::symmetric: return symmetric_pir_joint(s);
    }
    throw DomainError("unknown direction");
}

/// Product of prior probabilities of i.i.d. observations (flat indices).
inline Rational likelihood(const ExactTable& prior, const Relation& s, const std::vector<std::size_t>& observations) {
    Rational out = 1;
    for (std::size_t obs : observations) {
        if (!s.contains(obs)) {
            const auto labels = s.domain().labels(obs);
            std::string text;
            for (const auto& l : labels) text += (text.empty() ? "" : ",") + l;
            throw ValidationError("observation (" + text + ") lies outside the relation");
        }
        out *= prior[obs];
    }
    return out;
}

inline Rational pir_likelihood(const Relation& s, const std::vector<std::size_t>& observations, Direction direction) {
    return likelihood(pir_joint(s, direction), s, observations);
}

struct DirectionCall {
    Verdict verdict = Verdict::tie;
    Rational forward = 0;   // likelihood under X->Y
    Rational backward = 0;  // likelihood under Y->X
};

inline DirectionCall infer_direction(const Relation& s, const std::vector<std::size_t>& observations) {
    DirectionCall out;
    out.forward = pir_likelihood(s, observations, Direction::cause_to_effect);
    out.backward = pir_likelihood(s, observations, Direction::effect_to_cause);
    if (out.forward > out.backward) out.verdict = Verdict::x_to_y;
    else if (out.backward > out.forward) out.verdict = Verdict::y_to_x;
    return out;
}

/// The ball device: an entry at the top (X) exits at the bottom (Y) through
/// one of the admissible channels.
inline Relation device_relation(const std::string& x = "X", const std::string& y = "Y") {
    FiniteDomain domain({{x, {"1", "2", "3"}}, {y, {"1", "2", "3"}}});
    return Relation::from_labels(domain, {{"1", "2"}, {"1", "3"}, {"2", "1"}, {"3", "1"}});
}

/// Exact independence test: every cell of the pair marginal factorizes.
inline bool independent(const ExactTable& joint, const std::string& a, const std::string& b) {
    const ExactTable ab = marginalize(joint, {a, b});
    const ExactTable pa = marginalize(joint, {a});
    const ExactTable pb = marginalize(joint, {b});
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j)
            if (ab[i * pb.size() + j] != pa[i] * pb[j]) return false;
    return true;
}

/// Two friends A and B each decide to come or stay home; C stays home when
/// both come and is otherwise free.
struct PearlReport {
    Relation relation;
    ExactTable causal;     // causes {A, B}, effect C
    ExactTable symmetric;  // uniform over the seven admissible triples
    ExactTable causal_ab;
    ExactTable symmetric_ab;
    Rational causal_both_come = 0;
    Rational symmetric_both_come = 0;
    Rational causal_home_given_both = 0;
    Rational causal_come_given_other = 0;
    LogCombination causal_mutual_information;
    LogCombination symmetric_mutual_information;
    bool causal_independent = false;
    bool symmetric_independent = false;
};

inline Relation pearl_relation() {
    const std::vector<std::string> values = {"come", "home"};
    FiniteDomain domain({{"A", values}, {"B", values}, {"C", values}});
    return Relation::where(domain, [](const Point& p) { return !(p[0] == 0 && p[1] == 0 && p[2] == 0); });
}

inline PearlReport pearl_puzzle() {
    PearlReport out;
    out.relation = pearl_relation();
    out.causal = causal_pir_joint(out.relation, std::vector<std::string>{"A", "B"});
    out.symmetric = symmetric_pir_joint(out.relation);
    out.causal_ab = marginalize(out.causal, {"A", "B"});
    out.symmetric_ab = marginalize(out.symmetric, {"A", "B"});
    out.causal_both_come = out.causal_ab[0];
    out.symmetric_both_come = out.symmetric_ab[0];
    const auto c_given = condition(out.causal, {"A", "B"}, {"C"});
    out.causal_home_given_both = c_given(0, 1);
    out.causal_come_given_other = c_given(1, 0);
    out.causal_mutual_information = mutual_information(out.causal, {"A"}, {"B"}).normalized();
    out.symmetric_mutual_information = mutual_information(out.symmetric, {"A"}, {"B"}).normalized();
    out.causal_independent = independent(out.causal, "A", "B");
    out.symmetric_independent = independent(out.symmetric, "A", "B");
    return out;
}

}  // namespace cpir::pir
