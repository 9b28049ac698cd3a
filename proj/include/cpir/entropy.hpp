#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "cpir/log_combination.hpp"
#include "cpir/table.hpp"

namespace cpir {

// Entropies are in nats. 0 log 0 is taken as 0 (the continuous extension).

template <class Scalar>
using entropy_value_t = std::conditional_t<is_exact_v<Scalar>, LogCombination, double>;

inline double entropy(const ProbTable& p) {
    double h = 0.0;
    for (double w : p.weights())
        if (w > 0) h -= w * std::log(w);
    return h;
}

inline LogCombination entropy(const ExactTable& p) {
    LogCombination h;
    for (const auto& w : p.weights())
        if (w > 0) h.add_log(w, -w);
    return h;
}

inline double bits(double nats) { return nats / std::log(2.0); }

/// H(rest | condition), computed directly as -sum p(x,y) log p(y|x).
template <class Scalar>
entropy_value_t<Scalar> conditional_entropy(const Table<Scalar>& joint, const std::vector<std::string>& condition) {
    const auto& domain = joint.domain();
    const auto idx = domain.indices_of(condition);
    const FiniteDomain cond = domain.subdomain(std::span<const std::size_t>(idx));
    std::vector<Scalar> mass(cond.size(), Scalar(0));
    for (std::size_t i = 0; i < joint.size(); ++i) mass[domain.project(i, idx)] += joint[i];
    entropy_value_t<Scalar> h{};
    for (std::size_t i = 0; i < joint.size(); ++i) {
        const Scalar& w = joint[i];
        if (!(w > 0)) continue;
        const Scalar ratio = mass[domain.project(i, idx)] / w;
        if constexpr (is_exact_v<Scalar>) {
            h.add_log(ratio, w);
        } else {
            h += w * std::log(ratio);
        }
    }
    return h;
}

/// I(A;B) = H(A) + H(B) - H(A,B) over disjoint variable lists.
template <class Scalar>
entropy_value_t<Scalar> mutual_information(const Table<Scalar>& joint, const std::vector<std::string>& a,
                                           const std::vector<std::string>& b) {
    std::vector<std::string> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    auto out = entropy(marginalize(joint, a));
    out += entropy(marginalize(joint, b));
    out -= entropy(marginalize(joint, ab));
    return out;
}

/// I(A;B|C); with empty C it is the plain mutual information.
template <class Scalar>
entropy_value_t<Scalar> conditional_mutual_information(const Table<Scalar>& joint, const std::vector<std::string>& a,
                                                       const std::vector<std::string>& b,
                                                       const std::vector<std::string>& c) {
    if (c.empty()) return mutual_information(joint, a, b);
    auto join = [](std::vector<std::string> x, const std::vector<std::string>& y) {
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
    auto out = entropy(marginalize(joint, join(a, c)));
    out += entropy(marginalize(joint, join(b, c)));
    out -= entropy(marginalize(joint, c));
    out -= entropy(marginalize(joint, join(join(a, b), c)));
    return out;
}

}  // namespace cpir
