#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "cpir/domain.hpp"
#include "cpir/numeric.hpp"

namespace cpir {

template <class Scalar>
inline constexpr bool is_exact_v = std::is_same_v<Scalar, Rational>;

/// Tolerance on the total mass of a floating table.
inline constexpr double kFloatingMassTolerance = 1e-12;

namespace detail {

template <class Scalar>
void check_distribution(const std::vector<Scalar>& weights, const std::string& what) {
    Scalar total = 0;
    for (const auto& w : weights) {
        if constexpr (!is_exact_v<Scalar>) {
            if (!std::isfinite(w)) throw DomainError(what + " has a non-finite weight");
        }
        if (w < 0) throw DomainError(what + " has a negative weight");
        total += w;
    }
    if constexpr (is_exact_v<Scalar>) {
        if (total != 1) throw DomainError(what + " sums to " + to_fraction_string(total) + ", not 1");
    } else {
        if (std::abs(total - 1.0) > kFloatingMassTolerance)
            throw DomainError(what + " sums to " + std::to_string(total) + ", not 1");
    }
}

}  // namespace detail

/// Joint distribution over every point of a finite domain. Scalar is either
/// Rational (exact mode) or double (floating mode).
template <class Scalar>
class Table {
public:
    using scalar_type = Scalar;
    static constexpr bool exact = is_exact_v<Scalar>;

    Table() = default;

    Table(FiniteDomain domain, std::vector<Scalar> weights)
        : domain_(std::move(domain)), weights_(std::move(weights)) {
        if (weights_.size() != domain_.size()) throw DomainError("table size does not match its domain");
        detail::check_distribution(weights_, "table");
    }

    static Table uniform(FiniteDomain domain) {
        const std::size_t n = domain.size();
        if constexpr (exact) {
            return Table(std::move(domain), std::vector<Scalar>(n, Rational(1, n)));
        } else {
            return Table(std::move(domain), std::vector<Scalar>(n, 1.0 / static_cast<double>(n)));
        }
    }

    /// Renormalizes nonnegative weights; used for solver output.
    static Table normalized(FiniteDomain domain, std::vector<Scalar> weights) {
        Scalar total = 0;
        for (auto& w : weights) {
            if (w < 0) w = 0;
            total += w;
        }
        if (total <= 0) throw DomainError("cannot normalize a table with zero mass");
        for (auto& w : weights) w /= total;
        return Table(std::move(domain), std::move(weights));
    }

    const FiniteDomain& domain() const noexcept { return domain_; }
    const std::vector<Scalar>& weights() const noexcept { return weights_; }
    const Scalar& operator[](std::size_t flat) const { return weights_.at(flat); }
    const Scalar& at(const Point& point) const { return weights_.at(domain_.encode(point)); }
    std::size_t size() const noexcept { return weights_.size(); }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < weights_.size(); ++i)
            if (weights_[i] > 0) out.push_back(i);
        return out;
    }

    bool operator==(const Table& other) const {
        return domain_ == other.domain_ && weights_ == other.weights_;
    }

private:
    FiniteDomain domain_;
    std::vector<Scalar> weights_;
};

using ProbTable = Table<double>;
using ExactTable = Table<Rational>;

inline ProbTable to_floating(const ExactTable& table) {
    std::vector<double> w;
    for (const auto& x : table.weights()) w.push_back(to_double(x));
    return ProbTable::normalized(table.domain(), std::move(w));
}

/// Row-stochastic table: one distribution over the target domain per point
/// of the given domain.
template <class Scalar>
class Conditional {
public:
    Conditional() = default;

    Conditional(FiniteDomain given, FiniteDomain target, std::vector<Scalar> rows)
        : given_(std::move(given)), target_(std::move(target)), rows_(std::move(rows)) {
        if (rows_.size() != given_.size() * target_.size())
            throw DomainError("conditional table size does not match its domains");
        for (std::size_t g = 0; g < given_.size(); ++g) {
            std::vector<Scalar> row(rows_.begin() + g * target_.size(),
                                    rows_.begin() + (g + 1) * target_.size());
            detail::check_distribution(row, "conditional row " + std::to_string(g));
        }
    }

    const FiniteDomain& given() const noexcept { return given_; }
    const FiniteDomain& target() const noexcept { return target_; }
    const std::vector<Scalar>& rows() const noexcept { return rows_; }

    const Scalar& operator()(std::size_t given_flat, std::size_t target_flat) const {
        return rows_.at(given_flat * target_.size() + target_flat);
    }

    std::vector<Scalar> row(std::size_t given_flat) const {
        return {rows_.begin() + given_flat * target_.size(), rows_.begin() + (given_flat + 1) * target_.size()};
    }

private:
    FiniteDomain given_;
    FiniteDomain target_;
    std::vector<Scalar> rows_;
};

using ConditionalTable = Conditional<double>;
using ExactConditionalTable = Conditional<Rational>;

/// Sums out every variable not listed; the result follows the listed order.
template <class Scalar>
Table<Scalar> marginalize(const Table<Scalar>& joint, const std::vector<std::string>& keep) {
    if (keep.empty()) throw DomainError("marginalize needs at least one variable to keep");
    const auto& domain = joint.domain();
    const auto idx = domain.indices_of(keep);
    FiniteDomain sub = domain.subdomain(std::span<const std::size_t>(idx));
    std::vector<Scalar> out(sub.size(), Scalar(0));
    for (std::size_t i = 0; i < joint.size(); ++i) out[domain.project(i, idx)] += joint[i];
    return Table<Scalar>(std::move(sub), std::move(out));
}

/// Same distribution with the variables listed in a new order.
template <class Scalar>
Table<Scalar> reordered(const Table<Scalar>& joint, const std::vector<std::string>& order) {
    const auto& domain = joint.domain();
    const auto idx = domain.indices_of(order);
    if (idx.size() != domain.rank()) throw DomainError("reorder must list every variable once");
    FiniteDomain target = domain.subdomain(std::span<const std::size_t>(idx));
    std::vector<Scalar> out(joint.size(), Scalar(0));
    for (std::size_t i = 0; i < joint.size(); ++i) out[domain.project(i, idx)] = joint[i];
    return Table<Scalar>(std::move(target), std::move(out));
}

/// P(target | given) from a joint; rows with zero given-mass are uniform.
template <class Scalar>
Conditional<Scalar> condition(const Table<Scalar>& joint, const std::vector<std::string>& given,
                              const std::vector<std::string>& target) {
    const auto& domain = joint.domain();
    const auto gi = domain.indices_of(given);
    const auto ti = domain.indices_of(target);
    FiniteDomain gd = domain.subdomain(std::span<const std::size_t>(gi));
    FiniteDomain td = domain.subdomain(std::span<const std::size_t>(ti));
    std::vector<Scalar> mass(gd.size(), Scalar(0));
    std::vector<Scalar> rows(gd.size() * td.size(), Scalar(0));
    for (std::size_t i = 0; i < joint.size(); ++i) {
        const std::size_t g = domain.project(i, gi);
        mass[g] += joint[i];
        rows[g * td.size() + domain.project(i, ti)] += joint[i];
    }
    for (std::size_t g = 0; g < gd.size(); ++g) {
        for (std::size_t t = 0; t < td.size(); ++t) {
            Scalar& cell = rows[g * td.size() + t];
            if (mass[g] > 0) {
                cell /= mass[g];
            } else if constexpr (is_exact_v<Scalar>) {
                cell = Rational(1, td.size());
            } else {
                cell = 1.0 / static_cast<double>(td.size());
            }
        }
    }
    if constexpr (!is_exact_v<Scalar>) {
        for (std::size_t g = 0; g < gd.size(); ++g) {
            double total = 0;
            for (std::size_t t = 0; t < td.size(); ++t) total += rows[g * td.size() + t];
            for (std::size_t t = 0; t < td.size(); ++t) rows[g * td.size() + t] /= total;
        }
    }
    return Conditional<Scalar>(std::move(gd), std::move(td), std::move(rows));
}

template <class Scalar>
double total_variation(const Table<Scalar>& a, const Table<Scalar>& b) {
    if (!(a.domain() == b.domain())) throw DomainError("total variation across different domains");
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out += std::abs(to_double(a[i]) - to_double(b[i]));
    return 0.5 * out;
}

inline Rational l1_distance(const ExactTable& a, const ExactTable& b) {
    if (!(a.domain() == b.domain())) throw DomainError("L1 distance across different domains");
    Rational out = 0;
    for (std::size_t i = 0; i < a.size(); ++i) out += abs(a[i] - b[i]);
    return out;
}

}  // namespace cpir
