#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cpir/relation.hpp"
#include "cpir/table.hpp"

namespace cpir {

/// E_p[f] = target, satisfied when |E_p[f] - target| <= epsilon.
struct LinearConstraint {
    std::string id;
    FiniteDomain domain;
    std::vector<double> f;
    double target = 0.0;
    double epsilon = 0.0;

    LinearConstraint() = default;

    LinearConstraint(std::string id_, FiniteDomain domain_, std::vector<double> f_, double target_,
                     double epsilon_ = 0.0)
        : id(std::move(id_)), domain(std::move(domain_)), f(std::move(f_)), target(target_), epsilon(epsilon_) {
        validate();
    }

    /// Builds f by evaluating a function of the point on every domain point.
    static LinearConstraint from_function(std::string id, FiniteDomain domain,
                                          const std::function<double(const Point&)>& fn, double target,
                                          double epsilon = 0.0) {
        std::vector<double> f(domain.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(domain.decode(i));
        return LinearConstraint(std::move(id), std::move(domain), std::move(f), target, epsilon);
    }

    void validate() const {
        if (f.size() != domain.size()) throw DomainError("constraint '" + id + "' table does not cover its domain");
        for (double v : f)
            if (!std::isfinite(v)) throw DomainError("constraint '" + id + "' has a non-finite value");
        if (!std::isfinite(target)) throw DomainError("constraint '" + id + "' has a non-finite target");
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
            throw DomainError("constraint '" + id + "' has a negative or non-finite tolerance");
    }

    template <class Scalar>
    double expectation(const Table<Scalar>& p) const {
        if (!(p.domain() == domain)) throw DomainError("constraint '" + id + "' evaluated on a foreign domain");
        double out = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) out += to_double(p[i]) * f[i];
        return out;
    }

    template <class Scalar>
    double residual(const Table<Scalar>& p) const {
        return std::abs(expectation(p) - target);
    }

    template <class Scalar>
    bool satisfied_by(const Table<Scalar>& p) const {
        return residual(p) <= epsilon;
    }
};

/// Indicator of the complement of S with target 0: satisfied exactly when the
/// support lies inside S.
inline LinearConstraint relation_to_constraint(const Relation& relation, std::string id = "support") {
    if (relation.empty()) throw ValidationError("relation '" + id + "' is empty");
    std::vector<double> f(relation.domain().size(), 1.0);
    for (std::size_t m : relation.members()) f[m] = 0.0;
    return LinearConstraint(std::move(id), relation.domain(), std::move(f), 0.0, 0.0);
}

/// Exact mass outside S.
inline Rational mass_outside(const ExactTable& p, const Relation& relation) {
    Rational out = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!relation.contains(i)) out += p[i];
    return out;
}

}  // namespace cpir
