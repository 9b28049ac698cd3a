#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "cpir/domain.hpp"

namespace cpir {

/// Set of admissible full assignments of a domain.
class Relation {
public:
    Relation() = default;

    Relation(FiniteDomain domain, std::vector<std::size_t> members)
        : domain_(std::move(domain)), mask_(domain_.size(), false) {
        for (std::size_t flat : members) {
            if (flat >= domain_.size()) throw DomainError("relation member outside the domain");
            mask_[flat] = true;
        }
        for (std::size_t i = 0; i < mask_.size(); ++i)
            if (mask_[i]) members_.push_back(i);
    }

    static Relation from_points(FiniteDomain domain, const std::vector<Point>& points) {
        std::vector<std::size_t> flat;
        for (const auto& p : points) flat.push_back(domain.encode(p));
        return Relation(std::move(domain), std::move(flat));
    }

    static Relation from_labels(FiniteDomain domain, const std::vector<std::vector<std::string>>& tuples) {
        std::vector<std::size_t> flat;
        for (const auto& t : tuples) flat.push_back(domain.encode_labels(t));
        return Relation(std::move(domain), std::move(flat));
    }

    static Relation full(FiniteDomain domain) {
        std::vector<std::size_t> all(domain.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return Relation(std::move(domain), std::move(all));
    }

    template <class Pred>
    static Relation where(FiniteDomain domain, Pred&& pred) {
        std::vector<std::size_t> flat;
        for (std::size_t i = 0; i < domain.size(); ++i)
            if (pred(domain.decode(i))) flat.push_back(i);
        return Relation(std::move(domain), std::move(flat));
    }

    const FiniteDomain& domain() const noexcept { return domain_; }
    const std::vector<std::size_t>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }

    bool contains(std::size_t flat) const { return flat < mask_.size() && mask_[flat]; }
    bool contains(const Point& point) const { return contains(domain_.encode(point)); }

    /// Same relation with the variables listed in a new order.
    Relation reordered(const std::vector<std::string>& order) const {
        const auto idx = domain_.indices_of(order);
        if (idx.size() != domain_.rank()) throw DomainError("reorder must list every variable once");
        FiniteDomain target = domain_.subdomain(std::span<const std::size_t>(idx));
        std::vector<std::size_t> flat;
        for (std::size_t m : members_) flat.push_back(domain_.project(m, idx));
        return Relation(std::move(target), std::move(flat));
    }

    bool operator==(const Relation& other) const {
        return domain_ == other.domain_ && members_ == other.members_;
    }

private:
    FiniteDomain domain_;
    std::vector<bool> mask_;
    std::vector<std::size_t> members_;
};

}  // namespace cpir
