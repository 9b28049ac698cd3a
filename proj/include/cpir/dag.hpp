#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cpir/error.hpp"

namespace cpir {

class Dag {
public:
    using Edge = std::pair<std::string, std::string>;

    Dag() = default;

    Dag(std::vector<std::string> nodes, std::vector<Edge> edges) : nodes_(std::move(nodes)), edges_(std::move(edges)) {
        std::set<std::string> seen;
        for (const auto& n : nodes_)
            if (!seen.insert(n).second) throw DomainError("duplicate node '" + n + "'");
        parents_.assign(nodes_.size(), {});
        std::set<std::pair<std::size_t, std::size_t>> unique;
        for (const auto& [from, to] : edges_) {
            const std::size_t a = index_of(from);
            const std::size_t b = index_of(to);
            if (a == b) throw DomainError("self loop on '" + from + "'");
            if (!unique.insert({a, b}).second) throw DomainError("duplicate edge " + from + "->" + to);
            parents_[b].push_back(a);
        }
        for (auto& p : parents_) std::sort(p.begin(), p.end());
        if (!acyclic()) throw DomainError("graph has a directed cycle");
    }

    const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i] == name) return i;
        throw DomainError("unknown node '" + name + "'");
    }

    /// Parents in node declaration order.
    std::vector<std::string> parents(const std::string& node) const {
        std::vector<std::string> out;
        for (std::size_t p : parents_[index_of(node)]) out.push_back(nodes_[p]);
        return out;
    }

    std::set<std::string> descendants(const std::string& node) const {
        std::set<std::size_t> found;
        std::vector<std::size_t> stack = {index_of(node)};
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t c = 0; c < nodes_.size(); ++c)
                if (std::binary_search(parents_[c].begin(), parents_[c].end(), v) && found.insert(c).second)
                    stack.push_back(c);
        }
        std::set<std::string> out;
        for (std::size_t i : found) out.insert(nodes_[i]);
        return out;
    }

    /// Nodes that are neither the node itself, its descendants, nor its parents.
    std::vector<std::string> nondescendant_nonparents(const std::string& node) const {
        const auto desc = descendants(node);
        const auto pa = parents(node);
        std::vector<std::string> out;
        for (const auto& n : nodes_)
            if (n != node && !desc.count(n) && std::find(pa.begin(), pa.end(), n) == pa.end()) out.push_back(n);
        return out;
    }

    bool is_topological(const std::vector<std::string>& order) const {
        if (order.size() != nodes_.size()) return false;
        std::vector<std::size_t> rank(nodes_.size(), nodes_.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::size_t v = index_of(order[i]);
            if (rank[v] != nodes_.size()) return false;
            rank[v] = i;
        }
        for (std::size_t v = 0; v < nodes_.size(); ++v)
            for (std::size_t p : parents_[v])
                if (rank[p] > rank[v]) return false;
        return true;
    }

    /// Topological order choosing the lexicographically smallest available
    /// name at every step.
    std::vector<std::string> default_order() const {
        std::vector<std::string> out;
        std::vector<bool> done(nodes_.size(), false);
        while (out.size() < nodes_.size()) {
            std::size_t best = nodes_.size();
            for (std::size_t v = 0; v < nodes_.size(); ++v) {
                if (done[v] || !ready(v, done)) continue;
                if (best == nodes_.size() || nodes_[v] < nodes_[best]) best = v;
            }
            done[best] = true;
            out.push_back(nodes_[best]);
        }
        return out;
    }

    /// Every topological order, in lexicographic order of names. Throws when
    /// there are more than `cap`.
    std::vector<std::vector<std::string>> topological_orders(std::size_t cap = 5040) const {
        std::vector<std::size_t> by_name(nodes_.size());
        for (std::size_t i = 0; i < by_name.size(); ++i) by_name[i] = i;
        std::sort(by_name.begin(), by_name.end(), [&](std::size_t a, std::size_t b) { return nodes_[a] < nodes_[b]; });
        std::vector<std::vector<std::string>> out;
        std::vector<std::string> current;
        std::vector<bool> done(nodes_.size(), false);
        extend(by_name, done, current, out, cap);
        return out;
    }

private:
    bool ready(std::size_t v, const std::vector<bool>& done) const {
        for (std::size_t p : parents_[v])
            if (!done[p]) return false;
        return true;
    }

    void extend(const std::vector<std::size_t>& by_name, std::vector<bool>& done, std::vector<std::string>& current,
                std::vector<std::vector<std::string>>& out, std::size_t cap) const {
        if (current.size() == nodes_.size()) {
            if (out.size() == cap)
                throw SizeError("more than " + std::to_string(cap) + " topological orders");
            out.push_back(current);
            return;
        }
        for (std::size_t v : by_name) {
            if (done[v] || !ready(v, done)) continue;
            done[v] = true;
            current.push_back(nodes_[v]);
            extend(by_name, done, current, out, cap);
            current.pop_back();
            done[v] = false;
        }
    }

    bool acyclic() const {
        std::vector<bool> done(nodes_.size(), false);
        for (std::size_t count = 0; count < nodes_.size(); ++count) {
            bool progressed = false;
            for (std::size_t v = 0; v < nodes_.size(); ++v)
                if (!done[v] && ready(v, done)) {
                    done[v] = true;
                    progressed = true;
                    break;
                }
            if (!progressed) return false;
        }
        return true;
    }

    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> parents_;
};

}  // namespace cpir
