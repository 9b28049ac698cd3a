#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpir/constraint.hpp"
#include "cpir/dag.hpp"
#include "cpir/relation.hpp"
#include "cpir/table.hpp"

// Canonical JSON for the core objects. Objects use nlohmann::json's ordered
// std::map, so keys are emitted sorted and output is byte-stable.

namespace cpir::json {

using Json = nlohmann::json;

/// Rounds to 12 significant digits; the shortest round-trip form of the
/// result is what gets printed.
inline double round12(double v) {
    if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::stod(buf);
}

inline std::string format12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

inline Json number(double v) { return round12(v); }
inline Json number(const Rational& v) { return to_fraction_string(v); }

inline Json numbers(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

inline Json to_json(const FiniteDomain& d) {
    Json vars = Json::array();
    for (const auto& v : d.variables()) vars.push_back({{"name", v.name}, {"values", v.values}});
    return {{"variables", vars}};
}

inline FiniteDomain domain_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("variables") || !j.at("variables").is_array())
        throw DomainError("domain needs a 'variables' array");
    std::vector<Variable> vars;
    for (const auto& v : j.at("variables")) {
        if (!v.contains("name") || !v.contains("values")) throw DomainError("variable needs 'name' and 'values'");
        std::vector<std::string> values;
        for (const auto& x : v.at("values")) values.push_back(x.is_string() ? x.get<std::string>() : x.dump());
        vars.push_back({v.at("name").get<std::string>(), std::move(values)});
    }
    return FiniteDomain(std::move(vars));
}

inline Json point_labels(const FiniteDomain& d, std::size_t flat) { return d.labels(flat); }

inline std::size_t point_from_json(const FiniteDomain& d, const Json& j) {
    if (!j.is_array() || j.size() != d.rank())
        throw DomainError("point must list one value per variable, got " + j.dump());
    std::vector<std::string> labels;
    for (const auto& x : j) labels.push_back(x.is_string() ? x.get<std::string>() : x.dump());
    return d.encode_labels(labels);
}

inline Json to_json(const Relation& s) {
    Json members = Json::array();
    for (std::size_t m : s.members()) members.push_back(point_labels(s.domain(), m));
    return {{"domain", to_json(s.domain())}, {"members", members}};
}

inline Relation relation_from_json(const FiniteDomain& d, const Json& members) {
    std::vector<std::size_t> flat;
    for (const auto& p : members) flat.push_back(point_from_json(d, p));
    return Relation(d, std::move(flat));
}

inline Relation relation_from_json(const Json& j) {
    return relation_from_json(domain_from_json(j.at("domain")), j.at("members"));
}

/// Every point with its probability: "p/q" strings for exact tables, numbers
/// at 12 significant digits otherwise.
template <class Scalar>
Json to_json(const Table<Scalar>& t) {
    Json entries = Json::array();
    for (std::size_t i = 0; i < t.size(); ++i)
        entries.push_back({{"point", point_labels(t.domain(), i)}, {"p", number(t[i])}});
    return {{"domain", to_json(t.domain())}, {"exact", Table<Scalar>::exact}, {"entries", entries}};
}

template <class Scalar>
Table<Scalar> table_from_json(const Json& j) {
    const FiniteDomain d = domain_from_json(j.at("domain"));
    std::vector<Scalar> w(d.size(), Scalar(0));
    std::vector<bool> seen(d.size(), false);
    for (const auto& e : j.at("entries")) {
        const std::size_t flat = point_from_json(d, e.at("point"));
        if (seen[flat]) throw DomainError("table lists a point twice");
        seen[flat] = true;
        const Json& p = e.at("p");
        if constexpr (is_exact_v<Scalar>) {
            w[flat] = p.is_string() ? parse_rational(p.get<std::string>()) : parse_rational(p.dump());
        } else {
            w[flat] = p.is_string() ? to_double(parse_rational(p.get<std::string>())) : p.get<double>();
        }
    }
    if constexpr (is_exact_v<Scalar>) {
        return Table<Scalar>(d, std::move(w));
    } else {
        return Table<Scalar>::normalized(d, std::move(w));
    }
}

inline Json to_json(const LinearConstraint& c, bool with_domain = true) {
    Json out = {{"id", c.id}, {"f", numbers(c.f)}, {"target", number(c.target)}, {"epsilon", number(c.epsilon)}};
    if (with_domain) out["domain"] = to_json(c.domain);
    return out;
}

inline LinearConstraint constraint_from_json(const Json& j) {
    const FiniteDomain d = domain_from_json(j.at("domain"));
    return LinearConstraint(j.at("id").get<std::string>(), d, j.at("f").get<std::vector<double>>(),
                            j.at("target").get<double>(), j.value("epsilon", 0.0));
}

inline Json to_json(const Dag& g) {
    Json edges = Json::array();
    for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
    return {{"nodes", g.nodes()}, {"edges", edges}};
}

inline Dag dag_from_json(const Json& j) {
    if (!j.contains("nodes")) throw DomainError("graph needs a 'nodes' array");
    std::vector<Dag::Edge> edges;
    for (const auto& e : j.value("edges", Json::array())) {
        if (!e.is_array() || e.size() != 2) throw DomainError("edge must be a [parent, child] pair");
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return Dag(j.at("nodes").get<std::vector<std::string>>(), std::move(edges));
}

template <class Scalar>
Json to_json(const Conditional<Scalar>& c) {
    Json rows = Json::array();
    for (std::size_t g = 0; g < c.given().size(); ++g) {
        Json probs = Json::array();
        for (std::size_t t = 0; t < c.target().size(); ++t) probs.push_back(number(c(g, t)));
        rows.push_back({{"given", point_labels(c.given(), g)}, {"p", probs}});
    }
    return {{"given", to_json(c.given())}, {"target", to_json(c.target())}, {"rows", rows}};
}

}  // namespace cpir::json
