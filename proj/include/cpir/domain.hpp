#pragma once

#include <charconv>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cpir/error.hpp"
#include "cpir/numeric.hpp"

namespace cpir {

struct Variable {
    std::string name;
    std::vector<std::string> values;

    bool operator==(const Variable&) const = default;
};

/// A full assignment: one value index per variable, in declaration order.
using Point = std::vector<std::size_t>;

/// Ordered product of finite variables. Points are addressed by a mixed-radix
/// index in declaration order, the last variable varying fastest.
class FiniteDomain {
public:
    FiniteDomain() = default;

    explicit FiniteDomain(std::vector<Variable> variables) : variables_(std::move(variables)) {
        std::set<std::string> names;
        for (const auto& var : variables_) {
            if (var.name.empty()) throw DomainError("variable with empty name");
            if (!names.insert(var.name).second) throw DomainError("duplicate variable '" + var.name + "'");
            if (var.values.empty()) throw DomainError("variable '" + var.name + "' has no values");
            std::set<std::string> labels(var.values.begin(), var.values.end());
            if (labels.size() != var.values.size())
                throw DomainError("variable '" + var.name + "' has repeated labels");
        }
        BigInt exact = 1;
        for (const auto& var : variables_) exact *= var.values.size();
        if (exact > BigInt(std::numeric_limits<std::size_t>::max() / 2))
            throw SizeError("domain of size " + exact.str() + " does not fit a dense table");
        strides_.assign(variables_.size(), 1);
        for (std::size_t i = variables_.size(); i-- > 1;)
            strides_[i - 1] = strides_[i] * variables_[i].values.size();
        size_ = exact.convert_to<std::size_t>();
    }

    std::size_t size() const noexcept { return size_; }
    BigInt exact_size() const {
        BigInt out = 1;
        for (const auto& var : variables_) out *= var.values.size();
        return out;
    }
    std::size_t rank() const noexcept { return variables_.size(); }
    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const Variable& variable(std::size_t i) const { return variables_.at(i); }
    std::size_t cardinality(std::size_t i) const { return variables_.at(i).values.size(); }

    bool has(const std::string& name) const {
        for (const auto& var : variables_)
            if (var.name == name) return true;
        return false;
    }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i].name == name) return i;
        throw DomainError("unknown variable '" + name + "'");
    }

    std::vector<std::size_t> indices_of(std::span<const std::string> names) const {
        std::vector<std::size_t> out;
        std::set<std::size_t> seen;
        for (const auto& name : names) {
            const std::size_t i = index_of(name);
            if (!seen.insert(i).second) throw DomainError("variable '" + name + "' listed twice");
            out.push_back(i);
        }
        return out;
    }

    std::size_t value_index(std::size_t var, const std::string& label) const {
        const auto& values = variable(var).values;
        for (std::size_t v = 0; v < values.size(); ++v)
            if (values[v] == label) return v;
        throw DomainError("variable '" + variables_[var].name + "' has no value '" + label + "'");
    }

    std::size_t encode(std::span<const std::size_t> point) const {
        if (point.size() != variables_.size()) throw DomainError("point arity does not match domain");
        std::size_t flat = 0;
        for (std::size_t i = 0; i < point.size(); ++i) {
            if (point[i] >= variables_[i].values.size()) throw DomainError("value index out of range");
            flat += point[i] * strides_[i];
        }
        return flat;
    }

    Point decode(std::size_t flat) const {
        Point point(variables_.size());
        for (std::size_t i = 0; i < variables_.size(); ++i) point[i] = digit(flat, i);
        return point;
    }

    std::size_t digit(std::size_t flat, std::size_t var) const {
        return (flat / strides_[var]) % variables_[var].values.size();
    }

    std::size_t encode_labels(std::span<const std::string> labels) const {
        if (labels.size() != variables_.size()) throw DomainError("tuple arity does not match domain");
        Point point(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) point[i] = value_index(i, labels[i]);
        return encode(point);
    }

    std::vector<std::string> labels(std::size_t flat) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < variables_.size(); ++i) out.push_back(variables_[i].values[digit(flat, i)]);
        return out;
    }

    /// Domain over the listed variables, in the listed order.
    FiniteDomain subdomain(std::span<const std::size_t> vars) const {
        std::vector<Variable> out;
        for (std::size_t i : vars) out.push_back(variable(i));
        return FiniteDomain(std::move(out));
    }

    FiniteDomain subdomain(std::span<const std::string> names) const {
        const auto idx = indices_of(names);
        return subdomain(std::span<const std::size_t>(idx));
    }

    /// Flat index in subdomain(vars) of the projection of a point of this domain.
    std::size_t project(std::size_t flat, std::span<const std::size_t> vars) const {
        std::size_t out = 0;
        for (std::size_t i : vars) out = out * variables_[i].values.size() + digit(flat, i);
        return out;
    }

    /// Numeric reading of a value label, when the label parses as a number.
    std::optional<double> numeric_value(std::size_t var, std::size_t value) const {
        const std::string& label = variable(var).values.at(value);
        double out = 0.0;
        const char* first = label.data();
        const char* last = label.data() + label.size();
        if (!label.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc() || ptr != last) return std::nullopt;
        return out;
    }

    bool operator==(const FiniteDomain& other) const { return variables_ == other.variables_; }

private:
    std::vector<Variable> variables_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

inline std::vector<std::string> variable_names(const FiniteDomain& domain) {
    std::vector<std::string> out;
    for (const auto& var : domain.variables()) out.push_back(var.name);
    return out;
}

}  // namespace cpir
