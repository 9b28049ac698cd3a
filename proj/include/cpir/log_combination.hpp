#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cpir/numeric.hpp"

namespace cpir {

/// Exact value of the form sum_i c_i * log(b_i) with rational c_i and
/// positive integer b_i. Comparison refines the bases to a pairwise coprime
/// set first; logs of pairwise coprime integers > 1 are linearly independent
/// over the rationals, so equality becomes coefficient-wise equality.
class LogCombination {
public:
    LogCombination() = default;

    static LogCombination log_of(const Rational& value) {
        LogCombination out;
        out.add_log(value, Rational(1));
        return out;
    }

    /// this += coeff * log(value)
    LogCombination& add_log(const Rational& value, const Rational& coeff) {
        if (value <= 0) throw DomainError("log of a non-positive rational");
        if (coeff == 0) return *this;
        add_term(boost::multiprecision::numerator(value), coeff);
        add_term(boost::multiprecision::denominator(value), -coeff);
        return *this;
    }

    LogCombination& operator+=(const LogCombination& other) {
        for (const auto& [base, coeff] : other.terms_) add_term(base, coeff);
        return *this;
    }
    LogCombination& operator-=(const LogCombination& other) {
        for (const auto& [base, coeff] : other.terms_) add_term(base, -coeff);
        return *this;
    }
    LogCombination& operator*=(const Rational& scale) {
        if (scale == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [base, coeff] : terms_) coeff *= scale;
        return *this;
    }

    friend LogCombination operator+(LogCombination a, const LogCombination& b) { return a += b; }
    friend LogCombination operator-(LogCombination a, const LogCombination& b) { return a -= b; }
    friend LogCombination operator*(LogCombination a, const Rational& s) { return a *= s; }
    friend LogCombination operator*(const Rational& s, LogCombination a) { return a *= s; }

    double value() const {
        double out = 0.0;
        for (const auto& [base, coeff] : terms_) out += to_double(coeff) * log_big(base);
        return out;
    }

    /// Coprime-base canonical form.
    LogCombination normalized() const {
        std::vector<std::pair<BigInt, Rational>> items(terms_.begin(), terms_.end());
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < items.size() && !changed; ++i) {
                for (std::size_t j = i + 1; j < items.size() && !changed; ++j) {
                    const BigInt g = gcd(items[i].first, items[j].first);
                    if (g == 1) continue;
                    auto [a, ca] = items[i];
                    auto [b, cb] = items[j];
                    items.erase(items.begin() + static_cast<std::ptrdiff_t>(j));
                    items.erase(items.begin() + static_cast<std::ptrdiff_t>(i));
                    std::map<BigInt, Rational> merged;
                    merged[g] += ca + cb;
                    if (a / g != 1) merged[a / g] += ca;
                    if (b / g != 1) merged[b / g] += cb;
                    for (auto& kv : merged) items.push_back(kv);
                    changed = true;
                }
            }
        }
        LogCombination out;
        for (const auto& [base, coeff] : items) out.add_term(base, coeff);
        return out;
    }

    bool is_zero() const { return normalized().terms_.empty(); }

    friend bool operator==(const LogCombination& a, const LogCombination& b) { return (a - b).is_zero(); }

    const std::map<BigInt, Rational>& terms() const noexcept { return terms_; }

    /// e.g. "1/3*log(2) + 1*log(3)" over the normalized bases.
    std::string to_string() const {
        const auto n = normalized();
        if (n.terms_.empty()) return "0";
        std::string out;
        for (const auto& [base, coeff] : n.terms_) {
            if (!out.empty()) out += " + ";
            out += to_fraction_string(coeff) + "*log(" + base.str() + ")";
        }
        return out;
    }

private:
    void add_term(const BigInt& base, const Rational& coeff) {
        if (base == 1 || coeff == 0) return;
        auto& slot = terms_[base];
        slot += coeff;
        if (slot == 0) terms_.erase(base);
    }

    std::map<BigInt, Rational> terms_;
};

}  // namespace cpir
