#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cpir/numeric.hpp"
#include "cpir/pir.hpp"
#include "cpir/relation.hpp"

namespace cpir::igci {

/// Strictly increasing f: [0,1] -> [0,1] with f(0) = 0 and f(1) = 1.
class MonotoneFunction {
public:
    using Fn = std::function<double(double)>;

    MonotoneFunction(std::string name, Fn f, Fn derivative, Fn inverse = {}, Fn inverse_derivative = {})
        : name_(std::move(name)), f_(std::move(f)), df_(std::move(derivative)), inv_(std::move(inverse)),
          dinv_(std::move(inverse_derivative)) {}

    static MonotoneFunction identity() {
        auto id = [](double x) { return x; };
        auto one = [](double) { return 1.0; };
        return MonotoneFunction("identity", id, one, id, one);
    }

    static MonotoneFunction square() {
        return MonotoneFunction(
            "square", [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
            [](double y) { return std::sqrt(y); }, [](double y) { return 0.5 / std::sqrt(y); });
    }

    /// (e^x - 1) / (e - 1).
    static MonotoneFunction scaled_exponential() {
        const double c = std::exp(1.0) - 1.0;
        return MonotoneFunction(
            "scaled-exponential", [c](double x) { return std::expm1(x) / c; },
            [c](double x) { return std::exp(x) / c; }, [c](double y) { return std::log1p(c * y); },
            [c](double y) { return c / (1.0 + c * y); });
    }

    /// Linear interpolation through knots (x_0, y_0) = (0, 0) ... (1, 1);
    /// the derivative is the secant slope of the segment.
    static MonotoneFunction piecewise_linear(std::vector<std::pair<double, double>> knots) {
        if (knots.size() < 2) throw DomainError("piecewise-linear function needs at least two knots");
        for (std::size_t i = 1; i < knots.size(); ++i)
            if (!(knots[i].first > knots[i - 1].first) || !(knots[i].second > knots[i - 1].second))
                throw DomainError("piecewise-linear knots must be strictly increasing in x and y");
        auto shared = std::make_shared<std::vector<std::pair<double, double>>>(std::move(knots));
        auto segment = [](const std::vector<std::pair<double, double>>& k, double x, bool by_y) {
            std::size_t s = 0;
            while (s + 2 < k.size() && (by_y ? k[s + 1].second : k[s + 1].first) < x) ++s;
            return s;
        };
        auto f = [shared, segment](double x) {
            const auto& k = *shared;
            const std::size_t s = segment(k, x, false);
            const double t = (x - k[s].first) / (k[s + 1].first - k[s].first);
            return k[s].second + t * (k[s + 1].second - k[s].second);
        };
        auto df = [shared, segment](double x) {
            const auto& k = *shared;
            const std::size_t s = segment(k, x, false);
            return (k[s + 1].second - k[s].second) / (k[s + 1].first - k[s].first);
        };
        auto inv = [shared, segment](double y) {
            const auto& k = *shared;
            const std::size_t s = segment(k, y, true);
            const double t = (y - k[s].second) / (k[s + 1].second - k[s].second);
            return k[s].first + t * (k[s + 1].first - k[s].first);
        };
        auto dinv = [shared, segment](double y) {
            const auto& k = *shared;
            const std::size_t s = segment(k, y, true);
            return (k[s + 1].first - k[s].first) / (k[s + 1].second - k[s].second);
        };
        MonotoneFunction out("piecewise-linear", f, df, inv, dinv);
        out.knots_ = shared;
        return out;
    }

    static MonotoneFunction builtin(const std::string& name) {
        if (name == "identity") return identity();
        if (name == "square") return square();
        if (name == "scaled-exponential") return scaled_exponential();
        throw DomainError("unknown built-in function '" + name + "'");
    }

    const std::string& name() const noexcept { return name_; }
    double operator()(double x) const { return f_(x); }
    double derivative(double x) const { return df_(x); }
    bool has_analytic_inverse() const noexcept { return static_cast<bool>(inv_); }

    /// f^-1(y); bisection to 1e-12 when no analytic inverse was supplied.
    double inverse(double y) const {
        if (inv_) return inv_(y);
        double lo = 0.0;
        double hi = 1.0;
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            (f_(mid) < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// f^-1 as a function in its own right.
    MonotoneFunction inverse_function() const {
        if (knots_) {
            std::vector<std::pair<double, double>> swapped;
            for (const auto& [x, y] : *knots_) swapped.emplace_back(y, x);
            return piecewise_linear(std::move(swapped));
        }
        const MonotoneFunction self = *this;
        Fn inv = [self](double y) { return self.inverse(y); };
        Fn dinv = dinv_ ? dinv_ : Fn([self](double y) { return 1.0 / self.derivative(self.inverse(y)); });
        return MonotoneFunction(name_ + "^-1", inv, dinv, f_, df_);
    }

    /// Endpoint, monotonicity and derivative checks on a 1001-point grid.
    void validate() const {
        if (std::abs(f_(0.0)) > 1e-12 || std::abs(f_(1.0) - 1.0) > 1e-12)
            throw DomainError(name_ + ": f(0) = 0 and f(1) = 1 required");
        double prev = f_(0.0);
        for (int i = 1; i <= 1000; ++i) {
            const double cur = f_(i / 1000.0);
            if (!(cur > prev)) throw DomainError(name_ + ": not strictly increasing near x = " + std::to_string(i / 1000.0));
            prev = cur;
        }
        const double h = 1e-5;
        for (int i = 1; i < 1000; ++i) {
            const double x = i / 1000.0;
            if (near_knot(x, h)) continue;
            const double secant = (f_(x + h) - f_(x - h)) / (2 * h);
            if (std::abs(df_(x) - secant) > 1e-4)
                throw DomainError(name_ + ": derivative inconsistent at x = " + std::to_string(x));
        }
    }

private:
    bool near_knot(double x, double h) const {
        if (!knots_) return false;
        for (const auto& k : *knots_)
            if (std::abs(k.first - x) <= h) return true;
        return false;
    }

    std::string name_;
    Fn f_;
    Fn df_;
    Fn inv_;
    Fn dinv_;
    std::shared_ptr<std::vector<std::pair<double, double>>> knots_;
};

inline constexpr double kDefaultPenWidth = 3.0;

/// Grid pairs (i, j) in {0..l-1}^2 within the pen band around the graph of f.
struct FatPenRelation {
    std::size_t grid = 0;
    double width = 0.0;
    Relation relation;             // variables X, Y with labels "0".."l-1"
    std::vector<std::size_t> n_x;  // options per column
    std::vector<std::size_t> n_y;  // options per row

    bool contains(std::size_t i, std::size_t j) const { return i < grid && j < grid && relation.contains(i * grid + j); }
};

inline FiniteDomain grid_domain(std::size_t l) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < l; ++i) labels.push_back(std::to_string(i));
    return FiniteDomain({{"X", labels}, {"Y", labels}});
}

/// Membership: |j - l f(i/l)| <= w or |i - l f^-1(j/l)| <= w, in grid units.
inline FatPenRelation fat_pen(const MonotoneFunction& f, std::size_t l, double w = kDefaultPenWidth) {
    if (l < 16) throw ValidationError("fat pen needs a grid of at least 16 points");
    if (!(w > 0.0)) throw ValidationError("pen width must be positive");
    const double L = static_cast<double>(l);
    const double margin = 1e-9;
    std::vector<double> fx(l);
    std::vector<double> finv(l);
    for (std::size_t i = 0; i < l; ++i) {
        fx[i] = L * f(static_cast<double>(i) / L);
        finv[i] = L * f.inverse(static_cast<double>(i) / L);
    }
    FatPenRelation out;
    out.grid = l;
    out.width = w;
    out.n_x.assign(l, 0);
    out.n_y.assign(l, 0);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) {
            const double di = static_cast<double>(i);
            const double dj = static_cast<double>(j);
            if (std::abs(dj - fx[i]) <= w + margin || std::abs(di - finv[j]) <= w + margin) {
                members.push_back(i * l + j);
                ++out.n_x[i];
                ++out.n_y[j];
            }
        }
    for (std::size_t i = 0; i < l; ++i) {
        if (out.n_x[i] == 0) throw ResolutionError("fat pen leaves column " + std::to_string(i) + " empty");
        if (out.n_y[i] == 0) throw ResolutionError("fat pen leaves row " + std::to_string(i) + " empty");
    }
    out.relation = Relation(grid_domain(l), std::move(members));
    return out;
}

/// The same pairs with the roles of X and Y exchanged.
inline FatPenRelation transpose(const FatPenRelation& rel) {
    FatPenRelation out;
    out.grid = rel.grid;
    out.width = rel.width;
    out.n_x = rel.n_y;
    out.n_y = rel.n_x;
    std::vector<std::size_t> members;
    for (std::size_t m : rel.relation.members()) members.push_back((m % rel.grid) * rel.grid + m / rel.grid);
    out.relation = Relation(grid_domain(rel.grid), std::move(members));
    return out;
}

using GridSample = std::pair<std::size_t, std::size_t>;

struct DiscreteScore {
    double sum_log_nx = 0.0;
    double sum_log_ny = 0.0;
    pir::Verdict verdict = pir::Verdict::tie;
};

/// X->Y iff prod N_X(x_j) < prod N_Y(y_j), compared exactly.
inline DiscreteScore discrete_pir_score(const FatPenRelation& rel, const std::vector<GridSample>& samples) {
    DiscreteScore out;
    BigInt px = 1;
    BigInt py = 1;
    for (const auto& [i, j] : samples) {
        if (!rel.contains(i, j))
            throw ValidationError("sample (" + std::to_string(i) + ", " + std::to_string(j) + ") is outside the relation");
        px *= rel.n_x[i];
        py *= rel.n_y[j];
        out.sum_log_nx += std::log(static_cast<double>(rel.n_x[i]));
        out.sum_log_ny += std::log(static_cast<double>(rel.n_y[j]));
    }
    out.verdict = px < py ? pir::Verdict::x_to_y : (py < px ? pir::Verdict::y_to_x : pir::Verdict::tie);
    return out;
}

/// Nearest grid index to t * l, ties to the lower index.
inline std::size_t snap(double t, std::size_t l) {
    const double v = t * static_cast<double>(l);
    const double idx = std::ceil(v - 0.5);
    return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(l - 1)));
}

inline std::vector<GridSample> snap_samples(const MonotoneFunction& f, const std::vector<double>& xs, std::size_t l) {
    std::vector<GridSample> out;
    for (double x : xs) out.emplace_back(snap(x, l), snap(f(x), l));
    return out;
}

struct IgciScore {
    double score = 0.0;          // (1/n) sum log f'(x_j)
    double inverse_score = 0.0;  // -(1/n) sum log (f^-1)'(f(x_j))
    pir::Verdict verdict = pir::Verdict::tie;
};

inline IgciScore igci_score(const MonotoneFunction& f, const std::vector<double>& xs) {
    if (xs.empty()) throw ValidationError("igci score needs at least one sample");
    const MonotoneFunction g = f.inverse_function();
    IgciScore out;
    for (double x : xs) {
        const double d = f.derivative(x);
        if (!(d > 0.0)) throw DomainError("nonpositive derivative at x = " + std::to_string(x));
        out.score += std::log(d);
        out.inverse_score -= std::log(g.derivative(f(x)));
    }
    out.score /= static_cast<double>(xs.size());
    out.inverse_score /= static_cast<double>(xs.size());
    out.verdict = out.score < 0.0 ? pir::Verdict::x_to_y : (out.score > 0.0 ? pir::Verdict::y_to_x : pir::Verdict::tie);
    return out;
}

/// Midpoints (i + 1/2) / n of a uniform n-point grid on [0, 1].
inline std::vector<double> uniform_grid(std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    return out;
}

using WidthRule = std::function<double(std::size_t)>;

/// Pen half-width sqrt(l), so the band is wide in grid units yet thin in [0,1].
inline double sqrt_width(std::size_t l) { return std::sqrt(static_cast<double>(l)); }

struct LimitStep {
    std::size_t grid = 0;
    double width = 0.0;
    double deviation = 0.0;
};

struct LimitReport {
    std::vector<LimitStep> steps;
    bool decreasing = false;  // strictly, across the whole sequence
    bool improved = false;    // last deviation strictly below the first
};

inline std::vector<std::size_t> default_grids() { return {64, 128, 256, 512}; }

/// |(1/n)(sum log N_X - sum log N_Y) - (1/n) sum log f'(x_j)| per grid size.
inline LimitReport limit_consistency(const MonotoneFunction& f, const std::vector<double>& xs,
                                     const std::vector<std::size_t>& grids = default_grids(),
                                     const WidthRule& width = sqrt_width) {
    if (xs.empty()) throw ValidationError("limit consistency needs at least one sample");
    double target = 0.0;
    for (double x : xs) {
        const double d = f.derivative(x);
        if (!(d > 0.0)) throw DomainError("nonpositive derivative at x = " + std::to_string(x));
        target += std::log(d);
    }
    const double n = static_cast<double>(xs.size());
    target /= n;
    LimitReport out;
    for (std::size_t l : grids) {
        const double w = width(l);
        const FatPenRelation rel = fat_pen(f, l, w);
        const DiscreteScore s = discrete_pir_score(rel, snap_samples(f, xs, l));
        out.steps.push_back({l, w, std::abs((s.sum_log_nx - s.sum_log_ny) / n - target)});
    }
    out.decreasing = true;
    for (std::size_t k = 1; k < out.steps.size(); ++k)
        if (!(out.steps[k].deviation < out.steps[k - 1].deviation)) out.decreasing = false;
    out.improved = out.steps.size() >= 2 && out.steps.back().deviation < out.steps.front().deviation;
    return out;
}

}  // namespace cpir::igci
