#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpir/constraint.hpp"
#include "cpir/detail/projection.hpp"
#include "cpir/detail/rowwise.hpp"
#include "cpir/entropy.hpp"
#include "cpir/table.hpp"

namespace cpir::maxent {

enum class Status { converged, max_iters, infeasible };

inline std::string to_string(Status s) {
    switch (s) {
        case Status::converged: return "converged";
        case Status::max_iters: return "max-iters";
        case Status::infeasible: return "infeasible";
    }
    return "unknown";
}

/// Squared hinge residuals below this count as satisfied.
inline constexpr double kFeasibilityThreshold = 1e-16;

struct FeasibilityReport {
    bool feasible = false;
    std::optional<ProbTable> witness;
    double min_squared_residual = 0.0;
    ProbTable closest;  // minimizer of the squared hinge residual
};

struct Options {
    double gradient_tolerance = 1e-10;
    int max_iterations = 500;
    double condition_limit = 1e12;
    double rank_tolerance = 1e-10;
    double residual_tolerance = 1e-8;
};

struct MaxEntSolution {
    ProbTable distribution;
    std::vector<double> multipliers;
    std::vector<double> log_partition;  // log Z per row; a single entry for plain MaxEnt
    double dual_objective = 0.0;
    std::vector<double> residuals;
    std::vector<std::string> dropped;   // constraint ids found linearly dependent
    int iterations = 0;
    Status status = Status::infeasible;
    std::optional<FeasibilityReport> feasibility;

    double max_residual() const {
        double out = 0.0;
        for (double r : residuals) out = std::max(out, r);
        return out;
    }
};

struct ConditionalSolution {
    ConditionalTable conditional;  // P(target | parents)
    MaxEntSolution solution;       // distribution holds the joint p(given) q(target | parents)
};

namespace detail {

inline void check_constraints(const FiniteDomain& domain, const std::vector<LinearConstraint>& constraints) {
    for (const auto& c : constraints) {
        c.validate();
        if (!(c.domain == domain)) throw DomainError("constraint '" + c.id + "' is defined on another domain");
    }
}

inline double squared_hinge(const std::vector<LinearConstraint>& constraints, std::span<const double> p,
                            std::vector<double>* gradient) {
    double out = 0.0;
    if (gradient) std::fill(gradient->begin(), gradient->end(), 0.0);
    for (const auto& c : constraints) {
        double e = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * c.f[i];
        const double dev = e - c.target;
        const double h = std::max(0.0, std::abs(dev) - c.epsilon);
        out += h * h;
        if (gradient && h > 0.0) {
            const double s = 2.0 * h * (dev > 0 ? 1.0 : -1.0);
            for (std::size_t i = 0; i < p.size(); ++i) (*gradient)[i] += s * c.f[i];
        }
    }
    return out;
}

// Accelerated projected gradient on the simplex for the squared hinge residual.
inline std::vector<double> minimize_hinge(const std::vector<LinearConstraint>& constraints, std::vector<double> p,
                                          int max_iterations = 20000) {
    double lipschitz = 0.0;
    for (const auto& c : constraints) {
        double norm2 = 0.0;
        for (double v : c.f) norm2 += v * v;
        lipschitz += 2.0 * norm2;
    }
    if (lipschitz == 0.0) return p;
    const double step = 1.0 / lipschitz;
    std::vector<double> y = p;
    std::vector<double> next(p.size());
    std::vector<double> grad(p.size());
    double t = 1.0;
    double value = squared_hinge(constraints, p, nullptr);
    for (int it = 0; it < max_iterations && value > 0.0; ++it) {
        squared_hinge(constraints, y, &grad);
        for (std::size_t i = 0; i < p.size(); ++i) next[i] = y[i] - step * grad[i];
        cpir::detail::project_to_simplex(next);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < p.size(); ++i) y[i] = next[i] + ((t - 1.0) / t_next) * (next[i] - p[i]);
        const double next_value = squared_hinge(constraints, next, nullptr);
        const double improvement = value - next_value;
        p = next;
        value = next_value;
        t = t_next;
        if (improvement >= 0.0 && improvement < 1e-20) break;
    }
    return p;
}

}  // namespace detail

/// Decides whether some distribution satisfies every constraint within its
/// tolerance. A linear program provides the witness; when none exists the
/// squared hinge residual is minimized over the simplex.
inline FeasibilityReport feasibility(const FiniteDomain& domain, const std::vector<LinearConstraint>& constraints) {
    detail::check_constraints(domain, constraints);
    cpir::detail::PolytopeSystem sys;
    sys.num_vars = domain.size();
    cpir::detail::SparseRow ones;
    for (std::size_t i = 0; i < domain.size(); ++i) ones.emplace_back(i, 1.0);
    sys.add_equality(std::move(ones), 1.0);
    for (const auto& c : constraints) {
        cpir::detail::SparseRow row;
        for (std::size_t i = 0; i < c.f.size(); ++i)
            if (c.f[i] != 0.0) row.emplace_back(i, c.f[i]);
        sys.add_soft(std::move(row), c.target, c.epsilon);
    }
    FeasibilityReport report;
    std::vector<double> p(domain.size(), 1.0 / static_cast<double>(domain.size()));
    if (const auto nearest = cpir::detail::nearest_targets(sys)) {
        p = nearest->witness;
        cpir::detail::project_to_simplex(p);
    }
    if (detail::squared_hinge(constraints, p, nullptr) > kFeasibilityThreshold) p = detail::minimize_hinge(constraints, p);
    report.min_squared_residual = detail::squared_hinge(constraints, p, nullptr);
    report.closest = ProbTable::normalized(domain, p);
    report.feasible = report.min_squared_residual <= kFeasibilityThreshold;
    if (report.feasible) report.witness = report.closest;
    return report;
}

/// Entropy maximizer subject to linear expectation constraints.
inline MaxEntSolution solve(const FiniteDomain& domain, const std::vector<LinearConstraint>& constraints,
                            const Options& opt = {}) {
    detail::check_constraints(domain, constraints);
    cpir::detail::RowwiseProblem prob;
    prob.rows = 1;
    prob.cols = domain.size();
    prob.weights = {1.0};
    for (const auto& c : constraints) {
        prob.features.push_back(c.f);
        prob.targets.push_back(c.target);
        prob.epsilons.push_back(c.epsilon);
    }
    const auto res = cpir::detail::solve_rowwise(
        prob, {opt.gradient_tolerance, opt.max_iterations, opt.condition_limit, opt.rank_tolerance});

    MaxEntSolution out;
    if (!res.feasible) {
        out.status = Status::infeasible;
        out.feasibility = feasibility(domain, constraints);
        out.distribution = out.feasibility->closest;
    } else {
        out.distribution = ProbTable::normalized(domain, res.q);
        out.multipliers = res.multipliers;
        out.log_partition = res.log_partition;
        out.dual_objective = res.dual_objective;
        out.iterations = res.iterations;
        for (std::size_t k = 0; k < constraints.size(); ++k)
            if (res.dropped[k]) out.dropped.push_back(constraints[k].id);
    }
    bool within = true;
    for (const auto& c : constraints) {
        out.residuals.push_back(c.residual(out.distribution));
        within = within && out.residuals.back() <= c.epsilon + opt.residual_tolerance;
    }
    if (res.feasible) out.status = res.converged && within ? Status::converged : Status::max_iters;
    return out;
}

struct ConditionalOptions : Options {
    /// Variables the conditional may depend on; defaults to every variable of
    /// the fixed marginal.
    std::optional<std::vector<std::string>> parents;
};

/// Maximizes sum_g p(g) H(q(. | pa(g))) over conditionals q of the remaining
/// variables, with p the fixed marginal over the given variables. Rows whose
/// parent configuration has zero mass are uniform.
inline ConditionalSolution conditional(const FiniteDomain& domain, const std::vector<LinearConstraint>& constraints,
                                       const ProbTable& given, const ConditionalOptions& opt = {}) {
    detail::check_constraints(domain, constraints);
    const auto given_names = variable_names(given.domain());
    const auto gi = domain.indices_of(given_names);
    for (std::size_t k = 0; k < gi.size(); ++k)
        if (!(domain.variable(gi[k]) == given.domain().variable(k)))
            throw DomainError("marginal variable '" + given_names[k] + "' differs from the joint domain");
    std::vector<std::size_t> ti;
    for (std::size_t v = 0; v < domain.rank(); ++v)
        if (std::find(gi.begin(), gi.end(), v) == gi.end()) ti.push_back(v);
    if (ti.empty()) throw DomainError("conditional MaxEnt needs at least one free variable");
    const std::vector<std::string> parent_names = opt.parents ? *opt.parents : given_names;
    const auto pi = domain.indices_of(parent_names);
    for (std::size_t v : pi)
        if (std::find(gi.begin(), gi.end(), v) == gi.end())
            throw DomainError("parent '" + domain.variable(v).name + "' is not in the fixed marginal");

    const FiniteDomain target = domain.subdomain(std::span<const std::size_t>(ti));
    const FiniteDomain parents = domain.subdomain(std::span<const std::size_t>(pi));
    const std::size_t C = target.size();

    std::vector<double> row_mass(parents.size(), 0.0);
    std::vector<std::size_t> g_of(domain.size()), t_of(domain.size()), pa_of(domain.size());
    for (std::size_t x = 0; x < domain.size(); ++x) {
        g_of[x] = domain.project(x, gi);
        t_of[x] = domain.project(x, ti);
        pa_of[x] = domain.project(x, pi);
    }
    const FiniteDomain gdom = domain.subdomain(std::span<const std::size_t>(gi));
    std::vector<std::size_t> pa_of_g(gdom.size());
    {
        std::vector<std::size_t> rel(pi.size());
        for (std::size_t k = 0; k < pi.size(); ++k)
            rel[k] = static_cast<std::size_t>(std::find(gi.begin(), gi.end(), pi[k]) - gi.begin());
        for (std::size_t g = 0; g < gdom.size(); ++g) {
            pa_of_g[g] = gdom.project(g, rel);
            row_mass[pa_of_g[g]] += given[g];
        }
    }
    std::vector<std::size_t> active;
    std::vector<std::size_t> row_of(parents.size(), static_cast<std::size_t>(-1));
    for (std::size_t r = 0; r < parents.size(); ++r)
        if (row_mass[r] > 0.0) {
            row_of[r] = active.size();
            active.push_back(r);
        }

    cpir::detail::RowwiseProblem prob;
    prob.rows = active.size();
    prob.cols = C;
    for (std::size_t r : active) prob.weights.push_back(row_mass[r]);
    for (const auto& c : constraints) {
        std::vector<double> F(prob.rows * C, 0.0);
        for (std::size_t x = 0; x < domain.size(); ++x) {
            const std::size_t r = row_of[pa_of[x]];
            if (r == static_cast<std::size_t>(-1)) continue;
            const double wg = given[g_of[x]];
            if (wg == 0.0) continue;
            F[r * C + t_of[x]] += wg / row_mass[pa_of[x]] * c.f[x];
        }
        prob.features.push_back(std::move(F));
        prob.targets.push_back(c.target);
        prob.epsilons.push_back(c.epsilon);
    }
    const auto res = cpir::detail::solve_rowwise(
        prob, {opt.gradient_tolerance, opt.max_iterations, opt.condition_limit, opt.rank_tolerance});

    ConditionalSolution out;
    MaxEntSolution& sol = out.solution;
    std::vector<double> rows(parents.size() * C, 1.0 / static_cast<double>(C));
    sol.log_partition.assign(parents.size(), std::log(static_cast<double>(C)));
    if (res.feasible) {
        for (std::size_t a = 0; a < active.size(); ++a) {
            double total = 0.0;
            for (std::size_t t = 0; t < C; ++t) total += res.q[a * C + t];
            for (std::size_t t = 0; t < C; ++t) rows[active[a] * C + t] = res.q[a * C + t] / total;
            sol.log_partition[active[a]] = res.log_partition[a];
        }
        sol.multipliers = res.multipliers;
        sol.dual_objective = res.dual_objective;
        sol.iterations = res.iterations;
        for (std::size_t k = 0; k < constraints.size(); ++k)
            if (res.dropped[k]) sol.dropped.push_back(constraints[k].id);
    } else {
        sol.multipliers.assign(constraints.size(), 0.0);
    }
    out.conditional = ConditionalTable(parents, target, rows);
    std::vector<double> joint(domain.size());
    for (std::size_t x = 0; x < domain.size(); ++x) joint[x] = given[g_of[x]] * rows[pa_of[x] * C + t_of[x]];
    sol.distribution = ProbTable::normalized(domain, std::move(joint));
    bool within = true;
    for (const auto& c : constraints) {
        sol.residuals.push_back(c.residual(sol.distribution));
        within = within && sol.residuals.back() <= c.epsilon + opt.residual_tolerance;
    }
    if (!res.feasible) sol.status = Status::infeasible;
    else sol.status = res.converged && within ? Status::converged : Status::max_iters;
    return out;
}

}  // namespace cpir::maxent
