#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpir/constraint.hpp"
#include "cpir/dag.hpp"
#include "cpir/detail/barrier.hpp"
#include "cpir/detail/markov_search.hpp"
#include "cpir/entropy.hpp"
#include "cpir/maxent.hpp"
#include "cpir/pir.hpp"

namespace cpir::causal {

/// Over which completions the existence of later conditionals is checked.
enum class FeasibilityScope { general, markov };

enum class FitStatus { ok, infeasible, non_unique };

inline std::string to_string(FeasibilityScope s) { return s == FeasibilityScope::general ? "general" : "markov"; }

inline std::string to_string(FitStatus s) {
    switch (s) {
        case FitStatus::ok: return "ok";
        case FitStatus::infeasible: return "infeasible";
        case FitStatus::non_unique: return "non-unique";
    }
    return "unknown";
}

struct StepResult {
    std::string node;
    std::vector<std::string> parents;  // in domain order
    ConditionalTable conditional;      // P(node | parents)
    double conditional_entropy = 0.0;  // achieved H(node | parents), nats
    std::string solver;                // conditional-maxent, barrier or multistart
    int iterations = 0;
    std::vector<double> multipliers;   // final conditional-maxent step only
    std::size_t starts = 0;            // multistart only
    std::size_t feasible_starts = 0;
};

struct CausalFitResult {
    std::vector<std::string> order;
    FeasibilityScope scope = FeasibilityScope::general;
    FitStatus status = FitStatus::ok;
    std::size_t failed_step = 0;  // 1-based; set when infeasible
    std::vector<StepResult> steps;
    std::optional<ProbTable> joint;
    std::vector<double> residuals;
    double markov_residual = 0.0;
    std::vector<CausalFitResult> alternatives;  // one per maximizer when non-unique
};

struct Options {
    std::optional<std::vector<std::string>> order;
    FeasibilityScope scope = FeasibilityScope::general;
    unsigned seed = 0;
    std::size_t max_branches = 16;
    maxent::Options solver;
    detail::BarrierOptions barrier;
};

/// Largest conditional mutual information I(X_j ; ND_j \ PA_j | PA_j) over
/// the nodes; zero for a joint that is Markov relative to the graph.
inline double markov_residual(const ProbTable& joint, const Dag& dag) {
    double out = 0.0;
    for (const auto& node : dag.nodes()) {
        const auto others = dag.nondescendant_nonparents(node);
        if (others.empty()) continue;
        out = std::max(out, conditional_mutual_information(joint, {node}, others, dag.parents(node)));
    }
    return out;
}

namespace detail {

constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

// Everything a step needs about how the domain splits around node j.
struct StepLayout {
    std::vector<std::size_t> prefix;   // domain indices of earlier nodes, in order
    std::size_t node = 0;
    std::vector<std::size_t> parents;  // domain indices, domain order
    FiniteDomain prefix_domain;
    FiniteDomain parent_domain;
    std::size_t values = 0;
    std::vector<std::size_t> pre_of, pa_of, value_of;  // per domain point
    std::vector<std::size_t> pa_of_pre;                // per prefix point
};

inline StepLayout layout(const FiniteDomain& domain, const Dag& dag, const std::vector<std::string>& order,
                         std::size_t step) {
    StepLayout out;
    for (std::size_t i = 0; i < step; ++i) out.prefix.push_back(domain.index_of(order[i]));
    out.node = domain.index_of(order[step]);
    for (const auto& p : dag.parents(order[step])) out.parents.push_back(domain.index_of(p));
    std::sort(out.parents.begin(), out.parents.end());
    out.prefix_domain = domain.subdomain(std::span<const std::size_t>(out.prefix));
    out.parent_domain = domain.subdomain(std::span<const std::size_t>(out.parents));
    out.values = domain.cardinality(out.node);
    std::vector<std::size_t> rel;
    for (std::size_t p : out.parents)
        rel.push_back(static_cast<std::size_t>(std::find(out.prefix.begin(), out.prefix.end(), p) - out.prefix.begin()));
    out.pa_of_pre.resize(out.prefix_domain.size());
    for (std::size_t u = 0; u < out.prefix_domain.size(); ++u) out.pa_of_pre[u] = out.prefix_domain.project(u, rel);
    out.pre_of.resize(domain.size());
    out.pa_of.resize(domain.size());
    out.value_of.resize(domain.size());
    for (std::size_t x = 0; x < domain.size(); ++x) {
        out.pre_of[x] = domain.project(x, out.prefix);
        out.pa_of[x] = domain.project(x, out.parents);
        out.value_of[x] = domain.digit(x, out.node);
    }
    return out;
}

inline std::vector<double> row_weights(const StepLayout& lay, const std::vector<double>& prev) {
    std::vector<double> w(lay.parent_domain.size(), 0.0);
    for (std::size_t u = 0; u < prev.size(); ++u) w[lay.pa_of_pre[u]] += prev[u];
    return w;
}

inline double weighted_entropy(const std::vector<double>& rows, const std::vector<double>& w, std::size_t cols) {
    double h = 0.0;
    for (std::size_t r = 0; r < w.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double q = rows[r * cols + c];
            if (q > 0.0) h -= w[r] * q * std::log(q);
        }
    return h;
}

// Extends the prefix marginal by the new node's conditional.
inline std::vector<double> extend(const StepLayout& lay, const std::vector<double>& prev,
                                  const std::vector<double>& rows) {
    std::vector<double> out(prev.size() * lay.values);
    for (std::size_t u = 0; u < prev.size(); ++u)
        for (std::size_t v = 0; v < lay.values; ++v)
            out[u * lay.values + v] = prev[u] * rows[lay.pa_of_pre[u] * lay.values + v];
    return out;
}

struct StepOutcome {
    bool feasible = false;
    std::vector<std::vector<double>> rows;  // one conditional per maximizer
    StepResult meta;
};

// General-joint scope: maximize the weighted entropy of q over pairs (q, p)
// with p any joint satisfying the constraints whose prefix-and-node marginal
// equals prev * q.
inline StepOutcome general_step(const FiniteDomain& domain, const std::vector<LinearConstraint>& constraints,
                                const StepLayout& lay, const std::vector<double>& prev, const Options& opt) {
    const std::size_t C = lay.values;
    const auto w = row_weights(lay, prev);
    std::vector<std::size_t> row_of(w.size(), kNoRow);
    std::size_t R = 0;
    for (std::size_t r = 0; r < w.size(); ++r)
        if (w[r] > 0.0) row_of[r] = R++;
    const std::size_t nq = R * C;
    const std::size_t n = nq + domain.size();

    cpir::detail::PolytopeSystem sys;
    sys.num_vars = n;
    std::vector<cpir::detail::SparseRow> block(prev.size() * C);
    for (std::size_t x = 0; x < domain.size(); ++x)
        block[lay.pre_of[x] * C + lay.value_of[x]].emplace_back(nq + x, 1.0);
    for (std::size_t u = 0; u < prev.size(); ++u)
        for (std::size_t v = 0; v < C; ++v) {
            auto row = block[u * C + v];
            if (prev[u] > 0.0) row.emplace_back(row_of[lay.pa_of_pre[u]] * C + v, -prev[u]);
            sys.add_equality(std::move(row), 0.0);
        }
    for (std::size_t r = 0; r < R; ++r) {
        cpir::detail::SparseRow row;
        for (std::size_t v = 0; v < C; ++v) row.emplace_back(r * C + v, 1.0);
        sys.add_equality(std::move(row), 1.0);
    }
    for (const auto& c : constraints) {
        cpir::detail::SparseRow row;
        for (std::size_t x = 0; x < domain.size(); ++x)
            if (c.f[x] != 0.0) row.emplace_back(nq + x, c.f[x]);
        sys.add_soft(std::move(row), c.target, c.epsilon);
    }

    StepOutcome out;
    out.meta.solver = "barrier";
    const auto nearest = cpir::detail::nearest_targets(sys);
    if (!nearest) return out;
    const auto face = cpir::detail::minimal_face(sys, nearest->targets);
    if (!face) return out;
    out.feasible = true;

    cpir::detail::BarrierProblem bp;
    bp.num_vars = n;
    bp.equalities = sys.equalities;
    bp.rhs = sys.equality_rhs;
    for (std::size_t k = 0; k < sys.soft.size(); ++k) {
        bp.equalities.push_back(sys.soft[k]);
        bp.rhs.push_back(nearest->targets[k]);
    }
    bp.weight.assign(n, 0.0);
    for (std::size_t r = 0; r < w.size(); ++r)
        if (row_of[r] != kNoRow)
            for (std::size_t v = 0; v < C; ++v) bp.weight[row_of[r] * C + v] = w[r];
    bp.free = face->free;
    bp.start = face->interior;
    const auto res = cpir::detail::solve_barrier(bp, opt.barrier);
    out.meta.iterations = res.newton_steps;

    std::vector<double> rows(w.size() * C, 1.0 / static_cast<double>(C));
    for (std::size_t r = 0; r < w.size(); ++r) {
        if (row_of[r] == kNoRow) continue;
        double total = 0.0;
        for (std::size_t v = 0; v < C; ++v) total += res.z[row_of[r] * C + v];
        for (std::size_t v = 0; v < C; ++v) rows[r * C + v] = res.z[row_of[r] * C + v] / total;
    }
    out.rows.push_back(std::move(rows));
    return out;
}

// Markov-respecting scope: later nodes must be completed by their own
// conditionals given their parents.
inline StepOutcome markov_step(const FiniteDomain& domain, const std::vector<LinearConstraint>& constraints,
                               const Dag& dag, const std::vector<std::string>& order, std::size_t step,
                               const StepLayout& lay, const std::vector<double>& prev, const Options& opt) {
    const std::size_t C = lay.values;
    cpir::detail::ProductProblem prob;
    prob.base.resize(domain.size());
    for (std::size_t x = 0; x < domain.size(); ++x) prob.base[x] = prev[lay.pre_of[x]];
    prob.row_weight = row_weights(lay, prev);
    cpir::detail::FactorBlock first;
    first.rows = lay.parent_domain.size();
    first.cols = C;
    first.cell.resize(domain.size());
    for (std::size_t x = 0; x < domain.size(); ++x) first.cell[x] = lay.pa_of[x] * C + lay.value_of[x];
    prob.blocks.push_back(std::move(first));
    for (std::size_t k = step + 1; k < order.size(); ++k) {
        const std::size_t node = domain.index_of(order[k]);
        std::vector<std::size_t> pa;
        for (const auto& p : dag.parents(order[k])) pa.push_back(domain.index_of(p));
        std::sort(pa.begin(), pa.end());
        cpir::detail::FactorBlock b;
        b.cols = domain.cardinality(node);
        b.rows = domain.subdomain(std::span<const std::size_t>(pa)).size();
        b.cell.resize(domain.size());
        for (std::size_t x = 0; x < domain.size(); ++x) b.cell[x] = domain.project(x, pa) * b.cols + domain.digit(x, node);
        prob.blocks.push_back(std::move(b));
    }
    for (const auto& c : constraints) {
        prob.f.push_back(c.f);
        prob.targets.push_back(c.target);
        prob.epsilons.push_back(c.epsilon);
    }
    cpir::detail::SearchOptions so;
    so.seed = opt.seed;
    const auto res = cpir::detail::ProductSearch(prob).run(so);

    StepOutcome out;
    out.meta.solver = "multistart";
    out.meta.starts = res.starts;
    out.meta.feasible_starts = res.feasible_starts;
    for (const auto& cand : res.optima) {
        auto rows = cand.first;
        for (std::size_t r = 0; r < prob.row_weight.size(); ++r)
            if (prob.row_weight[r] <= 0.0)
                for (std::size_t v = 0; v < C; ++v) rows[r * C + v] = 1.0 / static_cast<double>(C);
        out.rows.push_back(std::move(rows));
    }
    out.feasible = !out.rows.empty();
    return out;
}

struct Runner {
    const FiniteDomain& domain;
    const std::vector<LinearConstraint>& constraints;
    const Dag& dag;
    const std::vector<std::string>& order;
    const Options& opt;
    std::size_t branches = 1;

    StepResult describe(const StepLayout& lay, std::vector<double> rows, const std::vector<double>& prev,
                        StepResult meta) const {
        meta.node = domain.variable(lay.node).name;
        for (std::size_t p : lay.parents) meta.parents.push_back(domain.variable(p).name);
        meta.conditional_entropy = weighted_entropy(rows, row_weights(lay, prev), lay.values);
        meta.conditional = ConditionalTable(lay.parent_domain, domain.subdomain(std::vector<std::size_t>{lay.node}),
                                            std::move(rows));
        return meta;
    }

    CausalFitResult run(std::size_t step, std::vector<double> prev, std::vector<StepResult> steps) {
        CausalFitResult out;
        out.order = order;
        out.scope = opt.scope;
        const StepLayout lay = layout(domain, dag, order, step);
        const bool last = step + 1 == order.size();

        if (last) {
            maxent::ConditionalOptions copt;
            static_cast<maxent::Options&>(copt) = opt.solver;
            copt.parents = std::vector<std::string>{};
            for (std::size_t p : lay.parents) copt.parents->push_back(domain.variable(p).name);
            const ProbTable given(lay.prefix_domain, prev);
            const auto sol = maxent::conditional(domain, constraints, given, copt);
            if (sol.solution.status == maxent::Status::infeasible) {
                out.status = FitStatus::infeasible;
                out.failed_step = step + 1;
                out.steps = std::move(steps);
                return out;
            }
            StepResult meta;
            meta.solver = "conditional-maxent";
            meta.iterations = sol.solution.iterations;
            meta.multipliers = sol.solution.multipliers;
            steps.push_back(describe(lay, sol.conditional.rows(), prev, std::move(meta)));
            out.steps = std::move(steps);
            out.joint = sol.solution.distribution;
            out.residuals = sol.solution.residuals;
            out.markov_residual = markov_residual(*out.joint, dag);
            return out;
        }

        StepOutcome so = opt.scope == FeasibilityScope::general
                             ? general_step(domain, constraints, lay, prev, opt)
                             : markov_step(domain, constraints, dag, order, step, lay, prev, opt);
        if (!so.feasible) {
            out.status = FitStatus::infeasible;
            out.failed_step = step + 1;
            out.steps = std::move(steps);
            return out;
        }
        if (so.rows.size() == 1) {
            auto next = extend(lay, prev, so.rows.front());
            steps.push_back(describe(lay, std::move(so.rows.front()), prev, so.meta));
            return run(step + 1, std::move(next), std::move(steps));
        }
        out.status = FitStatus::non_unique;
        out.steps = steps;
        branches += so.rows.size() - 1;
        if (branches > opt.max_branches)
            throw SizeError("more than " + std::to_string(opt.max_branches) + " alternative solutions");
        for (auto& rows : so.rows) {
            auto next = extend(lay, prev, rows);
            auto branch_steps = steps;
            branch_steps.push_back(describe(lay, std::move(rows), prev, so.meta));
            out.alternatives.push_back(run(step + 1, std::move(next), std::move(branch_steps)));
        }
        return out;
    }
};

}  // namespace detail

/// Sequential entropy maximization along a topological order: each node's
/// conditional given its parents maximizes H(X_j | PA_j) with earlier
/// conditionals fixed and later ones required to exist.
inline CausalFitResult causal_maxent_dag(const FiniteDomain& domain, const std::vector<LinearConstraint>& constraints,
                                         const Dag& dag, const Options& opt = {}) {
    maxent::detail::check_constraints(domain, constraints);
    auto names = variable_names(domain);
    auto nodes = dag.nodes();
    std::sort(names.begin(), names.end());
    std::sort(nodes.begin(), nodes.end());
    if (names != nodes) throw DomainError("graph nodes must be exactly the domain variables");
    const std::vector<std::string> order = opt.order ? *opt.order : dag.default_order();
    if (!dag.is_topological(order)) throw DomainError("order is not topological for the graph");
    detail::Runner runner{domain, constraints, dag, order, opt};
    return runner.run(0, std::vector<double>{1.0}, {});
}

/// Two-stage form: maximize H(cause), then H(effect | cause).
inline CausalFitResult causal_maxent_bivariate(const FiniteDomain& domain,
                                               const std::vector<LinearConstraint>& constraints,
                                               const std::string& cause, Options opt = {}) {
    if (domain.rank() != 2) throw DomainError("bivariate causal MaxEnt needs exactly two variables");
    const auto names = variable_names(domain);
    const std::size_t c = domain.index_of(cause);
    const std::string effect = names[1 - c];
    const Dag dag({cause, effect}, {{cause, effect}});
    opt.order = std::vector<std::string>{cause, effect};
    return causal_maxent_dag(domain, constraints, dag, opt);
}

struct OrderSensitivity {
    std::vector<std::vector<std::string>> orders;
    std::vector<CausalFitResult> results;
    double max_total_variation = 0.0;  // over pairs of orders that both produced a joint
};

inline OrderSensitivity order_sensitivity(const FiniteDomain& domain, const std::vector<LinearConstraint>& constraints,
                                          const Dag& dag, Options opt = {}, std::size_t cap = 5040) {
    OrderSensitivity out;
    out.orders = dag.topological_orders(cap);
    for (const auto& order : out.orders) {
        opt.order = order;
        out.results.push_back(causal_maxent_dag(domain, constraints, dag, opt));
    }
    for (std::size_t i = 0; i < out.results.size(); ++i)
        for (std::size_t j = i + 1; j < out.results.size(); ++j)
            if (out.results[i].joint && out.results[j].joint)
                out.max_total_variation =
                    std::max(out.max_total_variation, total_variation(*out.results[i].joint, *out.results[j].joint));
    return out;
}

/// Previous output, switch and next output of the ball device over time:
/// with the switch on, the pair of outputs must be admissible for the
/// device; with it off, any pair is possible.
struct TimeseriesComparison {
    Relation relation;
    std::size_t admissible = 0;
    ExactTable uniform_joint;
    ExactTable uniform_marginal;     // P(Y_prev) under uniform over admissible triples
    ExactTable sequential_joint;
    ExactTable sequential_marginal;  // P(Y_prev) when Y_prev and the switch are chosen first
};

inline TimeseriesComparison appendix_timeseries_compare() {
    TimeseriesComparison out;
    const std::vector<std::string> y = {"1", "2", "3"};
    FiniteDomain domain({{"Y_prev", y}, {"Y_t", y}, {"X_t", {"0", "1"}}});
    const Relation device = pir::device_relation();
    out.relation = Relation::where(domain, [&](const Point& p) {
        if (p[2] == 0) return true;
        return device.contains(Point{p[0], p[1]});
    });
    out.admissible = out.relation.size();
    out.uniform_joint = pir::symmetric_pir_joint(out.relation);
    out.uniform_marginal = marginalize(out.uniform_joint, {"Y_prev"});
    out.sequential_joint = pir::causal_pir_joint(out.relation, std::vector<std::string>{"Y_prev", "X_t"});
    out.sequential_marginal = marginalize(out.sequential_joint, {"Y_prev"});
    return out;
}

}  // namespace cpir::causal
