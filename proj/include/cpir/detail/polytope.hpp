#pragma once

// Feasibility, nearest-target and facial-reduction programs over
// { z >= 0 : E z = e, |A_k z - c_k| <= eps_k }.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "cpir/detail/simplex.hpp"

namespace cpir::detail {

using SparseRow = std::vector<std::pair<std::size_t, double>>;

struct PolytopeSystem {
    std::size_t num_vars = 0;
    std::vector<SparseRow> equalities;  // E
    std::vector<double> equality_rhs;   // e
    std::vector<SparseRow> soft;        // A
    std::vector<double> targets;        // c
    std::vector<double> epsilons;       // eps

    void add_equality(SparseRow row, double rhs) {
        equalities.push_back(std::move(row));
        equality_rhs.push_back(rhs);
    }
    void add_soft(SparseRow row, double target, double eps) {
        soft.push_back(std::move(row));
        targets.push_back(target);
        epsilons.push_back(eps);
    }
};

inline double row_dot(const SparseRow& row, const std::vector<double>& z) {
    double out = 0.0;
    for (const auto& [j, a] : row) out += a * z[j];
    return out;
}

struct NearestTargets {
    std::vector<double> targets;  // attained values A z of the witness
    std::vector<double> witness;  // z
    double excess = 0.0;          // largest violation beyond a band (numerical slack)
};

/// Excess beyond the tolerance bands accepted as round-off, for instance when
/// an earlier stage fixed a marginal that meets a constraint only to ~1e-10.
inline constexpr double kBandSlack = 1e-8;

/// Minimizes sum_k |A_k z - c_k| subject to the tolerance bands. When the
/// bands cannot be met, the smallest total excess is found instead and
/// accepted if every excess is below `slack`. Returns nothing otherwise.
inline std::optional<NearestTargets> nearest_targets(const PolytopeSystem& sys, double tol = 1e-9,
                                                     double slack = kBandSlack) {
    const std::size_t n = sys.num_vars;
    const std::size_t k = sys.soft.size();
    for (int pass = 0; pass < 2; ++pass) {
        const bool relaxed = pass == 1;
        const std::size_t per = relaxed ? 4 : 2;
        lp::LinearProgram lp(n + per * k);
        for (std::size_t i = 0; i < sys.equalities.size(); ++i)
            lp.add_row(sys.equalities[i], lp::Sense::equal, sys.equality_rhs[i]);
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t u = n + per * r;
            SparseRow row = sys.soft[r];
            row.emplace_back(u, -1.0);
            row.emplace_back(u + 1, 1.0);
            if (relaxed) {
                row.emplace_back(u + 2, -1.0);
                row.emplace_back(u + 3, 1.0);
                lp.set_objective_coefficient(u + 2, 1.0);
                lp.set_objective_coefficient(u + 3, 1.0);
            } else {
                lp.set_objective_coefficient(u, 1.0);
                lp.set_objective_coefficient(u + 1, 1.0);
            }
            lp.add_row(std::move(row), lp::Sense::equal, sys.targets[r]);
            lp.add_row({{u, 1.0}}, lp::Sense::less_equal, sys.epsilons[r]);
            lp.add_row({{u + 1, 1.0}}, lp::Sense::less_equal, sys.epsilons[r]);
        }
        const lp::Result res = lp.solve(tol);
        if (res.status != lp::Status::optimal) continue;
        NearestTargets out;
        out.witness.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t u = n + per * r;
            double dev = res.x[u] - res.x[u + 1];
            if (relaxed) {
                const double extra = res.x[u + 2] - res.x[u + 3];
                out.excess = std::max(out.excess, std::abs(extra));
                dev += extra;
            }
            out.targets.push_back(sys.targets[r] + dev);
        }
        if (out.excess > slack) return std::nullopt;
        return out;
    }
    return std::nullopt;
}

struct Face {
    std::vector<bool> free;             // coordinates positive for some feasible point
    std::vector<double> interior;       // a feasible point positive on every free coordinate
};

/// Identifies the minimal face of { z >= 0 : E z = e, A z = c } with one
/// homogenized program: maximize sum_i t_i with t_i <= z_i, t_i <= 1,
/// E z = e s, A z = c s, s >= 1. Every coordinate that is positive for some
/// feasible point reaches t_i = 1 after scaling, the rest stay at 0.
inline std::optional<Face> minimal_face(const PolytopeSystem& sys, const std::vector<double>& soft_targets,
                                        double tol = 1e-9) {
    const std::size_t n = sys.num_vars;
    const std::size_t s_var = n;
    const std::size_t t0 = n + 1;
    lp::LinearProgram lp(2 * n + 1);
    for (std::size_t i = 0; i < sys.equalities.size(); ++i) {
        SparseRow row = sys.equalities[i];
        if (sys.equality_rhs[i] != 0.0) row.emplace_back(s_var, -sys.equality_rhs[i]);
        lp.add_row(std::move(row), lp::Sense::equal, 0.0);
    }
    for (std::size_t r = 0; r < sys.soft.size(); ++r) {
        SparseRow row = sys.soft[r];
        if (soft_targets[r] != 0.0) row.emplace_back(s_var, -soft_targets[r]);
        lp.add_row(std::move(row), lp::Sense::equal, 0.0);
    }
    lp.add_row({{s_var, 1.0}}, lp::Sense::greater_equal, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        lp.add_row({{t0 + i, 1.0}, {i, -1.0}}, lp::Sense::less_equal, 0.0);
        lp.add_row({{t0 + i, 1.0}}, lp::Sense::less_equal, 1.0);
        lp.set_objective_coefficient(t0 + i, -1.0);
    }
    const lp::Result res = lp.solve(tol);
    if (res.status != lp::Status::optimal) return std::nullopt;
    Face face;
    face.free.assign(n, false);
    face.interior.assign(n, 0.0);
    const double s = res.x[s_var];
    for (std::size_t i = 0; i < n; ++i) {
        face.free[i] = res.x[t0 + i] > 0.5;
        face.interior[i] = face.free[i] ? res.x[i] / s : 0.0;
    }
    return face;
}

/// Greedy selection of linearly independent dense columns (modified
/// Gram-Schmidt with one reorthogonalization pass). Returns kept indices.
inline std::vector<std::size_t> independent_columns(const std::vector<std::vector<double>>& columns,
                                                    double rel_tol = 1e-10) {
    std::vector<std::vector<double>> basis;
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        std::vector<double> v = columns[c];
        double norm0 = 0.0;
        for (double x : v) norm0 += x * x;
        norm0 = std::sqrt(norm0);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * b[i];
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * b[i];
            }
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > rel_tol * std::max(1.0, norm0)) {
            for (double& x : v) x /= norm;
            basis.push_back(std::move(v));
            kept.push_back(c);
        }
    }
    return kept;
}

}  // namespace cpir::detail
