#pragma once

// Dense two-phase tableau simplex for the small feasibility and facial
// reduction programs built by the solvers. Minimizes c.x subject to row
// constraints and x >= 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace cpir::lp {

enum class Sense { less_equal, equal, greater_equal };

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Result {
    Status status = Status::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

class LinearProgram {
public:
    explicit LinearProgram(std::size_t num_vars) : num_vars_(num_vars), objective_(num_vars, 0.0) {}

    std::size_t num_vars() const noexcept { return num_vars_; }
    std::size_t num_rows() const noexcept { return rows_.size(); }

    void set_objective(std::vector<double> c) {
        c.resize(num_vars_, 0.0);
        objective_ = std::move(c);
    }
    void set_objective_coefficient(std::size_t var, double value) { objective_.at(var) = value; }

    /// Sparse row: (variable, coefficient) pairs.
    void add_row(std::vector<std::pair<std::size_t, double>> terms, Sense sense, double rhs) {
        rows_.push_back(Row{std::move(terms), sense, rhs});
    }

    void add_dense_row(const std::vector<double>& coeffs, Sense sense, double rhs) {
        std::vector<std::pair<std::size_t, double>> terms;
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            if (coeffs[j] != 0.0) terms.emplace_back(j, coeffs[j]);
        add_row(std::move(terms), sense, rhs);
    }

    Result solve(double tol = 1e-9, std::size_t max_pivots = 200000) const;

private:
    struct Row {
        std::vector<std::pair<std::size_t, double>> terms;
        Sense sense;
        double rhs;
    };

    std::size_t num_vars_;
    std::vector<double> objective_;
    std::vector<Row> rows_;
};

namespace detail {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double& cost(std::size_t j) { return at(m_, j); }

    std::size_t rows() const noexcept { return m_; }
    std::size_t cols() const noexcept { return n_; }

    void pivot(std::size_t r, std::size_t c) {
        const double inv = 1.0 / at(r, c);
        for (std::size_t j = 0; j <= n_; ++j) at(r, j) *= inv;
        at(r, c) = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double factor = at(i, c);
            if (factor == 0.0) continue;
            double* dst = &data_[i * (n_ + 1)];
            const double* src = &data_[r * (n_ + 1)];
            for (std::size_t j = 0; j <= n_; ++j) dst[j] -= factor * src[j];
            dst[c] = 0.0;
        }
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> data_;
};

// Runs simplex iterations on the cost row over the allowed columns.
inline Status iterate(Tableau& t, std::vector<std::size_t>& basis, const std::vector<bool>& allowed, double tol,
                      std::size_t max_pivots, std::size_t& pivots) {
    std::size_t degenerate_run = 0;
    while (pivots < max_pivots) {
        const bool bland = degenerate_run > 50;
        std::size_t enter = t.cols();
        double best = -tol;
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (!allowed[j]) continue;
            const double d = t.cost(j);
            if (d < best) {
                enter = j;
                if (bland) break;
                best = d;
            }
        }
        if (enter == t.cols()) return Status::optimal;

        std::size_t leave = t.rows();
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= tol) continue;
            const double r = std::max(t.rhs(i), 0.0) / a;
            if (leave == t.rows() || r < ratio - 1e-12 ||
                (std::abs(r - ratio) <= 1e-12 && basis[i] < basis[leave])) {
                ratio = r;
                leave = i;
            }
        }
        if (leave == t.rows()) return Status::unbounded;
        degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
        t.pivot(leave, enter);
        basis[leave] = enter;
        ++pivots;
    }
    return Status::iteration_limit;
}

}  // namespace detail

inline Result LinearProgram::solve(double tol, std::size_t max_pivots) const {
    const std::size_t m = rows_.size();
    std::size_t num_slack = 0;
    std::size_t num_art = 0;
    std::vector<int> sign(m, 1);
    std::vector<Sense> senses(m);
    for (std::size_t i = 0; i < m; ++i) {
        Sense s = rows_[i].sense;
        if (rows_[i].rhs < 0) {
            sign[i] = -1;
            if (s == Sense::less_equal) s = Sense::greater_equal;
            else if (s == Sense::greater_equal) s = Sense::less_equal;
        }
        senses[i] = s;
        if (s != Sense::equal) ++num_slack;
        if (s != Sense::less_equal) ++num_art;
    }
    const std::size_t n = num_vars_ + num_slack + num_art;
    detail::Tableau t(m, n);
    std::vector<std::size_t> basis(m);
    std::size_t slack = num_vars_;
    std::size_t art = num_vars_ + num_slack;
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& [j, a] : rows_[i].terms) t.at(i, j) += sign[i] * a;
        t.rhs(i) = sign[i] * rows_[i].rhs;
        scale = std::max(scale, std::abs(t.rhs(i)));
        switch (senses[i]) {
            case Sense::less_equal:
                t.at(i, slack) = 1.0;
                basis[i] = slack++;
                break;
            case Sense::greater_equal:
                t.at(i, slack++) = -1.0;
                t.at(i, art) = 1.0;
                basis[i] = art++;
                break;
            case Sense::equal:
                t.at(i, art) = 1.0;
                basis[i] = art++;
                break;
        }
    }
    const std::size_t first_art = num_vars_ + num_slack;

    // Phase 1: minimize the sum of artificials.
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < first_art) continue;
        for (std::size_t j = 0; j <= n; ++j) t.at(m, j) -= t.at(i, j);
    }
    for (std::size_t j = first_art; j < n; ++j) t.cost(j) = 0.0;
    std::vector<bool> allowed(n, true);
    Result result;
    Status st = detail::iterate(t, basis, allowed, tol, max_pivots, result.pivots);
    if (st == Status::iteration_limit) {
        result.status = st;
        return result;
    }
    if (-t.at(m, n) > tol * scale * 10) {
        result.status = Status::infeasible;
        return result;
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    std::vector<bool> dead(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < first_art) continue;
        std::size_t col = n;
        double best = tol;
        for (std::size_t j = 0; j < first_art; ++j) {
            if (std::abs(t.at(i, j)) > best) {
                best = std::abs(t.at(i, j));
                col = j;
            }
        }
        if (col == n) {
            dead[i] = true;
            continue;
        }
        t.pivot(i, col);
        basis[i] = col;
    }
    for (std::size_t j = first_art; j < n; ++j) allowed[j] = false;
    for (std::size_t i = 0; i < m; ++i) {
        if (!dead[i]) continue;
        for (std::size_t j = 0; j <= n; ++j) t.at(i, j) = 0.0;
        // Keep the row inert: its basic artificial never leaves because no
        // allowed column has a positive entry here.
    }

    // Phase 2.
    for (std::size_t j = 0; j <= n; ++j) t.at(m, j) = 0.0;
    for (std::size_t j = 0; j < num_vars_; ++j) t.cost(j) = objective_[j];
    for (std::size_t i = 0; i < m; ++i) {
        if (dead[i]) continue;
        const std::size_t b = basis[i];
        const double cb = b < num_vars_ ? objective_[b] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= n; ++j) t.at(m, j) -= cb * t.at(i, j);
    }
    st = detail::iterate(t, basis, allowed, tol, max_pivots, result.pivots);
    result.status = st;
    if (st != Status::optimal) return result;
    result.x.assign(num_vars_, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (!dead[i] && basis[i] < num_vars_) result.x[basis[i]] = std::max(0.0, t.rhs(i));
    result.objective = 0.0;
    for (std::size_t j = 0; j < num_vars_; ++j) result.objective += objective_[j] * result.x[j];
    return result;
}

}  // namespace cpir::lp
