#pragma once

// Maximizes the weighted row entropy of the first conditional in a product
//   p(x) = base(x) * prod_b q_b(row_b(x), col_b(x))
// subject to |E_p[f_k] - c_k| <= eps_k, over row-stochastic q_b. The program
// is non-convex in general; it is attacked from many starts with an
// augmented Lagrangian whose subproblems are solved by spectral projected
// gradient on the product of simplices.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "cpir/detail/projection.hpp"

namespace cpir::detail {

struct FactorBlock {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> cell;  // row * cols + col, per domain point
    std::size_t offset = 0;
};

struct ProductProblem {
    std::vector<double> base;           // per domain point
    std::vector<FactorBlock> blocks;    // blocks[0] carries the objective
    std::vector<double> row_weight;     // per row of blocks[0]
    std::vector<std::vector<double>> f;
    std::vector<double> targets;
    std::vector<double> epsilons;
};

struct SearchOptions {
    unsigned seed = 0;
    std::size_t vertex_start_cap = 256;
    std::size_t vertex_max_values = 4;
    std::size_t random_starts = 64;
    double snap = 1e-5;
    double violation_tolerance = 1e-6;
    double objective_tolerance = 1e-6;
    double distinct_tolerance = 1e-4;
    int outer_iterations = 40;
    int inner_iterations = 3000;
};

struct SearchCandidate {
    std::vector<double> first;  // rows of blocks[0]
    double objective = 0.0;     // weighted entropy
};

struct SearchResult {
    std::vector<SearchCandidate> optima;  // distinct maximizers
    std::size_t starts = 0;
    std::size_t feasible_starts = 0;
};

class ProductSearch {
public:
    explicit ProductSearch(const ProductProblem& prob) : prob_(prob) {
        std::size_t off = 0;
        for (auto& b : prob_.blocks) {
            b.offset = off;
            off += b.rows * b.cols;
        }
        size_ = off;
    }

    std::size_t size() const noexcept { return size_; }

    std::vector<double> joint(const std::vector<double>& z) const {
        std::vector<double> p(prob_.base.size());
        for (std::size_t x = 0; x < p.size(); ++x) {
            double v = prob_.base[x];
            for (const auto& b : prob_.blocks) v *= z[b.offset + b.cell[x]];
            p[x] = v;
        }
        return p;
    }

    std::vector<double> deviations(const std::vector<double>& z) const {
        const auto p = joint(z);
        std::vector<double> g(prob_.f.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            double e = 0.0;
            for (std::size_t x = 0; x < p.size(); ++x) e += p[x] * prob_.f[k][x];
            g[k] = e - prob_.targets[k];
        }
        return g;
    }

    double violation(const std::vector<double>& z) const {
        double out = 0.0;
        const auto g = deviations(z);
        for (std::size_t k = 0; k < g.size(); ++k) out = std::max(out, std::abs(g[k]) - prob_.epsilons[k]);
        return std::max(out, 0.0);
    }

    double objective(const std::vector<double>& z) const {
        const auto& b = prob_.blocks[0];
        double h = 0.0;
        for (std::size_t r = 0; r < b.rows; ++r)
            for (std::size_t c = 0; c < b.cols; ++c) {
                const double q = z[b.offset + r * b.cols + c];
                if (q > 0.0) h -= prob_.row_weight[r] * q * std::log(q);
            }
        return h;
    }

    void project(std::vector<double>& z) const {
        for (const auto& b : prob_.blocks)
            for (std::size_t r = 0; r < b.rows; ++r)
                project_to_simplex(std::span<double>(z.data() + b.offset + r * b.cols, b.cols));
    }

    /// Augmented Lagrangian value and gradient for two-sided bands.
    double lagrangian(const std::vector<double>& z, const std::vector<double>& up, const std::vector<double>& lo,
                      double rho, std::vector<double>* grad) const {
        const auto& b0 = prob_.blocks[0];
        double val = -objective(z);
        const auto g = deviations(z);
        std::vector<double> coef(g.size(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double a = std::max(0.0, up[k] + rho * (g[k] - prob_.epsilons[k]));
            const double b = std::max(0.0, lo[k] + rho * (-g[k] - prob_.epsilons[k]));
            val += (a * a - up[k] * up[k]) / (2.0 * rho) + (b * b - lo[k] * lo[k]) / (2.0 * rho);
            coef[k] = a - b;
        }
        if (!grad) return val;
        grad->assign(size_, 0.0);
        for (std::size_t r = 0; r < b0.rows; ++r)
            for (std::size_t c = 0; c < b0.cols; ++c) {
                const std::size_t i = b0.offset + r * b0.cols + c;
                (*grad)[i] = prob_.row_weight[r] * (std::log(std::max(z[i], 1e-300)) + 1.0);
            }
        const std::size_t nb = prob_.blocks.size();
        std::vector<double> factors(nb), prefix(nb + 1), suffix(nb + 1);
        for (std::size_t x = 0; x < prob_.base.size(); ++x) {
            if (prob_.base[x] == 0.0) continue;
            double s = 0.0;
            for (std::size_t k = 0; k < coef.size(); ++k) s += coef[k] * prob_.f[k][x];
            if (s == 0.0) continue;
            for (std::size_t b = 0; b < nb; ++b) factors[b] = z[prob_.blocks[b].offset + prob_.blocks[b].cell[x]];
            prefix[0] = prob_.base[x];
            for (std::size_t b = 0; b < nb; ++b) prefix[b + 1] = prefix[b] * factors[b];
            suffix[nb] = 1.0;
            for (std::size_t b = nb; b-- > 0;) suffix[b] = suffix[b + 1] * factors[b];
            for (std::size_t b = 0; b < nb; ++b)
                (*grad)[prob_.blocks[b].offset + prob_.blocks[b].cell[x]] += s * prefix[b] * suffix[b + 1];
        }
        return val;
    }

    /// Spectral projected gradient with a nonmonotone Armijo search.
    void minimize(std::vector<double>& z, const std::vector<double>& up, const std::vector<double>& lo, double rho,
                  int max_iterations) const {
        project(z);
        std::vector<double> grad, next(size_), next_grad, d(size_), trial(size_);
        double val = lagrangian(z, up, lo, rho, &grad);
        std::deque<double> history = {val};
        double alpha = 1.0;
        for (int it = 0; it < max_iterations; ++it) {
            for (std::size_t i = 0; i < size_; ++i) trial[i] = z[i] - grad[i];
            project(trial);
            double stationarity = 0.0;
            for (std::size_t i = 0; i < size_; ++i) stationarity = std::max(stationarity, std::abs(trial[i] - z[i]));
            if (stationarity < 1e-11) break;
            for (std::size_t i = 0; i < size_; ++i) trial[i] = z[i] - alpha * grad[i];
            project(trial);
            double slope = 0.0;
            for (std::size_t i = 0; i < size_; ++i) {
                d[i] = trial[i] - z[i];
                slope += grad[i] * d[i];
            }
            const double ref = *std::max_element(history.begin(), history.end());
            double lambda = 1.0;
            double next_val = 0.0;
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t i = 0; i < size_; ++i) next[i] = z[i] + lambda * d[i];
                next_val = lagrangian(next, up, lo, rho, nullptr);
                if (next_val <= ref + 1e-4 * lambda * slope) break;
                lambda *= 0.5;
            }
            lagrangian(next, up, lo, rho, &next_grad);
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < size_; ++i) {
                const double s = next[i] - z[i];
                ss += s * s;
                sy += s * (next_grad[i] - grad[i]);
            }
            alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e12;
            z.swap(next);
            grad.swap(next_grad);
            val = next_val;
            history.push_back(val);
            if (history.size() > 10) history.pop_front();
            if (ss < 1e-30) break;
        }
    }

    std::vector<double> solve_from(std::vector<double> z, const SearchOptions& opt) const {
        std::vector<double> up(prob_.f.size(), 0.0), lo(prob_.f.size(), 0.0);
        double rho = 10.0;
        double previous = std::numeric_limits<double>::infinity();
        for (int outer = 0; outer < opt.outer_iterations; ++outer) {
            minimize(z, up, lo, rho, opt.inner_iterations);
            const auto g = deviations(z);
            double viol = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                up[k] = std::max(0.0, up[k] + rho * (g[k] - prob_.epsilons[k]));
                lo[k] = std::max(0.0, lo[k] + rho * (-g[k] - prob_.epsilons[k]));
                viol = std::max(viol, std::abs(g[k]) - prob_.epsilons[k]);
            }
            if (viol < 1e-11) break;
            if (viol > 0.25 * previous) rho = std::min(rho * 10.0, 1e12);
            previous = viol;
        }
        return z;
    }

    std::vector<double> snapped(std::vector<double> z, double threshold) const {
        for (const auto& b : prob_.blocks)
            for (std::size_t r = 0; r < b.rows; ++r) {
                double* row = z.data() + b.offset + r * b.cols;
                double total = 0.0;
                for (std::size_t c = 0; c < b.cols; ++c) {
                    if (row[c] < threshold) row[c] = 0.0;
                    total += row[c];
                }
                for (std::size_t c = 0; c < b.cols; ++c) row[c] = total > 0 ? row[c] / total : 1.0 / b.cols;
            }
        return z;
    }

    std::vector<std::vector<double>> starts(const SearchOptions& opt) const {
        std::size_t count = 1;
        bool small = true;
        for (const auto& b : prob_.blocks) {
            small = small && b.cols <= opt.vertex_max_values;
            for (std::size_t r = 0; r < b.rows && count <= opt.vertex_start_cap; ++r) count *= b.cols;
        }
        std::vector<std::vector<double>> out;
        if (small && count <= opt.vertex_start_cap) {
            std::vector<std::pair<std::size_t, std::size_t>> rows;  // (offset of row, cols)
            for (const auto& b : prob_.blocks)
                for (std::size_t r = 0; r < b.rows; ++r) rows.emplace_back(b.offset + r * b.cols, b.cols);
            std::vector<std::size_t> pick(rows.size(), 0);
            for (std::size_t s = 0; s < count; ++s) {
                std::vector<double> z(size_, 0.0);
                for (std::size_t r = 0; r < rows.size(); ++r)
                    for (std::size_t c = 0; c < rows[r].second; ++c)
                        z[rows[r].first + c] = 0.05 / rows[r].second + (c == pick[r] ? 0.95 : 0.0);
                out.push_back(std::move(z));
                for (std::size_t r = rows.size(); r-- > 0;) {
                    if (++pick[r] < rows[r].second) break;
                    pick[r] = 0;
                }
            }
            return out;
        }
        std::mt19937 rng(opt.seed);
        std::exponential_distribution<double> expo(1.0);
        for (std::size_t s = 0; s < opt.random_starts; ++s) {
            std::vector<double> z(size_);
            for (const auto& b : prob_.blocks)
                for (std::size_t r = 0; r < b.rows; ++r) {
                    double total = 0.0;
                    for (std::size_t c = 0; c < b.cols; ++c) total += z[b.offset + r * b.cols + c] = expo(rng);
                    for (std::size_t c = 0; c < b.cols; ++c) z[b.offset + r * b.cols + c] /= total;
                }
            out.push_back(std::move(z));
        }
        return out;
    }

    SearchResult run(const SearchOptions& opt) const {
        SearchResult out;
        std::vector<SearchCandidate> feasible;
        const auto& b0 = prob_.blocks[0];
        for (auto& start : starts(opt)) {
            ++out.starts;
            const auto z = snapped(solve_from(std::move(start), opt), opt.snap);
            if (violation(z) > opt.violation_tolerance) continue;
            ++out.feasible_starts;
            SearchCandidate c;
            c.first.assign(z.begin() + static_cast<std::ptrdiff_t>(b0.offset),
                           z.begin() + static_cast<std::ptrdiff_t>(b0.offset + b0.rows * b0.cols));
            c.objective = objective(z);
            feasible.push_back(std::move(c));
        }
        if (feasible.empty()) return out;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& c : feasible) best = std::max(best, c.objective);
        for (const auto& c : feasible) {
            if (c.objective < best - opt.objective_tolerance) continue;
            bool duplicate = false;
            for (const auto& kept : out.optima) {
                double diff = 0.0;
                for (std::size_t r = 0; r < b0.rows; ++r) {
                    if (prob_.row_weight[r] <= 0.0) continue;
                    for (std::size_t col = 0; col < b0.cols; ++col)
                        diff = std::max(diff, std::abs(c.first[r * b0.cols + col] - kept.first[r * b0.cols + col]));
                }
                if (diff <= opt.distinct_tolerance) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) out.optima.push_back(c);
        }
        return out;
    }

private:
    ProductProblem prob_;
    std::size_t size_ = 0;
};

}  // namespace cpir::detail
