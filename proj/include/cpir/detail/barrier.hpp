#pragma once

// Log-barrier Newton method for
//   minimize sum_i a_i z_i log z_i  subject to  E z = b, z >= 0,
// started from a point that is strictly positive on the free coordinates of
// the minimal face. Coordinates outside the face stay at zero. The Hessian
// of the barrier objective is diagonal; Newton steps are taken in the
// coordinates scaled by H^-1/2 through a QR factorization of the scaled
// equality rows, which stays accurate as the barrier weight goes to zero.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cpir/detail/polytope.hpp"

namespace cpir::detail {

struct BarrierOptions {
    double mu_start = 1e-2;
    double mu_end = 1e-13;
    double mu_factor = 0.1;
    int max_newton = 200;
    double decrement_tolerance = 1e-18;
    double residual_tolerance = 1e-9;
};

struct BarrierProblem {
    std::size_t num_vars = 0;
    std::vector<SparseRow> equalities;
    std::vector<double> rhs;
    std::vector<double> weight;  // a_i >= 0; zero for pure barrier coordinates
    std::vector<bool> free;
    std::vector<double> start;   // feasible, positive on free coordinates
};

struct BarrierResult {
    std::vector<double> z;
    double objective = 0.0;
    int newton_steps = 0;
    double max_equality_residual = 0.0;
};

inline BarrierResult solve_barrier(const BarrierProblem& prob, const BarrierOptions& opt = {}) {
    // Compress to free coordinates.
    std::vector<std::size_t> cols;
    std::vector<std::size_t> pos(prob.num_vars, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < prob.num_vars; ++i)
        if (prob.free[i]) {
            pos[i] = cols.size();
            cols.push_back(i);
        }
    const std::size_t n = cols.size();
    std::vector<std::vector<double>> dense_rows;
    std::vector<double> dense_rhs;
    for (std::size_t r = 0; r < prob.equalities.size(); ++r) {
        std::vector<double> row(n, 0.0);
        bool any = false;
        for (const auto& [j, a] : prob.equalities[r])
            if (pos[j] != static_cast<std::size_t>(-1) && a != 0.0) {
                row[pos[j]] += a;
                any = true;
            }
        if (!any) continue;
        dense_rows.push_back(std::move(row));
        dense_rhs.push_back(prob.rhs[r]);
    }
    const auto kept = independent_columns(dense_rows, 1e-10);
    const std::size_t m = kept.size();
    Eigen::MatrixXd E(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    Eigen::VectorXd b(static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < n; ++j) E(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = dense_rows[kept[r]][j];
        b[static_cast<Eigen::Index>(r)] = dense_rhs[kept[r]];
    }
    Eigen::VectorXd a(static_cast<Eigen::Index>(n));
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        a[static_cast<Eigen::Index>(j)] = prob.weight[cols[j]];
        z[static_cast<Eigen::Index>(j)] = prob.start[cols[j]];
    }

    auto psi = [&](const Eigen::VectorXd& v, double mu) {
        double out = 0.0;
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            if (v[j] <= 0.0) return std::numeric_limits<double>::infinity();
            out += a[j] * v[j] * std::log(v[j]) - mu * std::log(v[j]);
        }
        return out;
    };

    BarrierResult out;
    for (double mu = opt.mu_start; mu >= opt.mu_end * 0.999; mu *= opt.mu_factor) {
        for (int it = 0; it < opt.max_newton; ++it) {
            Eigen::VectorXd g(static_cast<Eigen::Index>(n));
            Eigen::VectorXd hinv(static_cast<Eigen::Index>(n));
            for (Eigen::Index j = 0; j < z.size(); ++j) {
                g[j] = a[j] * (std::log(z[j]) + 1.0) - mu / z[j];
                hinv[j] = 1.0 / (a[j] / z[j] + mu / (z[j] * z[j]));
            }
            const Eigen::VectorXd r = E * z - b;
            // In scaled coordinates dz = D y, D = H^-1/2, the step minimizes
            // |y|^2 / 2 + (D g).y subject to (E D) y = -r. With (E D)^T = Q R
            // it is y = -Q R^-T r - (I - Q Q^T) D g.
            const Eigen::VectorXd d = hinv.cwiseSqrt();
            const Eigen::VectorXd dg = d.cwiseProduct(g);
            Eigen::VectorXd y;
            if (m > 0) {
                const Eigen::MatrixXd ED_t = (E * d.asDiagonal()).transpose();
                Eigen::HouseholderQR<Eigen::MatrixXd> qr(ED_t);
                const Eigen::MatrixXd Q =
                    qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
                const Eigen::MatrixXd R = qr.matrixQR().topRows(static_cast<Eigen::Index>(m)).triangularView<Eigen::Upper>();
                const Eigen::VectorXd w = R.transpose().triangularView<Eigen::Lower>().solve(r);
                y = -(Q * w) - (dg - Q * (Q.transpose() * dg));
            } else {
                y = -dg;
            }
            const Eigen::VectorXd dz = d.cwiseProduct(y);
            double dec2 = 0.0;
            for (Eigen::Index j = 0; j < z.size(); ++j) dec2 += dz[j] * dz[j] / hinv[j];
            if (dec2 < opt.decrement_tolerance && r.norm() < opt.residual_tolerance) break;
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < z.size(); ++j)
                if (dz[j] < 0.0) alpha = std::min(alpha, -0.99 * z[j] / dz[j]);
            const double base = psi(z, mu);
            const double slope = g.dot(dz);
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const Eigen::VectorXd trial = z + alpha * dz;
                const double val = psi(trial, mu);
                if (std::isfinite(val) && (val <= base + 1e-4 * alpha * slope || r.norm() > opt.residual_tolerance)) {
                    z = trial;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            ++out.newton_steps;
            if (!moved) break;
        }
    }

    out.z.assign(prob.num_vars, 0.0);
    for (std::size_t j = 0; j < n; ++j) out.z[cols[j]] = z[static_cast<Eigen::Index>(j)];
    for (std::size_t i = 0; i < prob.num_vars; ++i)
        if (prob.weight[i] > 0.0 && out.z[i] > 0.0) out.objective += prob.weight[i] * out.z[i] * std::log(out.z[i]);
    for (std::size_t r = 0; r < prob.equalities.size(); ++r)
        out.max_equality_residual =
            std::max(out.max_equality_residual, std::abs(row_dot(prob.equalities[r], out.z) - prob.rhs[r]));
    return out;
}

}  // namespace cpir::detail
