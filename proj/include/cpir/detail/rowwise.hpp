#pragma once

// Maximizes sum_r w_r H(q_r) over row-stochastic q subject to
//   sum_r w_r sum_c q_r(c) F_k(r, c) = c_k  (within eps_k).
// Plain MaxEnt is the single-row case. The dual
//   D(lambda) = sum_r w_r log Z_r(lambda) + lambda . c,
//   Z_r = sum_c exp(-lambda . F(r, c)),
// is minimized by damped Newton; q_r(c) is proportional to exp(-lambda . F(r, c)).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cpir/detail/polytope.hpp"

namespace cpir::detail {

struct RowwiseOptions {
    double gradient_tolerance = 1e-10;
    int max_iterations = 500;
    double condition_limit = 1e12;
    double rank_tolerance = 1e-10;
};

struct RowwiseProblem {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> weights;                // w_r > 0
    std::vector<std::vector<double>> features;  // per constraint, rows * cols entries
    std::vector<double> targets;
    std::vector<double> epsilons;
};

struct RowwiseResult {
    bool feasible = false;
    bool converged = false;
    int iterations = 0;
    std::vector<double> q;                 // rows * cols, each row sums to 1
    std::vector<double> multipliers;       // per constraint; 0 where dropped
    std::vector<double> log_partition;     // per row
    std::vector<bool> dropped;             // linearly dependent on earlier constraints
    std::vector<double> adjusted_targets;  // nearest targets inside the tolerance bands
    double dual_objective = 0.0;
    double gradient_norm = 0.0;
    std::size_t free_cells = 0;
};

inline PolytopeSystem rowwise_system(const RowwiseProblem& prob) {
    PolytopeSystem sys;
    sys.num_vars = prob.rows * prob.cols;
    for (std::size_t r = 0; r < prob.rows; ++r) {
        SparseRow row;
        for (std::size_t c = 0; c < prob.cols; ++c) row.emplace_back(r * prob.cols + c, 1.0);
        sys.add_equality(std::move(row), 1.0);
    }
    for (std::size_t k = 0; k < prob.features.size(); ++k) {
        SparseRow row;
        for (std::size_t r = 0; r < prob.rows; ++r)
            for (std::size_t c = 0; c < prob.cols; ++c) {
                const double a = prob.weights[r] * prob.features[k][r * prob.cols + c];
                if (a != 0.0) row.emplace_back(r * prob.cols + c, a);
            }
        sys.add_soft(std::move(row), prob.targets[k], prob.epsilons[k]);
    }
    return sys;
}

inline RowwiseResult solve_rowwise(const RowwiseProblem& prob, const RowwiseOptions& opt = {}) {
    RowwiseResult out;
    const std::size_t R = prob.rows;
    const std::size_t C = prob.cols;
    const std::size_t K = prob.features.size();
    out.multipliers.assign(K, 0.0);
    out.dropped.assign(K, false);

    const PolytopeSystem sys = rowwise_system(prob);
    const auto nearest = nearest_targets(sys);
    if (!nearest) return out;
    out.feasible = true;
    out.adjusted_targets = nearest->targets;
    const auto face = minimal_face(sys, out.adjusted_targets);
    std::vector<bool> free(R * C, true);
    if (face) free = face->free;
    for (std::size_t r = 0; r < R; ++r) {
        bool any = false;
        for (std::size_t c = 0; c < C; ++c) any = any || free[r * C + c];
        if (!any)  // numerical corner: fall back to the LP witness support
            for (std::size_t c = 0; c < C; ++c) free[r * C + c] = nearest->witness[r * C + c] > 0;
    }
    for (bool f : free) out.free_cells += f ? 1 : 0;

    // Drop constraints whose row-centered features are dependent on earlier ones.
    std::vector<std::vector<double>> centered(K);
    for (std::size_t k = 0; k < K; ++k) {
        auto& col = centered[k];
        for (std::size_t r = 0; r < R; ++r) {
            double mean = 0.0;
            std::size_t cnt = 0;
            for (std::size_t c = 0; c < C; ++c)
                if (free[r * C + c]) {
                    mean += prob.features[k][r * C + c];
                    ++cnt;
                }
            mean /= static_cast<double>(std::max<std::size_t>(cnt, 1));
            const double sw = std::sqrt(prob.weights[r]);
            for (std::size_t c = 0; c < C; ++c)
                if (free[r * C + c]) col.push_back(sw * (prob.features[k][r * C + c] - mean));
        }
    }
    const std::vector<std::size_t> kept = independent_columns(centered, opt.rank_tolerance);
    for (std::size_t k = 0; k < K; ++k) out.dropped[k] = true;
    for (std::size_t k : kept) out.dropped[k] = false;
    const std::size_t M = kept.size();

    Eigen::VectorXd target(static_cast<Eigen::Index>(M));
    for (std::size_t i = 0; i < M; ++i) target[static_cast<Eigen::Index>(i)] = out.adjusted_targets[kept[i]];

    auto feature = [&](std::size_t i, std::size_t cell) { return prob.features[kept[i]][cell]; };

    // Evaluates the dual, its gradient and Hessian; fills q and log Z.
    std::vector<double> q(R * C, 0.0);
    std::vector<double> logz(R, 0.0);
    auto evaluate = [&](const Eigen::VectorXd& lambda, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
        double dual = lambda.dot(target);
        Eigen::VectorXd expect = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
        if (hess) hess->setZero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
        std::vector<double> a(C);
        Eigen::VectorXd mean(static_cast<Eigen::Index>(M));
        Eigen::VectorXd fc(static_cast<Eigen::Index>(M));
        for (std::size_t r = 0; r < R; ++r) {
            double amax = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < C; ++c) {
                if (!free[r * C + c]) continue;
                double v = 0.0;
                for (std::size_t i = 0; i < M; ++i) v -= lambda[static_cast<Eigen::Index>(i)] * feature(i, r * C + c);
                a[c] = v;
                amax = std::max(amax, v);
            }
            double z = 0.0;
            for (std::size_t c = 0; c < C; ++c)
                if (free[r * C + c]) z += std::exp(a[c] - amax);
            logz[r] = amax + std::log(z);
            dual += prob.weights[r] * logz[r];
            mean.setZero();
            Eigen::MatrixXd second;
            if (hess) second = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
            for (std::size_t c = 0; c < C; ++c) {
                if (!free[r * C + c]) {
                    q[r * C + c] = 0.0;
                    continue;
                }
                const double qc = std::exp(a[c] - logz[r]);
                q[r * C + c] = qc;
                for (std::size_t i = 0; i < M; ++i) fc[static_cast<Eigen::Index>(i)] = feature(i, r * C + c);
                mean += qc * fc;
                if (hess) second.noalias() += qc * fc * fc.transpose();
            }
            expect += prob.weights[r] * mean;
            if (hess) *hess += prob.weights[r] * (second - mean * mean.transpose());
        }
        if (grad) *grad = target - expect;
        return dual;
    };

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    double dual = evaluate(lambda, &grad, &hess);
    int iter = 0;
    while (grad.norm() > opt.gradient_tolerance && iter < opt.max_iterations) {
        ++iter;
        Eigen::VectorXd step;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo <= 0.0 || hi / lo > opt.condition_limit) {
            step = -grad;
        } else {
            step = -(eig.eigenvectors() *
                     (eig.eigenvalues().cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * grad)));
        }
        const double slope = grad.dot(step);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            const Eigen::VectorXd trial = lambda + t * step;
            const double d = evaluate(trial, nullptr, nullptr);
            if (std::isfinite(d) && d <= dual + 1e-4 * t * slope) {
                lambda = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        dual = evaluate(lambda, &grad, &hess);
    }
    dual = evaluate(lambda, &grad, nullptr);
    out.iterations = iter;
    out.gradient_norm = grad.norm();
    out.converged = out.gradient_norm <= opt.gradient_tolerance;
    out.dual_objective = dual;
    out.q = q;
    out.log_partition = logz;
    for (std::size_t i = 0; i < M; ++i) out.multipliers[kept[i]] = lambda[static_cast<Eigen::Index>(i)];
    return out;
}

}  // namespace cpir::detail
