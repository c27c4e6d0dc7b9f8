#pragma once

// Test-side oracles: straight-line implementations of the uncompressed
// primal-dual iterations and a finite-difference gradient check. These stay
// independent of the library steppers on purpose; the equivalence tests pit
// the two routes against each other.

#include "dcosim/algorithms.hpp"
#include "dcosim/problem.hpp"
#include "dcosim/topology.hpp"

namespace dcosim::testing {

struct PdState {
    Matrix X, D;
};

// Three-line smooth iteration with dual stepsize lambda:
//   Xbar = X - eta grad F(X) - eta D
//   D'   = D + (lambda/2)(I - W) Xbar
//   X'   = X - eta grad F(X) - eta D'
inline void smooth_pd_step(PdState& s, const CompositeProblem& prob, const Network& net,
                           double eta, double lambda) {
    const Matrix G = prob.grad_matrix(s.X);
    const Matrix X_bar = s.X - eta * G - eta * s.D;
    const Matrix IW_Xbar = X_bar - net.mixing() * X_bar;
    const Matrix D_next = s.D + 0.5 * lambda * IW_Xbar;
    s.X = s.X - eta * G - eta * D_next;
    s.D = D_next;
}

// Composite variant: V = (I - (eta lambda / 2)(I - W)) Xbar, X' = prox(V).
inline void composite_pd_step(PdState& s, const CompositeProblem& prob, const Network& net,
                              double eta, double lambda) {
    const Matrix G = prob.grad_matrix(s.X);
    const Matrix X_bar = s.X - eta * G - eta * s.D;
    const Matrix IW_Xbar = X_bar - net.mixing() * X_bar;
    s.D = s.D + 0.5 * lambda * IW_Xbar;
    s.X = prob.prox(eta, X_bar - 0.5 * eta * lambda * IW_Xbar);
}

// Matching bootstrap: X^1 = prox(X^0 - eta grad F(X^0)) (identity prox when
// r = 0), D^1 = 0.
inline PdState pd_bootstrap(const CompositeProblem& prob, const Matrix& X0, double eta,
                            bool with_prox) {
    const Matrix Z1 = X0 - eta * prob.grad_matrix(X0);
    return PdState{with_prox ? prob.prox(eta, Z1) : Z1,
                   Matrix::Zero(X0.rows(), X0.cols())};
}

// Central finite differences of a batch value function.
inline Vector fd_gradient(const CompositeProblem& prob, int i, int j, const Vector& x,
                          double h = 1e-6) {
    Vector g(x.size());
    for (long c = 0; c < x.size(); ++c) {
        Vector xp = x, xm = x;
        xp(c) += h;
        xm(c) -= h;
        g(c) = (prob.value_batch(i, j, xp) - prob.value_batch(i, j, xm)) / (2.0 * h);
    }
    return g;
}

inline Vector fd_gradient_full(const CompositeProblem& prob, int i, const Vector& x,
                               double h = 1e-6) {
    Vector g(x.size());
    for (long c = 0; c < x.size(); ++c) {
        Vector xp = x, xm = x;
        xp(c) += h;
        xm(c) -= h;
        g(c) = (prob.value_full(i, xp) - prob.value_full(i, xm)) / (2.0 * h);
    }
    return g;
}

// Quadratic batches with a shared curvature matrix and node/batch dependent
// centers; heterogeneity scales the node disagreement.
inline CompositeProblem hetero_quadratic(uint64_t seed, int n, int m, int p,
                                         double heterogeneity, double l1 = 0.0,
                                         double kappa = 2.0, bool common_curvature = false) {
    RngStream rng(seed, 0, "data");
    Vector shared_d(p);
    for (int c = 0; c < p; ++c) shared_d(c) = 1.0 + (kappa - 1.0) * rng.uniform();
    Vector center(p);
    for (int c = 0; c < p; ++c) center(c) = rng.normal();
    std::vector<std::vector<BatchFunction>> rows;
    for (int i = 0; i < n; ++i) {
        Vector shift(p);
        for (int c = 0; c < p; ++c) shift(c) = rng.normal();
        std::vector<BatchFunction> row;
        for (int j = 0; j < m; ++j) {
            Vector d = shared_d;
            if (!common_curvature)
                for (int c = 0; c < p; ++c) d(c) = 1.0 + (kappa - 1.0) * rng.uniform();
            Vector jitter(p);
            for (int c = 0; c < p; ++c) jitter(c) = rng.normal();
            const Vector c_ij = center + heterogeneity * (shift + 0.3 * jitter);
            row.emplace_back(QuadraticBatch{Matrix(d.asDiagonal()), d.cwiseProduct(c_ij)});
        }
        rows.push_back(std::move(row));
    }
    Regularizer reg;
    if (l1 > 0.0) reg = Regularizer{RegularizerKind::l1, l1};
    return CompositeProblem(std::move(rows), reg);
}

}  // namespace dcosim::testing
