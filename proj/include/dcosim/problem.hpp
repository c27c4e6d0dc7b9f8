#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "dcosim/common.hpp"

namespace dcosim {

// One smooth batch component f_ij: either a quadratic x'Ax/2 - b'x with A
// symmetric PSD, or a binary logistic loss over s samples plus a ridge term
// (the ridge lives in the smooth part; the shared l1 regularizer is separate).
struct QuadraticBatch {
    Matrix A;
    Vector b;
};

struct LogisticBatch {
    Matrix features;  // s x p
    Vector labels;    // s entries in {0, 1}
    double l2 = 0.0;  // ridge weight, adds l2 * ||x||^2
};

class BatchFunction {
public:
    explicit BatchFunction(QuadraticBatch q);
    explicit BatchFunction(LogisticBatch l);

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    Vector hess_vec(const Vector& x, const Vector& v) const;

    double mu() const { return mu_; }
    double smoothness() const { return smooth_; }
    int dim() const { return dim_; }
    bool is_quadratic() const { return std::holds_alternative<QuadraticBatch>(fn_); }

private:
    std::variant<QuadraticBatch, LogisticBatch> fn_;
    Vector diag_;  // diagonal of A when the quadratic is diagonal
    bool diagonal_ = false;
    int dim_ = 0;
    double mu_ = 0.0;
    double smooth_ = 0.0;
};

enum class RegularizerKind { zero, l1 };

// The shared non-smooth term r, identical across nodes.
struct Regularizer {
    RegularizerKind kind = RegularizerKind::zero;
    double weight = 0.0;  // l1 weight

    double value(const Vector& x) const;
};

// Composite objective (1/n) sum_i [ f_i(x) + r(x) ] with
// f_i = (1/m) sum_j f_ij. Immutable after construction; shareable read-only.
class CompositeProblem {
public:
    CompositeProblem(std::vector<std::vector<BatchFunction>> batches, Regularizer reg);

    int nodes() const { return n_; }
    int batches_per_node() const { return m_; }
    int dim() const { return p_; }
    double mu() const { return mu_; }
    double smoothness() const { return smooth_; }
    const Regularizer& regularizer() const { return reg_; }
    const BatchFunction& batch(int i, int j) const;

    Vector grad_batch(int i, int j, const Vector& x) const;
    Vector grad_full(int i, const Vector& x) const;  // (1/m) sum_j grad_batch
    double value_batch(int i, int j, const Vector& x) const;
    double value_full(int i, const Vector& x) const;

    // Row i = grad_full(i, X.row(i)); the stacked gradient of F.
    Matrix grad_matrix(const Matrix& X) const;

    // Bregman distances of f_i resp. f_ij, nonnegative by convexity.
    double bregman_full(int i, const Vector& x, const Vector& y) const;
    double bregman_batch(int i, int j, const Vector& x, const Vector& y) const;

    // Rowwise prox of eta * r. Soft-thresholds entrywise for l1, identity
    // for r = 0.
    Matrix prox(double eta, const Matrix& V) const;
    Vector prox_vec(double eta, const Vector& v) const;

    // Centralized objective (1/n) sum f_i(x) + r(x).
    double objective(const Vector& x) const;

private:
    std::vector<std::vector<BatchFunction>> batches_;
    Regularizer reg_;
    int n_, m_, p_;
    double mu_, smooth_;
};

// High-precision centralized solution plus the algorithm fixed points.
//
// Z* = X* - (eta/n) 11' grad F(X*) is the consensual pre-image of X* under
// the rowwise prox. D* is the stationary value of the dual variable,
// D* = ((1/n) 11' - I) grad F(X*); its rows sum to the zero vector.
struct ReferenceSolution {
    Vector x_star;
    Matrix X_star;     // n rows, all x_star
    Matrix grad_star;  // grad F(X*)
    Vector mean_grad;  // column means of grad_star
    Matrix D_star;
    double eta = 0.0;  // stepsize Z_star was built with
    Matrix Z_star;
    double obj_star = 0.0;
    double tol = 0.0;  // achieved iterate-change tolerance
    long iterations = 0;

    Vector z_star_for(double eta) const { return x_star - eta * mean_grad; }
    Matrix Z_star_for(double eta) const;
};

// FISTA with restart on (1/n) sum f_i + r until the iterate change drops
// below tol; smooth quadratics are solved directly. Throws if the cap is
// hit first.
ReferenceSolution solve_reference(const CompositeProblem& prob, double eta,
                                  double tol = 1e-12, long max_iters = 1000000);

enum class ProblemKind { quadratic, logistic };

// Deterministic synthetic instance. heterogeneity = 0 gives every node the
// same data distribution; larger values shift per-node batch centers
// (quadratic) or per-node class balance (logistic) so local optima disagree.
CompositeProblem generate_synthetic(uint64_t seed, int n, int m, int p, ProblemKind kind,
                                    double heterogeneity, double l1 = 0.0, double l2 = 0.0);

ProblemKind problem_kind_from_string(std::string_view s);

}  // namespace dcosim
