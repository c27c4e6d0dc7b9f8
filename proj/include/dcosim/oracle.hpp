#pragma once

#include <string_view>
#include <vector>

#include "dcosim/problem.hpp"
#include "dcosim/rng.hpp"

namespace dcosim {

enum class OracleKind { full, sgd, lsvrg, saga };

OracleKind oracle_kind_from_string(std::string_view s);

// Stochastic gradient oracle with the three estimator kinds (plain sampling,
// loopless SVRG, SAGA) plus the exact full gradient. Owns the variance
// reduction memory and the running count of batch-gradient evaluations.
// Owned by a single run; never shared.
class OracleState {
public:
    // X0 is the starting iterate; lsvrg/saga build their reference state
    // there (costing n*m gradient evaluations). refresh_prob < 0 means the
    // default 1/m.
    static OracleState init(OracleKind kind, const CompositeProblem& prob, const Matrix& X0,
                            double refresh_prob = -1.0);

    OracleKind kind() const { return kind_; }
    long long grad_evals() const { return grad_evals_; }
    double refresh_prob() const { return refresh_prob_; }

    // One oracle draw per node; returns G with row i the node-i estimator.
    // Mutates the variance-reduction memory and the evaluation counter.
    Matrix sample(const CompositeProblem& prob, const Matrix& X, RngStream& rng);

    // Estimator value for node i conditioned on batch index l, at the current
    // memory (no mutation, no accounting). Exposed so expectations can be
    // enumerated exactly in tests and in variance_at.
    Vector estimator_for(const CompositeProblem& prob, int i, const Vector& x, int l) const;

    // sigma^2 = (1/n) sum_i E || g_i(x) - grad f_i(x) ||^2 at a common point
    // x, under the current memory. Enumerates the batch index exactly when m
    // is small, otherwise Monte-Carlo with `trials` draws per node.
    double variance_at(const CompositeProblem& prob, const Vector& x, int trials = 2000,
                       RngStream* rng = nullptr) const;

    // Per-node sampling distribution P_i over batches; defaults to uniform.
    void set_sampling(Matrix probs);  // n x m, rows sum to 1
    double sampling_prob(int i, int l) const;

    // Variance-reduction memory, read-only (Lyapunov terms, oracle checks).
    const Matrix& ref_points() const;        // lsvrg: n x p
    const Matrix& ref_grads() const;         // lsvrg: n x p
    const Matrix& saga_table(int i) const;   // saga: m x p stored gradients
    const Matrix& saga_points(int i) const;  // saga: m x p reference points
    const Matrix& saga_mean() const;         // saga: n x p running averages

    // Largest deviation between the incremental SAGA averages and the
    // recomputed table means.
    double saga_mean_drift() const;

private:
    OracleState() = default;

    int sample_index(int i, RngStream& rng) const;

    OracleKind kind_ = OracleKind::full;
    int n_ = 0, m_ = 0, p_ = 0;
    double refresh_prob_ = 0.0;
    long long grad_evals_ = 0;
    Matrix sampling_;  // empty -> uniform

    Matrix ref_points_;  // lsvrg
    Matrix ref_grads_;
    std::vector<Matrix> table_;  // saga, one m x p block per node
    std::vector<Matrix> table_points_;
    Matrix table_mean_;
};

}  // namespace dcosim
