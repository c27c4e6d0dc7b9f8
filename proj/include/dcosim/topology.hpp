#pragma once

#include <utility>
#include <vector>

#include "dcosim/common.hpp"

namespace dcosim {

// Spectral summary of I - W. "Nonzero" follows the convention that
// eigenvalues below 1e-9 in magnitude are the consensus mode: a connected
// graph has exactly one of them.
struct SpectralInfo {
    double lam_max;     // largest eigenvalue of I - W
    double lam_min_nz;  // smallest nonzero eigenvalue of I - W
    double kappa_g;     // lam_max / lam_min_nz
};

// Gossip network: undirected graph over [n] plus its symmetric mixing matrix
// W with W1 = 1 and spectrum in (-1, 1]. Immutable once built, safe to share
// across concurrent runs.
class Network {
public:
    using EdgeList = std::vector<std::pair<int, int>>;

    // Ring with two 1-hop neighbors per node, off-diagonal weight w and
    // self-weight 1 - 2w. Requires n >= 3 and w in (0, 1/2).
    static Network ring(int n, double neighbor_weight);

    // W = 11^T / n (one gossip round averages exactly). Requires n >= 2.
    static Network complete(int n);

    // Metropolis weights w_ij = 1 / (1 + max(deg_i, deg_j)) on the given
    // undirected edge list, self-weight completing the row.
    static Network from_edges(int n, const EdgeList& edges);

    // No validation; the edge set is read off the nonzero off-diagonals.
    // Lets tests feed broken matrices through validate().
    static Network from_matrix(Matrix W);

    int size() const { return n_; }
    const Matrix& mixing() const { return W_; }
    const EdgeList& edges() const { return edges_; }

    // Full mixing-matrix check: symmetry, rows summing to 1, sparsity
    // pattern, spectrum in (-1, 1] with a simple unit eigenvalue
    // (connectivity). Throws std::invalid_argument on violation beyond tol.
    SpectralInfo validate(double tol = 1e-10) const;

    const SpectralInfo& spectral() const { return spectral_; }

    // W * M. M must have n rows; preserves column sums exactly in exact
    // arithmetic since 1^T W = 1^T.
    Matrix mix(const Matrix& M) const;

    // <Y, (I-W)^+ Y> restricted to the nonzero spectrum of I - W.
    double pinv_norm_sq(const Matrix& Y) const;

    // Frobenius norm of the component of Y along the all-ones row direction
    // (used to detect dual-variable corruption).
    double ones_component_norm(const Matrix& Y) const;

private:
    Network(int n, EdgeList edges, Matrix W, bool validate_now);
    void decompose();

    int n_;
    EdgeList edges_;
    Matrix W_;
    Vector iw_evals_;  // eigenvalues of I - W, ascending
    Matrix iw_evecs_;
    SpectralInfo spectral_{0, 0, 0};
};

}  // namespace dcosim
