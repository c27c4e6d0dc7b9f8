#include "dcosim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace dcosim {

namespace {
constexpr double kZeroEigTol = 1e-9;

std::vector<int> degrees(int n, const Network::EdgeList& edges) {
    std::vector<int> deg(n, 0);
    for (auto [i, j] : edges) {
        deg[i]++;
        deg[j]++;
    }
    return deg;
}
}  // namespace

Network::Network(int n, EdgeList edges, Matrix W, bool validate_now)
    : n_(n), edges_(std::move(edges)), W_(std::move(W)) {
    decompose();
    if (validate_now) spectral_ = validate(1e-12);
}

void Network::decompose() {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix::Identity(n_, n_) - W_);
    iw_evals_ = es.eigenvalues();
    iw_evecs_ = es.eigenvectors();
    double lam_max = iw_evals_(n_ - 1);
    double lam_min_nz = lam_max;
    for (int i = 0; i < n_; ++i) {
        if (std::abs(iw_evals_(i)) >= kZeroEigTol) {
            lam_min_nz = iw_evals_(i);
            break;
        }
    }
    spectral_ = {lam_max, lam_min_nz, lam_min_nz > 0 ? lam_max / lam_min_nz : 0.0};
}

Network Network::ring(int n, double neighbor_weight) {
    if (n < 3) throw std::invalid_argument("ring: need n >= 3 nodes");
    if (!(neighbor_weight > 0.0 && neighbor_weight < 0.5))
        throw std::invalid_argument("ring: neighbor weight must lie in (0, 1/2)");
    EdgeList edges;
    Matrix W = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        int next = (i + 1) % n;
        edges.emplace_back(i, next);
        W(i, next) = neighbor_weight;
        W(next, i) = neighbor_weight;
        W(i, i) = 1.0 - 2.0 * neighbor_weight;
    }
    return Network(n, std::move(edges), std::move(W), true);
}

Network Network::complete(int n) {
    if (n < 2) throw std::invalid_argument("complete: need n >= 2 nodes");
    EdgeList edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    Matrix W = Matrix::Constant(n, n, 1.0 / n);
    return Network(n, std::move(edges), std::move(W), true);
}

Network Network::from_edges(int n, const EdgeList& edges) {
    if (n < 2) throw std::invalid_argument("from_edges: need n >= 2 nodes");
    for (auto [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw std::invalid_argument("from_edges: edge endpoint out of range");
        if (i == j) throw std::invalid_argument("from_edges: self-loops not allowed");
    }
    auto deg = degrees(n, edges);
    Matrix W = Matrix::Zero(n, n);
    for (auto [i, j] : edges) {
        double w = 1.0 / (1.0 + std::max(deg[i], deg[j]));
        W(i, j) = w;
        W(j, i) = w;
    }
    for (int i = 0; i < n; ++i) W(i, i) = 1.0 - W.row(i).sum();
    return Network(n, edges, std::move(W), true);
}

Network Network::from_matrix(Matrix W) {
    if (W.rows() != W.cols() || W.rows() < 2)
        throw std::invalid_argument("from_matrix: need a square matrix, n >= 2");
    int n = static_cast<int>(W.rows());
    EdgeList edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (W(i, j) != 0.0 || W(j, i) != 0.0) edges.emplace_back(i, j);
    return Network(n, std::move(edges), std::move(W), false);
}

SpectralInfo Network::validate(double tol) const {
    if ((W_ - W_.transpose()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("mixing matrix is not symmetric");
    Vector row_sums = W_.rowwise().sum();
    if ((row_sums.array() - 1.0).abs().maxCoeff() > tol)
        throw std::invalid_argument("mixing matrix rows do not sum to 1");

    // Sparsity: zero off the edge set.
    Matrix allowed = Matrix::Zero(n_, n_);
    for (auto [i, j] : edges_) allowed(i, j) = allowed(j, i) = 1.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (i != j && allowed(i, j) == 0.0 && std::abs(W_(i, j)) > tol)
                throw std::invalid_argument("nonzero mixing weight off the edge set");

    // Spectrum of W in (-1, 1], unit eigenvalue simple. In terms of I - W:
    // eigenvalues in [0, 2), exactly one of them zero.
    if (iw_evals_(n_ - 1) >= 2.0 - tol)
        throw std::invalid_argument("mixing matrix has an eigenvalue at or below -1");
    if (iw_evals_(0) < -tol)
        throw std::invalid_argument("mixing matrix has an eigenvalue above 1");
    int zero_count = 0;
    for (int i = 0; i < n_; ++i)
        if (std::abs(iw_evals_(i)) < kZeroEigTol) zero_count++;
    if (zero_count != 1)
        throw std::invalid_argument(
            zero_count == 0 ? "mixing matrix has no unit eigenvalue"
                            : "graph is disconnected (unit eigenvalue not simple)");
    return spectral_;
}

Matrix Network::mix(const Matrix& M) const {
    if (M.rows() != n_)
        throw std::invalid_argument("mix: row count does not match node count");
    return W_ * M;
}

double Network::pinv_norm_sq(const Matrix& Y) const {
    double total = 0.0;
    for (int i = 0; i < n_; ++i) {
        if (iw_evals_(i) < kZeroEigTol) continue;
        total += (iw_evecs_.col(i).transpose() * Y).squaredNorm() / iw_evals_(i);
    }
    return total;
}

double Network::ones_component_norm(const Matrix& Y) const {
    Vector col_means = Y.colwise().mean();
    return std::sqrt(static_cast<double>(n_)) * col_means.norm();
}

}  // namespace dcosim
