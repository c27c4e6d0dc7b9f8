#include "dcosim/problem.hpp"

#include <cmath>
#include <limits>

#include "dcosim/rng.hpp"

namespace dcosim {

namespace {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z), overflow-safe
inline double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

BatchFunction::BatchFunction(QuadraticBatch q) : fn_(std::move(q)) {
    const auto& quad = std::get<QuadraticBatch>(fn_);
    const int p = static_cast<int>(quad.A.rows());
    if (quad.A.cols() != p || quad.b.size() != p)
        throw std::invalid_argument("quadratic batch: shape mismatch");
    dim_ = p;
    diagonal_ = quad.A.isDiagonal(0.0);
    if (diagonal_) {
        diag_ = quad.A.diagonal();
        mu_ = diag_.minCoeff();
        smooth_ = diag_.maxCoeff();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(quad.A, Eigen::EigenvaluesOnly);
        mu_ = es.eigenvalues().minCoeff();
        smooth_ = es.eigenvalues().maxCoeff();
    }
}

BatchFunction::BatchFunction(LogisticBatch l) : fn_(std::move(l)) {
    const auto& lg = std::get<LogisticBatch>(fn_);
    const auto s = lg.features.rows();
    dim_ = static_cast<int>(lg.features.cols());
    if (lg.labels.size() != s)
        throw std::invalid_argument("logistic batch: label count mismatch");
    if (((lg.labels.array() != 0.0) && (lg.labels.array() != 1.0)).any())
        throw std::invalid_argument("logistic batch: labels must be 0/1");
    // lambda_max(features' features) = lambda_max(features features'), and
    // the s x s Gram side is the small one at desk scale.
    Eigen::SelfAdjointEigenSolver<Matrix> es(lg.features * lg.features.transpose(),
                                             Eigen::EigenvaluesOnly);
    mu_ = 2.0 * lg.l2;
    smooth_ = es.eigenvalues().maxCoeff() / (4.0 * static_cast<double>(s)) + 2.0 * lg.l2;
}

double BatchFunction::value(const Vector& x) const {
    if (is_quadratic()) {
        const auto& q = std::get<QuadraticBatch>(fn_);
        if (diagonal_) return 0.5 * x.dot(diag_.cwiseProduct(x)) - q.b.dot(x);
        return 0.5 * x.dot(q.A * x) - q.b.dot(x);
    }
    const auto& lg = std::get<LogisticBatch>(fn_);
    const Vector z = lg.features * x;
    double total = 0.0;
    for (long r = 0; r < z.size(); ++r) total += softplus(z(r)) - lg.labels(r) * z(r);
    return total / static_cast<double>(z.size()) + lg.l2 * x.squaredNorm();
}

Vector BatchFunction::gradient(const Vector& x) const {
    if (is_quadratic()) {
        const auto& q = std::get<QuadraticBatch>(fn_);
        if (diagonal_) return diag_.cwiseProduct(x) - q.b;
        return q.A * x - q.b;
    }
    const auto& lg = std::get<LogisticBatch>(fn_);
    Vector z = lg.features * x;
    for (long r = 0; r < z.size(); ++r) z(r) = sigmoid(z(r)) - lg.labels(r);
    return lg.features.transpose() * z / static_cast<double>(lg.features.rows()) +
           2.0 * lg.l2 * x;
}

Vector BatchFunction::hess_vec(const Vector& x, const Vector& v) const {
    if (is_quadratic()) {
        const auto& q = std::get<QuadraticBatch>(fn_);
        if (diagonal_) return diag_.cwiseProduct(v);
        return q.A * v;
    }
    const auto& lg = std::get<LogisticBatch>(fn_);
    const Vector z = lg.features * x;
    Vector w = lg.features * v;
    for (long r = 0; r < z.size(); ++r) {
        const double s = sigmoid(z(r));
        w(r) *= s * (1.0 - s);
    }
    return lg.features.transpose() * w / static_cast<double>(lg.features.rows()) +
           2.0 * lg.l2 * v;
}

double Regularizer::value(const Vector& x) const {
    return kind == RegularizerKind::l1 ? weight * x.lpNorm<1>() : 0.0;
}

CompositeProblem::CompositeProblem(std::vector<std::vector<BatchFunction>> batches,
                                   Regularizer reg)
    : batches_(std::move(batches)), reg_(reg) {
    n_ = static_cast<int>(batches_.size());
    if (n_ < 1) throw std::invalid_argument("problem: need at least one node");
    m_ = static_cast<int>(batches_[0].size());
    if (m_ < 1) throw std::invalid_argument("problem: need at least one batch per node");
    for (const auto& row : batches_)
        if (static_cast<int>(row.size()) != m_)
            throw std::invalid_argument("problem: all nodes need the same batch count");
    p_ = batches_[0][0].dim();
    for (const auto& row : batches_)
        for (const auto& f : row)
            if (f.dim() != p_)
                throw std::invalid_argument("problem: batches disagree on dimension");
    mu_ = std::numeric_limits<double>::infinity();
    smooth_ = 0.0;
    for (const auto& row : batches_)
        for (const auto& f : row) {
            mu_ = std::min(mu_, f.mu());
            smooth_ = std::max(smooth_, f.smoothness());
        }
    if (!(mu_ > 0.0))
        throw std::invalid_argument("problem is not strongly convex (mu <= 0)");
    if (reg_.kind == RegularizerKind::l1 && reg_.weight < 0.0)
        throw std::invalid_argument("problem: l1 weight must be >= 0");
}

const BatchFunction& CompositeProblem::batch(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= m_)
        throw std::invalid_argument("batch index out of range");
    return batches_[i][j];
}

Vector CompositeProblem::grad_batch(int i, int j, const Vector& x) const {
    if (!x.allFinite()) throw std::invalid_argument("grad_batch: non-finite point");
    return batch(i, j).gradient(x);
}

Vector CompositeProblem::grad_full(int i, const Vector& x) const {
    if (!x.allFinite()) throw std::invalid_argument("grad_full: non-finite point");
    Vector g = Vector::Zero(p_);
    for (int j = 0; j < m_; ++j) g += batches_[i][j].gradient(x);
    return g / static_cast<double>(m_);
}

double CompositeProblem::value_batch(int i, int j, const Vector& x) const {
    return batch(i, j).value(x);
}

double CompositeProblem::value_full(int i, const Vector& x) const {
    double v = 0.0;
    for (int j = 0; j < m_; ++j) v += batches_[i][j].value(x);
    return v / static_cast<double>(m_);
}

Matrix CompositeProblem::grad_matrix(const Matrix& X) const {
    if (X.rows() != n_ || X.cols() != p_)
        throw std::invalid_argument("grad_matrix: shape mismatch");
    Matrix G(n_, p_);
    for (int i = 0; i < n_; ++i) G.row(i) = grad_full(i, X.row(i).transpose()).transpose();
    return G;
}

double CompositeProblem::bregman_full(int i, const Vector& x, const Vector& y) const {
    return value_full(i, x) - value_full(i, y) - grad_full(i, y).dot(x - y);
}

double CompositeProblem::bregman_batch(int i, int j, const Vector& x, const Vector& y) const {
    return value_batch(i, j, x) - value_batch(i, j, y) - grad_batch(i, j, y).dot(x - y);
}

Matrix CompositeProblem::prox(double eta, const Matrix& V) const {
    if (eta <= 0.0) throw std::invalid_argument("prox: eta must be positive");
    if (reg_.kind == RegularizerKind::zero) return V;
    const double t = eta * reg_.weight;
    return V.unaryExpr([t](double v) { return std::copysign(std::max(std::abs(v) - t, 0.0), v); });
}

Vector CompositeProblem::prox_vec(double eta, const Vector& v) const {
    if (eta <= 0.0) throw std::invalid_argument("prox: eta must be positive");
    if (reg_.kind == RegularizerKind::zero) return v;
    const double t = eta * reg_.weight;
    return v.unaryExpr([t](double x) { return std::copysign(std::max(std::abs(x) - t, 0.0), x); });
}

double CompositeProblem::objective(const Vector& x) const {
    double v = 0.0;
    for (int i = 0; i < n_; ++i) v += value_full(i, x);
    return v / static_cast<double>(n_) + reg_.value(x);
}

Matrix ReferenceSolution::Z_star_for(double e) const {
    const Vector z = z_star_for(e);
    Matrix Z(X_star.rows(), X_star.cols());
    Z.rowwise() = z.transpose();
    return Z;
}

namespace {

// Smooth all-quadratic instances have a closed-form optimum.
bool direct_solvable(const CompositeProblem& prob) {
    if (prob.regularizer().kind != RegularizerKind::zero) return false;
    for (int i = 0; i < prob.nodes(); ++i)
        for (int j = 0; j < prob.batches_per_node(); ++j)
            if (!prob.batch(i, j).is_quadratic()) return false;
    return true;
}

Vector mean_gradient(const CompositeProblem& prob, const Vector& x) {
    Vector g = Vector::Zero(prob.dim());
    for (int i = 0; i < prob.nodes(); ++i) g += prob.grad_full(i, x);
    return g / static_cast<double>(prob.nodes());
}

}  // namespace

ReferenceSolution solve_reference(const CompositeProblem& prob, double eta, double tol,
                                  long max_iters) {
    if (eta <= 0.0) throw std::invalid_argument("solve_reference: eta must be positive");
    const int p = prob.dim();
    ReferenceSolution ref;
    ref.eta = eta;

    if (direct_solvable(prob)) {
        // grad of the mean objective is (mean A) x - (mean b); solve it.
        const Vector e0 = Vector::Zero(p);
        Matrix A_bar = Matrix::Zero(p, p);
        // One hess_vec per basis vector recovers mean A exactly.
        for (int c = 0; c < p; ++c) {
            Vector ec = Vector::Zero(p);
            ec(c) = 1.0;
            Vector col = Vector::Zero(p);
            for (int i = 0; i < prob.nodes(); ++i)
                for (int j = 0; j < prob.batches_per_node(); ++j)
                    col += prob.batch(i, j).hess_vec(e0, ec);
            A_bar.col(c) = col / double(prob.nodes() * prob.batches_per_node());
        }
        const Vector b_bar = -mean_gradient(prob, e0);
        ref.x_star = A_bar.ldlt().solve(b_bar);
        ref.tol = (A_bar * ref.x_star - b_bar).norm();
        ref.iterations = 0;
    } else {
        // FISTA with function-value restart, fixed step 1/L.
        const double L = prob.smoothness();
        Vector x = Vector::Zero(p);
        Vector y = x;
        double t = 1.0;
        double best_obj = prob.objective(x);
        long it = 0;
        for (; it < max_iters; ++it) {
            const Vector x_new = prob.prox_vec(1.0 / L, y - mean_gradient(prob, y) / L);
            const double change = (x_new - x).norm();
            const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = x_new + ((t - 1.0) / t_new) * (x_new - x);
            x = x_new;
            t = t_new;
            const double obj = prob.objective(x);
            if (obj > best_obj) {  // restart the momentum
                t = 1.0;
                y = x;
            }
            best_obj = std::min(best_obj, obj);
            if (change <= tol) break;
        }
        if (it >= max_iters)
            throw std::runtime_error("solve_reference: no convergence within iteration cap");
        ref.x_star = x;
        ref.tol = tol;
        ref.iterations = it + 1;
    }

    const int n = prob.nodes();
    ref.X_star = Matrix(n, p);
    ref.X_star.rowwise() = ref.x_star.transpose();
    ref.grad_star = prob.grad_matrix(ref.X_star);
    ref.mean_grad = ref.grad_star.colwise().mean();
    // Dual fixed point: the value of D that holds Z stationary at Z*,
    // D* = (11'/n - I) grad F(X*).
    ref.D_star = -(ref.grad_star.rowwise() - ref.mean_grad.transpose());
    ref.Z_star = ref.Z_star_for(eta);
    ref.obj_star = prob.objective(ref.x_star);
    return ref;
}

ProblemKind problem_kind_from_string(std::string_view s) {
    if (s == "quadratic") return ProblemKind::quadratic;
    if (s == "logistic") return ProblemKind::logistic;
    throw config_error("unknown problem kind: " + std::string(s));
}

CompositeProblem generate_synthetic(uint64_t seed, int n, int m, int p, ProblemKind kind,
                                    double heterogeneity, double l1, double l2) {
    if (n < 1 || m < 1 || p < 1)
        throw std::invalid_argument("generate_synthetic: dimensions must be positive");
    if (heterogeneity < 0.0)
        throw std::invalid_argument("generate_synthetic: heterogeneity must be >= 0");
    RngStream rng(seed, 0, "data");

    std::vector<std::vector<BatchFunction>> batches;
    batches.reserve(n);

    if (kind == ProblemKind::quadratic) {
        Vector center(p);
        for (int c = 0; c < p; ++c) center(c) = rng.normal();
        for (int i = 0; i < n; ++i) {
            Vector node_shift(p);
            for (int c = 0; c < p; ++c) node_shift(c) = rng.normal();
            std::vector<BatchFunction> row;
            row.reserve(m);
            for (int j = 0; j < m; ++j) {
                Vector d(p), jitter(p);
                for (int c = 0; c < p; ++c) d(c) = 1.0 + rng.uniform();  // curvature in [1, 2]
                for (int c = 0; c < p; ++c) jitter(c) = rng.normal();
                d.array() += 2.0 * l2;
                const Vector c_ij = center + heterogeneity * (node_shift + 0.3 * jitter);
                QuadraticBatch q{Matrix(d.asDiagonal()), d.cwiseProduct(c_ij)};
                row.emplace_back(std::move(q));
            }
            batches.push_back(std::move(row));
        }
    } else {
        const int samples = 10;       // per batch
        const double scale = 0.25;    // feature magnitude; keeps kappa_f modest
        Vector w(p);
        for (int c = 0; c < p; ++c) w(c) = rng.normal();
        for (int i = 0; i < n; ++i) {
            const double balance_shift = heterogeneity * rng.normal();
            std::vector<BatchFunction> row;
            row.reserve(m);
            for (int j = 0; j < m; ++j) {
                Matrix feats(samples, p);
                for (int r = 0; r < samples; ++r)
                    for (int c = 0; c < p; ++c) feats(r, c) = scale * rng.normal();
                Vector labels(samples);
                for (int r = 0; r < samples; ++r) {
                    const double logit = feats.row(r).dot(w) / scale + balance_shift;
                    labels(r) = rng.bernoulli(sigmoid(logit)) ? 1.0 : 0.0;
                }
                row.emplace_back(LogisticBatch{std::move(feats), std::move(labels), l2});
            }
            batches.push_back(std::move(row));
        }
    }

    Regularizer reg;
    if (l1 > 0.0) reg = Regularizer{RegularizerKind::l1, l1};
    return CompositeProblem(std::move(batches), reg);
}

}  // namespace dcosim
