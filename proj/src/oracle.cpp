#include "dcosim/oracle.hpp"

#include <cmath>

namespace dcosim {

OracleKind oracle_kind_from_string(std::string_view s) {
    if (s == "full") return OracleKind::full;
    if (s == "sgd") return OracleKind::sgd;
    if (s == "lsvrg") return OracleKind::lsvrg;
    if (s == "saga") return OracleKind::saga;
    throw config_error("unknown oracle kind: " + std::string(s));
}

OracleState OracleState::init(OracleKind kind, const CompositeProblem& prob, const Matrix& X0,
                              double refresh_prob) {
    OracleState o;
    o.kind_ = kind;
    o.n_ = prob.nodes();
    o.m_ = prob.batches_per_node();
    o.p_ = prob.dim();
    if (X0.rows() != o.n_ || X0.cols() != o.p_)
        throw std::invalid_argument("oracle init: X0 shape mismatch");

    if (kind == OracleKind::lsvrg) {
        o.refresh_prob_ = refresh_prob < 0.0 ? 1.0 / o.m_ : refresh_prob;
        if (!(o.refresh_prob_ > 0.0 && o.refresh_prob_ <= 1.0))
            throw std::invalid_argument("oracle init: lsvrg refresh prob must be in (0, 1]");
        o.ref_points_ = X0;
        o.ref_grads_ = prob.grad_matrix(X0);
        o.grad_evals_ += static_cast<long long>(o.n_) * o.m_;
    } else if (kind == OracleKind::saga) {
        o.table_.reserve(o.n_);
        o.table_points_.reserve(o.n_);
        o.table_mean_ = Matrix::Zero(o.n_, o.p_);
        for (int i = 0; i < o.n_; ++i) {
            Matrix t(o.m_, o.p_);
            Matrix pts(o.m_, o.p_);
            for (int j = 0; j < o.m_; ++j) {
                t.row(j) = prob.grad_batch(i, j, X0.row(i).transpose()).transpose();
                pts.row(j) = X0.row(i);
            }
            o.table_mean_.row(i) = t.colwise().mean();
            o.table_.push_back(std::move(t));
            o.table_points_.push_back(std::move(pts));
        }
        o.grad_evals_ += static_cast<long long>(o.n_) * o.m_;
    }
    return o;
}

void OracleState::set_sampling(Matrix probs) {
    if (probs.rows() != n_ || probs.cols() != m_)
        throw std::invalid_argument("set_sampling: shape mismatch");
    if ((probs.array() <= 0.0).any())
        throw std::invalid_argument("set_sampling: probabilities must be positive");
    if (((probs.rowwise().sum().array() - 1.0).abs() > 1e-12).any())
        throw std::invalid_argument("set_sampling: rows must sum to 1");
    sampling_ = std::move(probs);
}

double OracleState::sampling_prob(int i, int l) const {
    return sampling_.size() == 0 ? 1.0 / m_ : sampling_(i, l);
}

int OracleState::sample_index(int i, RngStream& rng) const {
    if (sampling_.size() == 0) return rng.uniform_int(m_);
    double u = rng.uniform();
    double acc = 0.0;
    for (int l = 0; l < m_; ++l) {
        acc += sampling_(i, l);
        if (u < acc) return l;
    }
    return m_ - 1;
}

Vector OracleState::estimator_for(const CompositeProblem& prob, int i, const Vector& x,
                                  int l) const {
    const double w = 1.0 / (m_ * sampling_prob(i, l));
    switch (kind_) {
        case OracleKind::full:
            return prob.grad_full(i, x);
        case OracleKind::sgd:
            return w * prob.grad_batch(i, l, x);
        case OracleKind::lsvrg:
            return w * (prob.grad_batch(i, l, x) -
                        prob.grad_batch(i, l, ref_points_.row(i).transpose())) +
                   ref_grads_.row(i).transpose();
        case OracleKind::saga:
            return w * (prob.grad_batch(i, l, x) - table_[i].row(l).transpose()) +
                   table_mean_.row(i).transpose();
    }
    throw std::logic_error("unreachable");
}

Matrix OracleState::sample(const CompositeProblem& prob, const Matrix& X, RngStream& rng) {
    if (X.rows() != n_ || X.cols() != p_)
        throw std::invalid_argument("oracle sample: X shape mismatch");
    if (!X.allFinite()) throw std::invalid_argument("oracle sample: non-finite iterate");

    Matrix G(n_, p_);
    switch (kind_) {
        case OracleKind::full:
            G = prob.grad_matrix(X);
            grad_evals_ += static_cast<long long>(n_) * m_;
            break;
        case OracleKind::sgd:
            for (int i = 0; i < n_; ++i) {
                const int l = sample_index(i, rng);
                G.row(i) = estimator_for(prob, i, X.row(i).transpose(), l).transpose();
            }
            grad_evals_ += n_;
            break;
        case OracleKind::lsvrg:
            for (int i = 0; i < n_; ++i) {
                const int l = sample_index(i, rng);
                const Vector x = X.row(i).transpose();
                G.row(i) = estimator_for(prob, i, x, l).transpose();
                grad_evals_ += 2;  // batch gradient at x and at the reference
                // The reference update is a separate assignment: omega is
                // drawn after the estimator is formed.
                if (rng.bernoulli(refresh_prob_)) {
                    ref_points_.row(i) = X.row(i);
                    ref_grads_.row(i) = prob.grad_full(i, x).transpose();
                    grad_evals_ += m_;
                }
            }
            break;
        case OracleKind::saga:
            for (int i = 0; i < n_; ++i) {
                const int l = sample_index(i, rng);
                const Vector x = X.row(i).transpose();
                const Vector g_new = prob.grad_batch(i, l, x);
                const double w = 1.0 / (m_ * sampling_prob(i, l));
                G.row(i) = (w * (g_new - table_[i].row(l).transpose()) +
                            table_mean_.row(i).transpose())
                               .transpose();
                // The fresh batch gradient replaces the table entry, so it
                // counts once.
                table_mean_.row(i) += (g_new.transpose() - table_[i].row(l)) / m_;
                table_[i].row(l) = g_new.transpose();
                table_points_[i].row(l) = X.row(i);
                grad_evals_ += 1;
            }
            break;
    }
    return G;
}

double OracleState::variance_at(const CompositeProblem& prob, const Vector& x, int trials,
                                RngStream* rng) const {
    if (kind_ == OracleKind::full) return 0.0;
    double total = 0.0;
    const bool enumerate = m_ <= 4096;
    for (int i = 0; i < n_; ++i) {
        const Vector mean = prob.grad_full(i, x);
        double var_i = 0.0;
        if (enumerate) {
            for (int l = 0; l < m_; ++l)
                var_i += sampling_prob(i, l) *
                         (estimator_for(prob, i, x, l) - mean).squaredNorm();
        } else {
            if (!rng) throw std::invalid_argument("variance_at: rng needed for sampling");
            for (int t = 0; t < trials; ++t) {
                const int l = sample_index(i, *rng);
                var_i += (estimator_for(prob, i, x, l) - mean).squaredNorm();
            }
            var_i /= trials;
        }
        total += var_i;
    }
    return total / n_;
}

const Matrix& OracleState::ref_points() const {
    if (kind_ != OracleKind::lsvrg) throw std::logic_error("oracle has no lsvrg references");
    return ref_points_;
}

const Matrix& OracleState::ref_grads() const {
    if (kind_ != OracleKind::lsvrg) throw std::logic_error("oracle has no lsvrg references");
    return ref_grads_;
}

const Matrix& OracleState::saga_table(int i) const {
    if (kind_ != OracleKind::saga) throw std::logic_error("oracle has no saga table");
    return table_.at(i);
}

const Matrix& OracleState::saga_points(int i) const {
    if (kind_ != OracleKind::saga) throw std::logic_error("oracle has no saga table");
    return table_points_.at(i);
}

const Matrix& OracleState::saga_mean() const {
    if (kind_ != OracleKind::saga) throw std::logic_error("oracle has no saga table");
    return table_mean_;
}

double OracleState::saga_mean_drift() const {
    if (kind_ != OracleKind::saga) return 0.0;
    double worst = 0.0;
    for (int i = 0; i < n_; ++i) {
        const Matrix diff = table_mean_.row(i) - table_[i].colwise().mean();
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace dcosim
