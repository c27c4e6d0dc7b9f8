#include "dcosim/algorithms.hpp"

#include <cmath>

namespace dcosim {

Params::Source params_source_from_string(std::string_view s) {
    if (s == "thm5") return Params::Source::thm5;
    if (s == "cor6") return Params::Source::cor6;
    if (s == "thm7") return Params::Source::thm7;
    if (s == "thm8") return Params::Source::thm8;
    if (s == "thm9") return Params::Source::thm9;
    if (s == "experimental") return Params::Source::experimental;
    throw config_error("unknown params source: " + std::string(s));
}

Params::Resolved Params::at(long k) const {
    if (!diminishing) return {eta, alpha, gamma};
    const double B = 16.0 * (1.0 + C) * (1.0 + C) * kappa_g * kappa_f;
    const double e = (B / 2.0) / (static_cast<double>(k) + B) / L;
    const double a = e * mu / (1.0 + C);
    const double g = e * mu / (2.0 * (1.0 + C) * (1.0 + C) * lam_max);
    return {e, a, g};
}

Params select_params(Params::Source source, double mu, double L, double C,
                     const SpectralInfo& spectral, int m, double lsvrg_p,
                     double eta_override) {
    if (!(mu > 0.0)) throw std::invalid_argument("select_params: mu must be positive");
    if (!(L >= mu)) throw std::invalid_argument("select_params: need L >= mu");
    if (C < 0.0) throw std::invalid_argument("select_params: C must be >= 0");
    if (!(spectral.lam_max > 0.0 && spectral.lam_min_nz > 0.0))
        throw std::invalid_argument("select_params: invalid spectral info");

    const double lam_max = spectral.lam_max;
    const double kappa_f = L / mu;
    const bool has_override = std::isfinite(eta_override);

    Params p;
    p.source = source;
    switch (source) {
        case Params::Source::thm5: {
            if (C == 0.0) {
                p = select_params(Params::Source::cor6, mu, L, C, spectral, m, lsvrg_p,
                                  eta_override);
                p.source = Params::Source::thm5;
                return p;
            }
            p.eta = has_override ? eta_override : 1.0 / (2.0 * L);
            if (!(p.eta > 0.0 && p.eta <= 1.0 / (2.0 * L)))
                throw std::invalid_argument("select_params: thm5 needs eta in (0, 1/2L]");
            // interior points of the open alpha interval and the gamma bound
            p.alpha = 0.5 * std::min(p.eta * mu / std::sqrt(C), 1.0 / (1.0 + C));
            const double delta = p.alpha - (1.0 + C) * p.alpha * p.alpha;
            p.gamma = std::min((2.0 * p.eta * mu - 2.0 * std::sqrt(C) * p.alpha) /
                                   (lam_max * p.eta * mu),
                               delta / (std::sqrt(C) * lam_max));
            break;
        }
        case Params::Source::cor6: {
            p.eta = has_override ? eta_override : 1.0 / (2.0 * L);
            if (!(p.eta > 0.0 && p.eta <= 1.0 / (2.0 * L)))
                throw std::invalid_argument("select_params: cor6 needs eta in (0, 1/2L]");
            p.alpha = 1.0;
            p.gamma = 1.0;
            break;
        }
        case Params::Source::thm7: {
            p.diminishing = true;
            p.mu = mu;
            p.L = L;
            p.C = C;
            p.lam_max = lam_max;
            p.kappa_f = kappa_f;
            p.kappa_g = spectral.kappa_g;
            const auto r0 = p.at(0);
            p.eta = r0.eta;
            p.alpha = r0.alpha;
            p.gamma = r0.gamma;
            break;
        }
        case Params::Source::thm8:
        case Params::Source::thm9: {
            if (source == Params::Source::thm8 && !(lsvrg_p > 0.0 && lsvrg_p < 1.0))
                throw std::invalid_argument("select_params: thm8 needs refresh prob in (0,1)");
            if (m < 1) throw std::invalid_argument("select_params: need m >= 1 batches");
            p.eta = has_override ? eta_override : 1.0 / (6.0 * L);
            if (!(p.eta > 0.0))
                throw std::invalid_argument("select_params: eta must be positive");
            p.alpha = 1.0 / (12.0 * (1.0 + C) * kappa_f);
            const double second = 1.0 / (24.0 * (1.0 + C) * lam_max);
            p.gamma = C == 0.0
                          ? second
                          : std::min(1.0 / (24.0 * std::sqrt(C) * (1.0 + C) * lam_max * kappa_f),
                                     second);
            break;
        }
        case Params::Source::experimental: {
            if (!has_override)
                throw std::invalid_argument("select_params: experimental source needs eta");
            if (!(eta_override >= 0.01 && eta_override <= 0.1))
                throw std::invalid_argument(
                    "select_params: experimental eta must lie in [0.01, 0.1]");
            p.eta = eta_override;
            p.alpha = 0.5;
            p.gamma = 1.0;
            break;
        }
    }
    if (!(p.gamma > 0.0 && p.gamma < 2.0 / lam_max))
        throw std::invalid_argument("select_params: gamma outside (0, 2/lam_max)");
    if (!(p.alpha > 0.0 && p.alpha <= 1.0))
        throw std::invalid_argument("select_params: alpha outside (0, 1]");
    return p;
}

void check_iterate(const Matrix& X) {
    if (!X.allFinite() || X.norm() > 1e12)
        throw divergence_error("iterates diverged (non-finite or runaway norm)");
}

CommResult comm(const Matrix& Z, const Matrix& H, const Matrix& H_w, double alpha,
                const CompressorSpec& comp, const Network& net, RngStream& rng) {
    const int n = net.size();
    if (Z.rows() != n || H.rows() != n || H_w.rows() != n || Z.cols() != H.cols() ||
        Z.cols() != H_w.cols())
        throw std::invalid_argument("comm: shape mismatch");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("comm: alpha must lie in (0, 1]");

    const int p = static_cast<int>(Z.cols());
    Matrix Q(n, p);
    for (int i = 0; i < n; ++i)
        Q.row(i) = compress(comp, (Z.row(i) - H.row(i)).transpose(), rng).y.transpose();

    CommResult r;
    r.z_hat = H + Q;
    r.z_hat_w = H_w + net.mix(Q);
    r.h_next = (1.0 - alpha) * H + alpha * r.z_hat;
    r.h_w_next = (1.0 - alpha) * H_w + alpha * r.z_hat_w;
    r.bits = static_cast<long long>(n) * bit_count(comp, p);
    return r;
}

AlgorithmState make_state(Matrix X, Matrix D, Matrix H, const Network& net) {
    AlgorithmState s;
    s.H_w = net.mix(H);
    s.X = std::move(X);
    s.D = std::move(D);
    s.H = std::move(H);
    s.k = 1;
    return s;
}

namespace {

AlgorithmState bootstrap(const CompositeProblem& prob, OracleState& oracle, const Network& net,
                         const Params& params, const Matrix& X0, RngStream& oracle_rng,
                         bool with_prox) {
    if (X0.rows() != net.size() || X0.cols() != prob.dim())
        throw std::invalid_argument("init: X0 shape mismatch");
    AlgorithmState s;
    s.H = X0;
    s.H_w = net.mix(s.H);
    s.D = Matrix::Zero(X0.rows(), X0.cols());
    const auto rp = params.at(0);
    const Matrix G0 = oracle.sample(prob, X0, oracle_rng);
    const Matrix Z1 = X0 - rp.eta * G0;
    s.X = with_prox ? prob.prox(rp.eta, Z1) : Z1;
    s.k = 1;
    s.bits_sent = 0;
    return s;
}

}  // namespace

AlgorithmState init_prox_lead(const CompositeProblem& prob, OracleState& oracle,
                              const Network& net, const Params& params, const Matrix& X0,
                              RngStream& oracle_rng) {
    return bootstrap(prob, oracle, net, params, X0, oracle_rng, true);
}

AlgorithmState init_lead(const CompositeProblem& prob, OracleState& oracle, const Network& net,
                         const Params& params, const Matrix& X0, RngStream& oracle_rng) {
    return bootstrap(prob, oracle, net, params, X0, oracle_rng, false);
}

namespace {

void primal_dual_step(AlgorithmState& s, const CompositeProblem& prob, OracleState& oracle,
                      const CompressorSpec& comp, const Network& net, const Params& params,
                      RngStream& oracle_rng, RngStream& comp_rng, bool with_prox,
                      StepTrace* trace) {
    const auto rp = params.at(s.k);
    const Matrix G = oracle.sample(prob, s.X, oracle_rng);
    const Matrix Z = s.X - rp.eta * G - rp.eta * s.D;
    CommResult c = comm(Z, s.H, s.H_w, rp.alpha, comp, net, comp_rng);
    const Matrix gossip_gap = c.z_hat - c.z_hat_w;  // (I - W) Zhat
    if (trace) {
        trace->X_before = s.X;
        trace->D_before = s.D;
        trace->G = G;
        trace->Z = Z;
        trace->used = rp;
        trace->bits = c.bits;
    }
    const Matrix D_next = s.D + (rp.gamma / (2.0 * rp.eta)) * gossip_gap;
    if (with_prox) {
        const Matrix V = Z - (rp.gamma / 2.0) * gossip_gap;
        s.X = prob.prox(rp.eta, V);
    } else {
        s.X = s.X - rp.eta * G - rp.eta * D_next;
    }
    s.D = D_next;
    s.H = std::move(c.h_next);
    s.H_w = std::move(c.h_w_next);
    s.bits_sent += c.bits;
    s.k += 1;
    check_iterate(s.X);
}

}  // namespace

void prox_lead_step(AlgorithmState& s, const CompositeProblem& prob, OracleState& oracle,
                    const CompressorSpec& comp, const Network& net, const Params& params,
                    RngStream& oracle_rng, RngStream& comp_rng, StepTrace* trace) {
    primal_dual_step(s, prob, oracle, comp, net, params, oracle_rng, comp_rng, true, trace);
}

void lead_step(AlgorithmState& s, const CompositeProblem& prob, OracleState& oracle,
               const CompressorSpec& comp, const Network& net, const Params& params,
               RngStream& oracle_rng, RngStream& comp_rng, StepTrace* trace) {
    primal_dual_step(s, prob, oracle, comp, net, params, oracle_rng, comp_rng, false, trace);
}

Matrix dgd_step(const Matrix& X, const CompositeProblem& prob, const Network& net, double eta) {
    if (eta <= 0.0) throw std::invalid_argument("dgd_step: eta must be positive");
    Matrix X_next = net.mix(X) - eta * prob.grad_matrix(X);
    if (prob.regularizer().kind != RegularizerKind::zero) X_next = prob.prox(eta, X_next);
    check_iterate(X_next);
    return X_next;
}

void nids_step(AlgorithmState& s, const CompositeProblem& prob, const Network& net, double eta) {
    if (eta <= 0.0) throw std::invalid_argument("nids_step: eta must be positive");
    const Matrix X_bar = s.X - eta * prob.grad_matrix(s.X) - eta * s.D;
    const Matrix gap = X_bar - net.mix(X_bar);  // (I - W) X_bar
    s.D = s.D + 0.5 * gap;
    s.X = prob.prox(eta, X_bar - (eta / 2.0) * gap);
    s.k += 1;
    s.bits_sent += static_cast<long long>(net.size()) * 32ll * prob.dim();
    check_iterate(s.X);
}

LyapunovSnapshot lyapunov(const AlgorithmState& s, const ReferenceSolution& ref,
                          const Params::Resolved& rp, double C, const CompositeProblem& prob,
                          const Network& net, const OracleState* oracle) {
    LyapunovSnapshot snap;
    const double lam_max = net.spectral().lam_max;
    const double sqrt_c = std::sqrt(C);
    snap.m_factor = 1.0 - sqrt_c * rp.alpha / (1.0 - 0.5 * rp.gamma * lam_max);
    const double kappa_f = prob.smoothness() / prob.mu();
    snap.m_tilde = 1.0 - 2.0 * sqrt_c / (3.0 * (1.0 + C) * kappa_f);

    if (net.ones_component_norm(s.D - ref.D_star) > 1e-8)
        throw std::invalid_argument("lyapunov: D has a nonzero row-sum component");

    const Matrix Z_star = ref.Z_star_for(rp.eta);
    snap.x_term = snap.m_factor * (s.X - ref.X_star).squaredNorm();
    snap.d_term = (2.0 * rp.eta * rp.eta / rp.gamma) * net.pinv_norm_sq(s.D - ref.D_star);
    snap.h_term = sqrt_c * (s.H - Z_star).squaredNorm();
    snap.phi = snap.x_term + snap.d_term + snap.h_term;

    snap.bregman_term = 0.0;
    if (oracle && oracle->kind() == OracleKind::lsvrg) {
        double sum = 0.0;
        for (int i = 0; i < prob.nodes(); ++i)
            sum += prob.bregman_full(i, oracle->ref_points().row(i).transpose(), ref.x_star);
        snap.bregman_term = 2.0 / (9.0 * oracle->refresh_prob() * prob.smoothness()) * sum;
    } else if (oracle && oracle->kind() == OracleKind::saga) {
        double sum = 0.0;
        for (int i = 0; i < prob.nodes(); ++i)
            for (int j = 0; j < prob.batches_per_node(); ++j)
                sum += prob.bregman_batch(i, j, oracle->saga_points(i).row(j).transpose(),
                                          ref.x_star);
        snap.bregman_term = 2.0 / (9.0 * prob.smoothness()) * sum;
    }
    snap.phi_tilde = snap.phi + snap.bregman_term;
    return snap;
}

IdentityCheck z_distance_identity(const StepTrace& t, const ReferenceSolution& ref) {
    const double eta = t.used.eta;
    const Matrix Z_star = ref.Z_star_for(eta);
    const Matrix A = t.X_before - ref.X_star - eta * t.G + eta * ref.grad_star;
    const Matrix B = t.D_before - ref.D_star;
    IdentityCheck c;
    c.lhs = (t.Z - Z_star).squaredNorm();
    const double t1 = A.squaredNorm();
    const double t2 = eta * eta * B.squaredNorm();
    const double t3 = -2.0 * eta * (B.array() * A.array()).sum();
    c.rhs = t1 + t2 + t3;
    const double scale = std::max({c.lhs, t1, t2, std::abs(t3), 1e-300});
    c.rel_err = std::abs(c.lhs - c.rhs) / scale;
    return c;
}

}  // namespace dcosim
