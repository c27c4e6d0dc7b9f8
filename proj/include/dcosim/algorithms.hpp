#pragma once

#include <limits>
#include <string_view>

#include "dcosim/compression.hpp"
#include "dcosim/oracle.hpp"
#include "dcosim/problem.hpp"
#include "dcosim/topology.hpp"

namespace dcosim {

// Stepsize triple (eta, alpha, gamma). Fixed-schedule sources produce one
// triple; the diminishing source produces a per-iteration schedule
//   eta^k  = 8(1+C)^2 kg kf / (k + 16(1+C)^2 kg kf) * (1/L)
//   alpha^k = eta^k mu / (1+C)
//   gamma^k = eta^k mu / (2 (1+C)^2 lam_max)
struct Params {
    enum class Source { thm5, cor6, thm7, thm8, thm9, experimental };

    Source source = Source::cor6;
    double eta = 0.0, alpha = 1.0, gamma = 1.0;
    bool diminishing = false;
    // schedule constants, filled for the diminishing source
    double mu = 0.0, L = 0.0, C = 0.0, lam_max = 0.0, kappa_f = 0.0, kappa_g = 0.0;

    struct Resolved {
        double eta, alpha, gamma;
    };
    Resolved at(long k) const;
};

Params::Source params_source_from_string(std::string_view s);

// Parameter selection per source. eta_override, when finite, replaces the
// source's eta (alpha/gamma formulas that depend on eta are recomputed with
// it). m and lsvrg_p only matter for the finite-sum sources' rate
// diagnostics; C is the compressor's noise-to-signal constant.
Params select_params(Params::Source source, double mu, double L, double C,
                     const SpectralInfo& spectral, int m = 1, double lsvrg_p = 1.0,
                     double eta_override = std::numeric_limits<double>::quiet_NaN());

// Full iterate of the compressed primal-dual loop. H_w tracks W*H
// incrementally; rows of D always sum to the zero vector.
struct AlgorithmState {
    Matrix X, D, H, H_w;
    long k = 0;
    long long bits_sent = 0;
};

// Observable internals of one step; the runtime identity checks need the
// pre-update iterate and the formed Z.
struct StepTrace {
    Matrix X_before, D_before, G, Z;
    Params::Resolved used{0, 0, 0};
    long long bits = 0;
};

struct CommResult {
    Matrix z_hat, z_hat_w, h_next, h_w_next;
    long long bits = 0;
};

// Difference compression + one gossip exchange: each node compresses its own
// row of Z - H, then
//   Zhat   = H + Q         Zhat_w = H_w + W Q
//   H'     = (1-a) H + a Zhat     H_w' = (1-a) H_w + a Zhat_w
CommResult comm(const Matrix& Z, const Matrix& H, const Matrix& H_w, double alpha,
                const CompressorSpec& comp, const Network& net, RngStream& rng);

// State with prescribed (X, D, H) and H_w = W*H (fixed-point experiments).
AlgorithmState make_state(Matrix X, Matrix D, Matrix H, const Network& net);

// Bootstrap: H^1 = X^0, H_w^1 = W H^1, D^1 = 0, one oracle sample at X^0,
// Z^1 = X^0 - eta G^0, X^1 = prox(Z^1) (no communication, no bits).
AlgorithmState init_prox_lead(const CompositeProblem& prob, OracleState& oracle,
                              const Network& net, const Params& params, const Matrix& X0,
                              RngStream& oracle_rng);

// Same bootstrap without the prox (smooth loop).
AlgorithmState init_lead(const CompositeProblem& prob, OracleState& oracle, const Network& net,
                         const Params& params, const Matrix& X0, RngStream& oracle_rng);

// One iteration of the compressed proximal primal-dual loop:
//   G = SGO(X); Z = X - eta G - eta D
//   (Zhat, Zhat_w, H', H_w') = comm(Z, H, H_w, alpha)
//   D' = D + gamma/(2 eta) (Zhat - Zhat_w)
//   V  = Z - gamma/2 (Zhat - Zhat_w);  X' = prox_{eta r}(V)
void prox_lead_step(AlgorithmState& s, const CompositeProblem& prob, OracleState& oracle,
                    const CompressorSpec& comp, const Network& net, const Params& params,
                    RngStream& oracle_rng, RngStream& comp_rng, StepTrace* trace = nullptr);

// The smooth variant: same through D', then X' = X - eta G - eta D'
// (the gradient from the Z line is reused).
void lead_step(AlgorithmState& s, const CompositeProblem& prob, OracleState& oracle,
               const CompressorSpec& comp, const Network& net, const Params& params,
               RngStream& oracle_rng, RngStream& comp_rng, StepTrace* trace = nullptr);

// Classic gossip-gradient baseline, full gradient:
// X' = prox_{eta r}(W X - eta grad F(X)). Plateaus away from the optimum on
// heterogeneous data with constant eta.
Matrix dgd_step(const Matrix& X, const CompositeProblem& prob, const Network& net, double eta);

// Exact-convergent uncompressed baseline (three-line primal-dual iteration
// with unit dual stepsize plus rowwise prox). Trajectory-identical to
// prox_lead_step with the identity compressor and gamma = eta.
void nids_step(AlgorithmState& s, const CompositeProblem& prob, const Network& net, double eta);

// Weighted squared distances of (X, D, H) to their fixed points:
//   phi = M ||X - X*||^2 + (2 eta^2/gamma) ||D - D*||^2_{(I-W)^+}
//         + sqrt(C) ||H - Z*||^2,   M = 1 - sqrt(C) a / (1 - g/2 lam_max)
// phi_tilde adds the variance-reduction Bregman terms:
//   lsvrg: (2 / (9 p L)) sum_i V_{f_i}(ref_i, x*)
//   saga:  (2 / (9 L))  sum_ij V_{f_ij}(table point, x*)
struct LyapunovSnapshot {
    double phi = 0.0;
    double phi_tilde = 0.0;
    double x_term = 0.0, d_term = 0.0, h_term = 0.0, bregman_term = 0.0;
    double m_factor = 1.0;  // M above
    double m_tilde = 1.0;   // 1 - 2 sqrt(C) / (3 (1+C) kappa_f)
};

LyapunovSnapshot lyapunov(const AlgorithmState& s, const ReferenceSolution& ref,
                          const Params::Resolved& rp, double C, const CompositeProblem& prob,
                          const Network& net, const OracleState* oracle = nullptr);

// Both sides of the one-step Z-distance expansion
//   ||Z - Z*||^2 = ||A||^2 + eta^2 ||B||^2 - 2 eta <B, A>,
//   A = X - X* - eta G + eta grad F(X*),  B = D - D*,
// evaluated on a step trace. rel_err is against the largest term magnitude.
struct IdentityCheck {
    double lhs = 0.0, rhs = 0.0, rel_err = 0.0;
};
IdentityCheck z_distance_identity(const StepTrace& t, const ReferenceSolution& ref);

// Throws divergence_error on non-finite entries or runaway norm.
void check_iterate(const Matrix& X);

}  // namespace dcosim
