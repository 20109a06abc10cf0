#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sopool/aggregate.hpp"
#include "sopool/matrix.hpp"

namespace sopool {

enum class PoolKind { Average, Gamma, MaxExp, SigmE, SigmETrace, AsinhE };

std::string_view to_string(PoolKind kind);
/// Accepts "Average", "Gamma", "MaxExp", "SigmE", "SigmE-trace", "AsinhE"
/// (case-insensitive).
std::optional<PoolKind> parse_pool_kind(std::string_view name);

/// True for the kinds that divide M by trace(M) + λ.
bool uses_trace_normalization(PoolKind kind);

/// Pooling hyperparameters. Defaults are test fixtures, not tuned values.
struct PNConfig {
  PoolKind kind = PoolKind::Average;
  double gamma = 0.5;        // Gamma exponent, (0, 1]
  double eta = 20.0;         // MaxExp exponent, >= 1
  double gamma_prime = 10.0; // AsinhE slope, > 0
  double eta_prime = 20.0;   // SigmE slope, >= 1
  double lambda = 1e-6;      // regularizer; > 0 wherever it guards a trace division
  double beta = 0.0;         // centering weight, [0, 1]
  double kappa = 1e-3;       // residual weight, >= 0

  bool trace_comp = false;   // multiply Ψ by (trace(M) + λ)^trace_comp_exponent
  double trace_comp_exponent = 0.5;
  bool residual = false;     // add κ·M

  // Fault injection for the verify command: flips the sign of the trace
  // coupling term in the MaxExp backward pass.
  bool flip_maxexp_sign = false;

  /// Validation error on any violated constraint, including β > 0 with Gamma
  /// or MaxExp.
  void validate() const;
};

/// Upstream gradient dℓ/dΨ and the resulting dℓ/dΦ (d×N).
struct PoolGradient {
  SymMatrix upstream;
  Matrix dphi;
};

/// 1 − (1 − p)^η for a single normalized entry p ∈ [0, 1].
double maxexp_scalar(double p, double eta);

SymMatrix average_fwd(const CoocMatrix& m);
/// (λ + M)^γ element-wise. Domain error on a negative entry.
SymMatrix gamma_fwd(const CoocMatrix& m, const PNConfig& cfg);
/// 1 − (1 − M/(tr + λ))^η element-wise. Domain error on a negative entry.
SymMatrix maxexp_fwd(const CoocMatrix& m, const PNConfig& cfg);
/// 2/(1 + exp(−η'X)) − 1 with X = M, or X = M/(tr + λ) for SigmETrace.
SymMatrix sigme_fwd(const CoocMatrix& m, const PNConfig& cfg);
/// asinh(γ'M) element-wise.
SymMatrix asinhe_fwd(const CoocMatrix& m, const PNConfig& cfg);

/// Ψ·(tr + λ)^e when cfg.trace_comp, then + κ·M when cfg.residual.
SymMatrix apply_variants(const SymMatrix& psi, const CoocMatrix& m, const PNConfig& cfg);

/// Forward for cfg.kind, variants included. Validates cfg.
SymMatrix pn_fwd(const CoocMatrix& m, const PNConfig& cfg);

/// Element-wise derivative matrix D with dΨ_ij/dM_ij = D_ij at fixed trace.
/// For trace-normalized kinds D includes the 1/(tr + λ) factor; the
/// coupling through trace(M) is added separately by pn_grad_m.
Matrix pn_derivative(const CoocMatrix& m, const PNConfig& cfg);

/// dℓ/dM for the forward pn_fwd(m, cfg), given dℓ/dΨ.
SymMatrix pn_grad_m(const CoocMatrix& m, const SymMatrix& upstream, const PNConfig& cfg);

/// (2/N)·sym(G)[0:d, :]·Φ̄. Maps a gradient with respect to M onto the d
/// feature rows; the code rows receive none.
Matrix dM_dPhi_contract(const Matrix& g, const AugmentedBatch& aug);

/// Chain rule through φ_n − β·mean(φ): g_n − (β/N)·Σ_m g_m.
Matrix center_backward(const Matrix& dphi, double beta);

/// Full backward to the rectified features: validates cfg, runs pn_grad_m,
/// the contraction and the centering chain.
PoolGradient pn_bwd(const CoocMatrix& m, const AugmentedBatch& aug, const SymMatrix& upstream,
                    const PNConfig& cfg);

}  // namespace sopool
