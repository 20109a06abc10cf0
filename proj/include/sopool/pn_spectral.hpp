#pragma once

#include "sopool/aggregate.hpp"
#include "sopool/linalg.hpp"
#include "sopool/pn_elementwise.hpp"

namespace sopool {

enum class SpectralPath { Eigen, ClosedForm };

/// Which spectral power normalization to run and by which route.
///
/// Kinds: Gamma (M^γ), MaxExp (I − (I − M/(tr+λ))^η), AsinhE
/// (log(γ'M + (I + γ'²M²)^½)), SigmE (2(I + e^{−η'M/(tr+λ)})⁻¹ − I; SigmETrace
/// is accepted as an alias), and Average (identity, for plumbing checks).
/// trace_comp / residual in params are element-wise options and are ignored.
///
/// Closed-form forward needs integer η for MaxExp and a dyadic γ (k/2^m,
/// m ≤ 10) for Gamma. Closed-form backward exists only for MaxExp with
/// integer η and for Gamma with γ = 0.5 (Sylvester).
struct SpectralPlan {
  PoolKind kind = PoolKind::SigmE;
  SpectralPath path = SpectralPath::Eigen;
  PNConfig params;

  /// Plan error for an unsupported kind/path pair.
  void validate(bool backward) const;
};

/// Eigenvalue substitution (Eigen path) or the closed matrix form.
SymMatrix spectral_fwd(const CoocMatrix& m, const SpectralPlan& plan);

/// dℓ/dM = U·(K ⊙ Uᵀ·sym(upstream)·U)·Uᵀ for the spectral function ψ with
/// M held as given (no trace coupling). K is the Löwner matrix of divided
/// differences; pairs closer than 1e-8·max(|λi|, |λj|, 1) use ψ' at their
/// midpoint.
SymMatrix spectral_bwd_eigen(const SymMatrix& m, const SymMatrix& upstream, const ScalarFn& psi,
                             const ScalarFn& dpsi);
SymMatrix spectral_bwd_eigen(const EigenPair& eig, const SymMatrix& upstream, const ScalarFn& psi,
                             const ScalarFn& dpsi);

/// Solves M^½·X + X·M^½ = sym(upstream). Up to dim 32 through the Kronecker
/// system (I⊗M^½ + M^½⊗I)·vec(X) = vec(sym(upstream)); above that in the
/// eigenbasis. RankDeficient error when M is not strictly positive definite.
SymMatrix sqrt_bwd_sylvester(const SymMatrix& m, const SymMatrix& upstream);

/// Matrix-free chain rule for Ψ = I − A^η, A = I − M/(tr + λ), integer η:
///   S = Σ_{n<η} Aⁿ·sym(upstream)·A^{η−1−n},  dℓ/dM = S/s − ⟨S, M⟩/s²·I.
SymMatrix maxexp_spectral_bwd_closed(const CoocMatrix& m, const SymMatrix& upstream, double eta,
                                     double lambda);

/// dℓ/dM for spectral_fwd(m, plan), including the trace coupling of the
/// trace-normalized kinds.
SymMatrix spectral_grad_m(const CoocMatrix& m, const SymMatrix& upstream, const SpectralPlan& plan);

/// spectral_grad_m followed by the Φ contraction and the centering chain.
PoolGradient spectral_pool(const CoocMatrix& m, const AugmentedBatch& aug,
                           const SymMatrix& upstream, const SpectralPlan& plan);

}  // namespace sopool
