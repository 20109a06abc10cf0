#include "sopool/harness.hpp"

#include <cmath>

namespace sopool::harness {

namespace {

CoocMatrix as_cooc(const SymMatrix& m) { return CoocMatrix{m, trace(m)}; }

double loss(const SymMatrix& w, const SymMatrix& psi) { return inner(w, psi); }

}  // namespace

Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> uni(lo, hi);
  Matrix out(rows, cols);
  for (double& v : out.flat()) v = uni(rng);
  return out;
}

SymMatrix random_symmetric(std::size_t n, Rng& rng) {
  return SymMatrix::from_upper(random_matrix(n, n, -1.0, 1.0, rng));
}

SymMatrix random_spd(std::size_t n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t cols = n + 3;
  Matrix x(n, cols);
  for (double& v : x.flat()) v = gauss(rng);
  AugmentedBatch aug{x, n};
  return cooc_matrix(aug).m;
}

GradReport check_elementwise_grad(const ElementwiseCase& c, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix phi = random_matrix(c.d, c.n, 0.05, 1.0, rng);
  const Matrix codes = random_matrix(c.code_dim, c.n, 0.0, 0.5, rng);
  const SymMatrix w = random_symmetric(c.d + c.code_dim, rng);

  auto forward_m = [&](const Matrix& x) {
    const FeatureBatch centered = rectify_center(FeatureBatch{x, std::nullopt}, c.cfg.beta);
    return augment(centered, codes);
  };
  const AugmentedBatch aug = forward_m(phi);
  const CoocMatrix m = cooc_matrix(aug);
  const Matrix analytic = pn_bwd(m, aug, w, c.cfg).dphi;

  PNConfig clean = c.cfg;
  clean.flip_maxexp_sign = false;
  const LossFn f = [&](const Matrix& x) { return loss(w, pn_fwd(cooc_matrix(forward_m(x)), clean)); };
  GradReport report = compare(analytic, central_diff_grad(f, phi));
  report.h = kDefaultStep;
  return report;
}

GradReport check_spectral_grad(const PNConfig& params, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  const SymMatrix m = random_spd(dim, rng);
  const SymMatrix w = random_symmetric(dim, rng);
  const SpectralPlan plan{params.kind, SpectralPath::Eigen, params};
  const Matrix analytic = spectral_grad_m(as_cooc(m), w, plan);
  const LossFn f = [&](const Matrix& x) { return loss(w, spectral_fwd(as_cooc(SymMatrix(x)), plan)); };
  GradReport report = compare(analytic, central_diff_grad_sym(f, m));
  report.h = kDefaultStep;
  return report;
}

GradReport check_sylvester_grad(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  const SymMatrix m = random_spd(dim, rng);
  const SymMatrix w = random_symmetric(dim, rng);
  const Matrix analytic = sqrt_bwd_sylvester(m, w);
  const LossFn f = [&](const Matrix& x) {
    return loss(w, mat_fun(SymMatrix(x), [](double v) { return std::sqrt(v); }));
  };
  GradReport report = compare(analytic, central_diff_grad_sym(f, m));
  report.h = kDefaultStep;
  return report;
}

GradReport check_maxexp_closed_grad(std::size_t dim, unsigned eta, std::uint64_t seed) {
  Rng rng(seed);
  const SymMatrix m = random_spd(dim, rng);
  const SymMatrix w = random_symmetric(dim, rng);
  PNConfig params;
  params.kind = PoolKind::MaxExp;
  params.eta = eta;
  const SpectralPlan plan{PoolKind::MaxExp, SpectralPath::Eigen, params};
  const Matrix analytic = maxexp_spectral_bwd_closed(as_cooc(m), w, eta, params.lambda);
  const LossFn f = [&](const Matrix& x) { return loss(w, spectral_fwd(as_cooc(SymMatrix(x)), plan)); };
  GradReport report = compare(analytic, central_diff_grad_sym(f, m));
  report.h = kDefaultStep;
  return report;
}

double sylvester_vs_eigen(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  const SymMatrix m = random_spd(dim, rng);
  const SymMatrix w = random_symmetric(dim, rng);
  const SymMatrix eig = spectral_bwd_eigen(
      m, w, [](double v) { return std::sqrt(v); }, [](double v) { return 0.5 / std::sqrt(v); });
  return rel_frobenius_diff(sqrt_bwd_sylvester(m, w), eig);
}

double maxexp_closed_vs_eigen(std::size_t dim, unsigned eta, std::uint64_t seed) {
  Rng rng(seed);
  const SymMatrix m = random_spd(dim, rng);
  const SymMatrix w = random_symmetric(dim, rng);
  PNConfig params;
  params.kind = PoolKind::MaxExp;
  params.eta = eta;
  const CoocMatrix cm = as_cooc(m);
  const SymMatrix eig = spectral_grad_m(cm, w, SpectralPlan{PoolKind::MaxExp, SpectralPath::Eigen, params});
  return rel_frobenius_diff(maxexp_spectral_bwd_closed(cm, w, eta, params.lambda), eig);
}

double dual_path_forward_gap(const PNConfig& params, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  const CoocMatrix m = as_cooc(random_spd(dim, rng));
  const SymMatrix eig = spectral_fwd(m, SpectralPlan{params.kind, SpectralPath::Eigen, params});
  const SymMatrix closed = spectral_fwd(m, SpectralPlan{params.kind, SpectralPath::ClosedForm, params});
  Matrix diff = closed.matrix();
  diff -= eig.matrix();
  return frobenius(diff);
}

}  // namespace sopool::harness
