#include "sopool/pn_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sopool {

namespace {

bool is_integer(double v) { return v >= 1.0 && std::floor(v) == v && v < 1e6; }

// γ = numerator / 2^roots with roots ≤ 10
bool dyadic(double gamma, unsigned& numerator, unsigned& roots) {
  for (roots = 0; roots <= 10; ++roots) {
    const double scaled = std::ldexp(gamma, static_cast<int>(roots));
    if (std::floor(scaled) == scaled) {
      numerator = static_cast<unsigned>(scaled);
      return numerator >= 1;
    }
  }
  return false;
}

PoolKind canonical(PoolKind k) { return k == PoolKind::SigmETrace ? PoolKind::SigmE : k; }

bool trace_normalized(PoolKind k) {
  k = canonical(k);
  return k == PoolKind::MaxExp || k == PoolKind::SigmE;
}

// Scalar function applied to the eigenvalues of X, where X = M/(tr+λ) for the
// trace-normalized kinds and X = M otherwise.
struct SpectralScalar {
  ScalarFn f;
  ScalarFn df;
};

SpectralScalar scalar_for(const SpectralPlan& plan) {
  const PNConfig& p = plan.params;
  switch (canonical(plan.kind)) {
    case PoolKind::Average:
      return {[](double x) { return x; }, [](double) { return 1.0; }};
    case PoolKind::Gamma:
      return {[g = p.gamma](double x) { return std::pow(std::max(x, 0.0), g); },
              [g = p.gamma](double x) { return g * std::pow(std::max(x, 0.0), g - 1.0); }};
    case PoolKind::MaxExp:
      return {[e = p.eta](double x) { return -std::expm1(e * std::log1p(-std::min(x, 1.0))); },
              [e = p.eta](double x) { return e * std::pow(1.0 - std::min(x, 1.0), e - 1.0); }};
    case PoolKind::AsinhE:
      return {[g = p.gamma_prime](double x) { return std::asinh(g * x); },
              [g = p.gamma_prime](double x) { return g / std::sqrt(g * g * x * x + 1.0); }};
    case PoolKind::SigmE:
      return {[e = p.eta_prime](double x) { return std::tanh(0.5 * e * x); },
              [e = p.eta_prime](double x) {
                const double t = std::exp(-std::abs(e * x));
                return 2.0 * e * t / ((1.0 + t) * (1.0 + t));
              }};
    default: break;
  }
  fail(ErrorKind::Plan, "spectral pooling kind not supported");
}

double scale_of(const CoocMatrix& m, const SpectralPlan& plan) {
  return trace_normalized(plan.kind) ? m.trace + plan.params.lambda : 1.0;
}

EigenPair eigen_of_scaled(const CoocMatrix& m, double s, const SpectralPlan& plan) {
  EigenPair eig = sym_eig(m.m);
  if (s != 1.0)
    for (double& v : eig.values) v /= s;
  if (canonical(plan.kind) == PoolKind::Gamma) {
    const double tol = 1e-10 * std::max(1.0, std::abs(eig.values.front()));
    const double lowest = eig.values.back();
    if (lowest < -tol) {
      std::ostringstream os;
      os << "spectral Gamma needs a positive semidefinite M; smallest eigenvalue is " << lowest;
      fail(ErrorKind::Domain, os.str());
    }
  }
  return eig;
}

}  // namespace

void SpectralPlan::validate(bool backward) const {
  PNConfig ranges = params;
  ranges.kind = PoolKind::Average;  // β is free here: spectral kinds only see the spectrum of a PSD M
  ranges.validate();
  const PoolKind k = canonical(kind);
  if (trace_normalized(k)) {
    require(params.lambda > 0.0, ErrorKind::Validation,
            "lambda must be > 0 for trace-normalized spectral pooling");
  }
  if (path == SpectralPath::Eigen) return;
  switch (k) {
    case PoolKind::Average: return;
    case PoolKind::MaxExp:
      require(is_integer(params.eta), ErrorKind::Plan,
              "closed-form spectral MaxExp needs an integer eta; use the eigen path");
      return;
    case PoolKind::Gamma: {
      if (backward) {
        require(params.gamma == 0.5, ErrorKind::Plan,
                "closed-form spectral Gamma backward exists only for gamma = 0.5; use the eigen path");
      } else {
        unsigned num = 0, roots = 0;
        require(dyadic(params.gamma, num, roots), ErrorKind::Plan,
                "closed-form spectral Gamma needs gamma = k/2^m; use the eigen path");
      }
      return;
    }
    case PoolKind::AsinhE:
    case PoolKind::SigmE:
      require(!backward, ErrorKind::Plan,
              "no closed-form backward for spectral AsinhE/SigmE; use the eigen path");
      return;
    default: fail(ErrorKind::Plan, "spectral pooling kind not supported");
  }
}

SymMatrix spectral_fwd(const CoocMatrix& m, const SpectralPlan& plan) {
  plan.validate(false);
  const double s = scale_of(m, plan);
  const PNConfig& p = plan.params;

  if (plan.path == SpectralPath::Eigen) {
    const EigenPair eig = eigen_of_scaled(m, s, plan);
    return mat_fun(eig, scalar_for(plan).f);
  }

  const std::size_t n = m.dim();
  const Matrix eye = Matrix::identity(n);
  switch (canonical(plan.kind)) {
    case PoolKind::Average: return m.m;
    case PoolKind::Gamma: {
      unsigned num = 0, roots = 0;
      dyadic(p.gamma, num, roots);
      SymMatrix r = m.m;
      for (unsigned i = 0; i < roots; ++i) r = sqrtm(r);
      return mat_int_pow(r, num);
    }
    case PoolKind::MaxExp: {
      const SymMatrix a = sym(eye - m.m.matrix() * (1.0 / s));
      return sym(eye - mat_int_pow(a, static_cast<unsigned>(p.eta)).matrix());
    }
    case PoolKind::AsinhE: {
      const Matrix gm = m.m.matrix() * p.gamma_prime;
      const SymMatrix root = sqrtm(sym(eye + matmul(gm, gm)));
      return logm(sym(gm + root.matrix()));
    }
    case PoolKind::SigmE: {
      const SymMatrix e = expm(sym(m.m.matrix() * (-p.eta_prime / s)));
      return sym(inverse(eye + e.matrix()) * 2.0 - eye);
    }
    default: break;
  }
  fail(ErrorKind::Plan, "spectral pooling kind not supported");
}

SymMatrix spectral_bwd_eigen(const EigenPair& eig, const SymMatrix& upstream, const ScalarFn& psi,
                             const ScalarFn& dpsi) {
  const std::size_t n = eig.values.size();
  require(upstream.dim() == n, ErrorKind::Dimension,
          "spectral_bwd_eigen: upstream gradient does not match M");
  const auto& lam = eig.values;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = psi(lam[i]);

  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double gap = lam[i] - lam[j];
      const double scale = std::max({std::abs(lam[i]), std::abs(lam[j]), 1.0});
      const double v = std::abs(gap) < 1e-8 * scale ? dpsi(0.5 * (lam[i] + lam[j]))
                                                     : (f[i] - f[j]) / gap;
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "spectral backward: derivative is not finite near eigenvalue " << lam[i];
        fail(ErrorKind::Domain, os.str());
      }
      k(i, j) = k(j, i) = v;
    }
  }
  const Matrix& u = eig.vectors;
  const Matrix ut = transpose(u);
  const Matrix rotated = matmul(matmul(ut, sym(upstream.matrix()).matrix()), u);
  return sym(matmul(matmul(u, hadamard(k, rotated)), ut));
}

SymMatrix spectral_bwd_eigen(const SymMatrix& m, const SymMatrix& upstream, const ScalarFn& psi,
                             const ScalarFn& dpsi) {
  return spectral_bwd_eigen(sym_eig(m), upstream, psi, dpsi);
}

SymMatrix sqrt_bwd_sylvester(const SymMatrix& m, const SymMatrix& upstream) {
  const std::size_t n = m.dim();
  require(upstream.dim() == n, ErrorKind::Dimension,
          "sqrt_bwd_sylvester: upstream gradient does not match M");
  const EigenPair eig = sym_eig(m);
  const double lowest = eig.values.back();
  if (!(lowest > 1e-12 * std::max(1.0, eig.values.front()))) {
    std::ostringstream os;
    os << "sqrt_bwd_sylvester: M is not strictly positive definite (smallest eigenvalue "
       << lowest << ")";
    fail(ErrorKind::RankDeficient, os.str());
  }
  const SymMatrix g = sym(upstream.matrix());

  if (n <= 32) {
    const SymMatrix root = sqrtm(m);
    const std::size_t nn = n * n;
    // Row-major vec: index i*n + j. (R·X + X·R)_ij = Σ_k R_ik X_kj + X_ik R_kj.
    Matrix kron(nn, nn);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t row = i * n + j;
        for (std::size_t k = 0; k < n; ++k) {
          kron(row, k * n + j) += root(i, k);
          kron(row, i * n + k) += root(k, j);
        }
      }
    }
    Matrix rhs(nn, 1);
    for (std::size_t i = 0; i < nn; ++i) rhs(i, 0) = g.matrix().data()[i];
    const Matrix x = solve(kron, rhs);
    Matrix out(n, n);
    for (std::size_t i = 0; i < nn; ++i) out.data()[i] = x(i, 0);
    return sym(out);
  }

  const Matrix& u = eig.vectors;
  const Matrix ut = transpose(u);
  Matrix rotated = matmul(matmul(ut, g.matrix()), u);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      rotated(i, j) /= std::sqrt(eig.values[i]) + std::sqrt(eig.values[j]);
  return sym(matmul(matmul(u, rotated), ut));
}

SymMatrix maxexp_spectral_bwd_closed(const CoocMatrix& m, const SymMatrix& upstream, double eta,
                                     double lambda) {
  require(is_integer(eta), ErrorKind::Plan,
          "closed-form spectral MaxExp backward needs an integer eta");
  const std::size_t n = m.dim();
  require(upstream.dim() == n, ErrorKind::Dimension,
          "maxexp_spectral_bwd_closed: upstream gradient does not match M");
  const double s = m.trace + lambda;
  require(s > 0.0, ErrorKind::Domain, "maxexp_spectral_bwd_closed: trace(M) + lambda must be > 0");
  const auto steps = static_cast<std::size_t>(eta);

  const Matrix a = Matrix::identity(n) - m.m.matrix() * (1.0 / s);
  std::vector<Matrix> powers{Matrix::identity(n)};
  for (std::size_t i = 1; i < steps; ++i) powers.push_back(matmul(powers.back(), a));

  const Matrix g = sym(upstream.matrix()).matrix();
  Matrix acc(n, n);
  for (std::size_t i = 0; i < steps; ++i) acc += matmul(matmul(powers[i], g), powers[steps - 1 - i]);

  const double coupling = inner(acc, m.m.matrix()) / (s * s);
  Matrix out = acc * (1.0 / s);
  for (std::size_t i = 0; i < n; ++i) out(i, i) -= coupling;
  return sym(out);
}

SymMatrix spectral_grad_m(const CoocMatrix& m, const SymMatrix& upstream, const SpectralPlan& plan) {
  plan.validate(true);
  const PoolKind k = canonical(plan.kind);

  if (plan.path == SpectralPath::ClosedForm) {
    switch (k) {
      case PoolKind::Average: return sym(upstream.matrix());
      case PoolKind::MaxExp:
        return maxexp_spectral_bwd_closed(m, upstream, plan.params.eta, plan.params.lambda);
      case PoolKind::Gamma: return sqrt_bwd_sylvester(m.m, upstream);
      default: fail(ErrorKind::Plan, "no closed-form backward for this spectral kind");
    }
  }

  const double s = scale_of(m, plan);
  const EigenPair eig = eigen_of_scaled(m, s, plan);
  const SpectralScalar fn = scalar_for(plan);
  SymMatrix grad_x = spectral_bwd_eigen(eig, upstream, fn.f, fn.df);
  if (!trace_normalized(k)) return grad_x;

  // X = M/s(M): dℓ/dM = dℓ/dX / s − ⟨dℓ/dX, M⟩/s² · I
  Matrix out = grad_x.matrix() * (1.0 / s);
  const double coupling = inner(grad_x.matrix(), m.m.matrix()) / (s * s);
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) -= coupling;
  return sym(out);
}

PoolGradient spectral_pool(const CoocMatrix& m, const AugmentedBatch& aug,
                           const SymMatrix& upstream, const SpectralPlan& plan) {
  const SymMatrix grad_m = spectral_grad_m(m, upstream, plan);
  Matrix dphi = center_backward(dM_dPhi_contract(grad_m.matrix(), aug), plan.params.beta);
  return PoolGradient{upstream, std::move(dphi)};
}

}  // namespace sopool
