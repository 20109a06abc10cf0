#include "sopool/pn_elementwise.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "sopool/linalg.hpp"

namespace sopool {

std::string_view to_string(PoolKind kind) {
  switch (kind) {
    case PoolKind::Average: return "Average";
    case PoolKind::Gamma: return "Gamma";
    case PoolKind::MaxExp: return "MaxExp";
    case PoolKind::SigmE: return "SigmE";
    case PoolKind::SigmETrace: return "SigmE-trace";
    case PoolKind::AsinhE: return "AsinhE";
  }
  return "?";
}

std::optional<PoolKind> parse_pool_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "average") return PoolKind::Average;
  if (lower == "gamma") return PoolKind::Gamma;
  if (lower == "maxexp") return PoolKind::MaxExp;
  if (lower == "sigme") return PoolKind::SigmE;
  if (lower == "sigme-trace" || lower == "sigmetrace") return PoolKind::SigmETrace;
  if (lower == "asinhe") return PoolKind::AsinhE;
  return std::nullopt;
}

bool uses_trace_normalization(PoolKind kind) {
  return kind == PoolKind::MaxExp || kind == PoolKind::SigmETrace;
}

void PNConfig::validate() const {
  auto check = [](bool ok, const char* what) { require(ok, ErrorKind::Validation, what); };
  check(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  check(eta >= 1.0, "eta must be >= 1");
  check(gamma_prime > 0.0, "gamma' must be > 0");
  check(eta_prime >= 1.0, "eta' must be >= 1");
  check(lambda >= 0.0 && std::isfinite(lambda), "lambda must be >= 0");
  check(!(uses_trace_normalization(kind) || trace_comp) || lambda > 0.0,
        "lambda must be > 0 when the trace normalizes or compensates");
  check(beta >= 0.0 && beta <= 1.0, "beta must lie in [0, 1]");
  check(kappa >= 0.0, "kappa must be >= 0");
  if ((kind == PoolKind::Gamma || kind == PoolKind::MaxExp) && beta != 0.0) {
    std::ostringstream os;
    os << to_string(kind) << " pooling requires beta = 0 (got " << beta
       << "); centered co-occurrences have negative entries";
    fail(ErrorKind::Validation, os.str());
  }
}

namespace {

template <class Fn>
SymMatrix map_upper(const Matrix& m, Fn&& fn) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) out(i, j) = fn(m(i, j), i, j);
  return SymMatrix::from_upper(std::move(out));
}

void reject_negative(const CoocMatrix& m, std::string_view kind) {
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = i; j < m.dim(); ++j) {
      if (m.m(i, j) < 0.0) {
        std::ostringstream os;
        os << kind << " pooling is undefined for negative co-occurrence M(" << i << "," << j
           << ") = " << m.m(i, j);
        fail(ErrorKind::Domain, os.str());
      }
    }
  }
}

// Odd by construction: evaluates on |x| and restores the sign.
double sigmoid_pn(double x) { return std::copysign(std::tanh(0.5 * std::abs(x)), x); }

// d/dx [2/(1 + e^{−x}) − 1] = 2e^{−|x|}/(1 + e^{−|x|})²
double sigmoid_pn_deriv(double x) {
  const double e = std::exp(-std::abs(x));
  return 2.0 * e / ((1.0 + e) * (1.0 + e));
}

double asinh_odd(double x) { return std::copysign(std::asinh(std::abs(x)), x); }

double trace_scale(const CoocMatrix& m, const PNConfig& cfg) { return m.trace + cfg.lambda; }

}  // namespace

double maxexp_scalar(double p, double eta) {
  // log1p/expm1 avoid cancellation for small p
  return -std::expm1(eta * std::log1p(-p));
}

SymMatrix average_fwd(const CoocMatrix& m) { return m.m; }

SymMatrix gamma_fwd(const CoocMatrix& m, const PNConfig& cfg) {
  reject_negative(m, "Gamma");
  return map_upper(m.m.matrix(),
                   [&](double v, auto, auto) { return std::pow(cfg.lambda + v, cfg.gamma); });
}

SymMatrix maxexp_fwd(const CoocMatrix& m, const PNConfig& cfg) {
  reject_negative(m, "MaxExp");
  const double s = trace_scale(m, cfg);
  return map_upper(m.m.matrix(), [&](double v, std::size_t i, std::size_t j) {
    const double p = v / s;
    if (p > 1.0) {
      std::ostringstream os;
      os << "MaxExp: normalized co-occurrence " << p << " at (" << i << "," << j << ") exceeds 1";
      fail(ErrorKind::Invariant, os.str());
    }
    return maxexp_scalar(p, cfg.eta);
  });
}

SymMatrix sigme_fwd(const CoocMatrix& m, const PNConfig& cfg) {
  const double scale =
      cfg.kind == PoolKind::SigmETrace ? cfg.eta_prime / trace_scale(m, cfg) : cfg.eta_prime;
  return map_upper(m.m.matrix(), [&](double v, auto, auto) { return sigmoid_pn(scale * v); });
}

SymMatrix asinhe_fwd(const CoocMatrix& m, const PNConfig& cfg) {
  return map_upper(m.m.matrix(), [&](double v, auto, auto) { return asinh_odd(cfg.gamma_prime * v); });
}

SymMatrix apply_variants(const SymMatrix& psi, const CoocMatrix& m, const PNConfig& cfg) {
  Matrix out = psi.matrix();
  if (cfg.trace_comp) out *= std::pow(trace_scale(m, cfg), cfg.trace_comp_exponent);
  if (cfg.residual) out += m.m.matrix() * cfg.kappa;
  return SymMatrix::from_upper(std::move(out));
}

namespace {
SymMatrix base_fwd(const CoocMatrix& m, const PNConfig& cfg) {
  switch (cfg.kind) {
    case PoolKind::Average: return average_fwd(m);
    case PoolKind::Gamma: return gamma_fwd(m, cfg);
    case PoolKind::MaxExp: return maxexp_fwd(m, cfg);
    case PoolKind::SigmE:
    case PoolKind::SigmETrace: return sigme_fwd(m, cfg);
    case PoolKind::AsinhE: return asinhe_fwd(m, cfg);
  }
  fail(ErrorKind::Validation, "unknown pooling kind");
}
}  // namespace

SymMatrix pn_fwd(const CoocMatrix& m, const PNConfig& cfg) {
  cfg.validate();
  SymMatrix psi = base_fwd(m, cfg);
  if (cfg.trace_comp || cfg.residual) psi = apply_variants(psi, m, cfg);
  return psi;
}

Matrix pn_derivative(const CoocMatrix& m, const PNConfig& cfg) {
  const Matrix& mm = m.m.matrix();
  switch (cfg.kind) {
    case PoolKind::Average: return Matrix(mm.rows(), mm.cols(), 1.0);
    case PoolKind::Gamma:
      reject_negative(m, "Gamma");
      return map_upper(mm, [&](double v, auto, auto) {
               return cfg.gamma * std::pow(cfg.lambda + v, cfg.gamma - 1.0);
             }).matrix();
    case PoolKind::MaxExp: {
      reject_negative(m, "MaxExp");
      const double s = trace_scale(m, cfg);
      return map_upper(mm, [&](double v, auto, auto) {
               return cfg.eta * std::pow(1.0 - v / s, cfg.eta - 1.0) / s;
             }).matrix();
    }
    case PoolKind::SigmE:
      return map_upper(mm, [&](double v, auto, auto) {
               return cfg.eta_prime * sigmoid_pn_deriv(cfg.eta_prime * v);
             }).matrix();
    case PoolKind::SigmETrace: {
      const double s = trace_scale(m, cfg);
      const double scale = cfg.eta_prime / s;
      return map_upper(mm, [&](double v, auto, auto) { return scale * sigmoid_pn_deriv(scale * v); })
          .matrix();
    }
    case PoolKind::AsinhE:
      return map_upper(mm, [&](double v, auto, auto) {
               const double gv = cfg.gamma_prime * v;
               return cfg.gamma_prime / std::sqrt(gv * gv + 1.0);
             }).matrix();
  }
  fail(ErrorKind::Validation, "unknown pooling kind");
}

SymMatrix pn_grad_m(const CoocMatrix& m, const SymMatrix& upstream, const PNConfig& cfg) {
  cfg.validate();
  require(upstream.dim() == m.dim(), ErrorKind::Dimension,
          "pn_grad_m: upstream gradient does not match M");
  const Matrix& u = upstream.matrix();

  Matrix grad = hadamard(u, pn_derivative(m, cfg));
  if (uses_trace_normalization(cfg.kind)) {
    // Ψ depends on every entry of M through trace(M) as well: with
    // X = M/s, dX = dM/s − M·tr(dM)/s², so the trace term contributes
    // −⟨G⊙D, M⟩/s · I (D already carries one 1/s).
    const double s = trace_scale(m, cfg);
    double coupling = -inner(grad, m.m.matrix()) / s;
    if (cfg.flip_maxexp_sign && cfg.kind == PoolKind::MaxExp) coupling = -coupling;
    for (std::size_t i = 0; i < grad.rows(); ++i) grad(i, i) += coupling;
  }
  if (cfg.trace_comp) {
    const double s = trace_scale(m, cfg);
    const double e = cfg.trace_comp_exponent;
    const double psi_dot = inner(u, base_fwd(m, cfg).matrix());
    grad *= std::pow(s, e);
    const double diag = e * std::pow(s, e - 1.0) * psi_dot;
    for (std::size_t i = 0; i < grad.rows(); ++i) grad(i, i) += diag;
  }
  if (cfg.residual) grad += u * cfg.kappa;
  return sym(grad);
}

Matrix dM_dPhi_contract(const Matrix& g, const AugmentedBatch& aug) {
  const std::size_t dim = aug.phibar.rows();
  if (!g.square() || g.rows() != dim) {
    std::ostringstream os;
    os << "dM_dPhi_contract: gradient is " << g.rows() << "x" << g.cols() << ", expected " << dim
       << "x" << dim;
    fail(ErrorKind::Dimension, os.str());
  }
  const SymMatrix gs = sym(g);
  Matrix top(aug.d, dim);
  for (std::size_t r = 0; r < aug.d; ++r)
    for (std::size_t c = 0; c < dim; ++c) top(r, c) = gs(r, c);
  Matrix out = matmul(top, aug.phibar);
  out *= 2.0 / static_cast<double>(aug.count());
  return out;
}

Matrix center_backward(const Matrix& dphi, double beta) {
  if (beta == 0.0) return dphi;
  Matrix out = dphi;
  const double n = static_cast<double>(dphi.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double sum = 0.0;
    for (double v : row) sum += v;
    const double shift = beta * sum / n;
    for (double& v : row) v -= shift;
  }
  return out;
}

PoolGradient pn_bwd(const CoocMatrix& m, const AugmentedBatch& aug, const SymMatrix& upstream,
                    const PNConfig& cfg) {
  const SymMatrix grad_m = pn_grad_m(m, upstream, cfg);
  Matrix dphi = center_backward(dM_dPhi_contract(grad_m.matrix(), aug), cfg.beta);
  return PoolGradient{upstream, std::move(dphi)};
}

}  // namespace sopool
