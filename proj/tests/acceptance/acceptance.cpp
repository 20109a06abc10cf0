// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails. Tolerances and budgets are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "../support/fixtures.hpp"
#include "sopool/commands.hpp"
#include "sopool/error.hpp"
#include "sopool/harness.hpp"
#include "sopool/linalg.hpp"
#include "sopool/pn_elementwise.hpp"
#include "sopool/pn_spectral.hpp"
#include "sopool/probmodel.hpp"

using namespace sopool;

namespace {

// GradReport::passed applies the per-entry rule of compare() with its defaults
// (relative 1e-5, absolute 1e-8 below magnitude 1e-3); the relative bound is
// also asserted here directly.
constexpr double kGradRelTol = 1e-5;
constexpr double kPathAgreeTol = 1e-8;
constexpr double kBinomialTol = 1e-12;
constexpr double kMultinomialTol = 1e-10;
constexpr double kDualPathTol = 1e-10;
constexpr double kKernelMaxErr = 0.05;
constexpr double kBenchRatio = 10.0;
constexpr double kPsdSlack = 1e-9;
constexpr double kPermutationTol = 1e-12;
constexpr double kConjugationTol = 1e-8;

constexpr double kBudgetElementwiseS = 60.0;
constexpr double kBudgetSpectralS = 120.0;
constexpr double kBudgetProbS = 10.0;
constexpr double kBudgetDemoS = 60.0;

constexpr PoolKind kElementwiseKinds[] = {PoolKind::Average, PoolKind::Gamma,
                                          PoolKind::MaxExp,  PoolKind::SigmE,
                                          PoolKind::SigmETrace, PoolKind::AsinhE};
constexpr PoolKind kSpectralKinds[] = {PoolKind::Gamma, PoolKind::MaxExp, PoolKind::AsinhE,
                                       PoolKind::SigmE};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the first failure message and a running summary.
struct Outcome {
  bool passed = true;
  std::string failure;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok && passed) {
      passed = false;
      failure = what;
    }
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CoocMatrix as_cooc(const SymMatrix& s) { return CoocMatrix{s, trace(s.matrix())}; }

bool is_psd(const SymMatrix& s, double trace_value) {
  const EigenPair e = sym_eig(s);
  return *std::min_element(e.values.begin(), e.values.end()) >= -kPsdSlack * trace_value;
}

Outcome elementwise_gradients() {
  Outcome o;
  const auto t0 = Clock::now();
  std::uint64_t seed = 100000;
  std::size_t checks = 0;
  double worst = 0.0;
  for (PoolKind kind : kElementwiseKinds) {
    for (double beta : {0.0, 0.5}) {
      if (beta > 0.0 && (kind == PoolKind::Gamma || kind == PoolKind::MaxExp)) continue;
      for (std::size_t i = 0; i < 100; ++i) {
        harness::ElementwiseCase c;
        c.cfg.kind = kind;
        c.cfg.beta = beta;
        c.cfg.trace_comp = (i / 8) % 2 == 1;
        c.cfg.residual = (i / 16) % 2 == 1;
        c.d = i & 1 ? 8 : 3;
        c.code_dim = i & 2 ? 6 : 0;
        c.n = i & 4 ? 20 : 5;
        const GradReport r = harness::check_elementwise_grad(c, ++seed);
        ++checks;
        worst = std::max(worst, r.max_rel_err);
        std::ostringstream what;
        what << to_string(kind) << " beta=" << beta << " d=" << c.d << " Z'=" << c.code_dim
             << " N=" << c.n << " max_rel_err=" << r.max_rel_err;
        o.require(r.passed && r.max_rel_err <= kGradRelTol, what.str());
      }
    }
  }
  const double s = seconds_since(t0);
  o.require(s < kBudgetElementwiseS, "runtime " + fmt(s) + " s");
  o.summary = std::to_string(checks) + " instances, worst rel " + fmt(worst) + ", " + fmt(s) + " s";
  return o;
}

Outcome spectral_gradients() {
  Outcome o;
  const auto t0 = Clock::now();
  std::uint64_t seed = 200000;
  double worst_fd = 0.0, worst_path = 0.0;
  auto fd = [&](const GradReport& r, const std::string& what) {
    worst_fd = std::max(worst_fd, r.max_rel_err);
    o.require(r.passed && r.max_rel_err <= kGradRelTol, what + " max_rel_err=" + fmt(r.max_rel_err));
  };
  auto agree = [&](double gap, const std::string& what) {
    worst_path = std::max(worst_path, gap);
    o.require(gap <= kPathAgreeTol, what + " gap=" + fmt(gap));
  };
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t dim = 2 + i % 7;
    for (PoolKind kind : kSpectralKinds) {
      PNConfig p;
      p.kind = kind;
      fd(harness::check_spectral_grad(p, dim, ++seed),
         "eigen " + std::string(to_string(kind)) + " dim=" + std::to_string(dim));
    }
    const std::uint64_t s = ++seed;
    fd(harness::check_sylvester_grad(dim, s), "Sylvester dim=" + std::to_string(dim));
    agree(harness::sylvester_vs_eigen(dim, s), "Sylvester vs eigen dim=" + std::to_string(dim));
    for (unsigned eta : {1u, 2u, 4u, 7u}) {
      const std::uint64_t s2 = ++seed;
      const std::string tag = " eta=" + std::to_string(eta) + " dim=" + std::to_string(dim);
      fd(harness::check_maxexp_closed_grad(dim, eta, s2), "closed MaxExp" + tag);
      agree(harness::maxexp_closed_vs_eigen(dim, eta, s2), "closed MaxExp vs eigen" + tag);
    }
  }
  const double s = seconds_since(t0);
  o.require(s < kBudgetSpectralS, "runtime " + fmt(s) + " s");
  o.summary = "worst FD rel " + fmt(worst_fd) + ", worst path gap " + fmt(worst_path) + ", " +
              fmt(s) + " s";
  return o;
}

Outcome probability_identities() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst_b = 0.0, worst_m = 0.0;
  for (unsigned n = 1; n <= 30; ++n) {
    for (int k = 0; k <= 100; ++k) {
      const double p = k / 100.0;
      const double err =
          std::abs(binom_at_least_one({n, p, 0.0, 0.0}) - (1.0 - std::pow(1.0 - p, n)));
      worst_b = std::max(worst_b, err);
      o.require(err <= kBinomialTol, "binomial N=" + std::to_string(n) + " p=" + fmt(p));
    }
  }
  constexpr int kSteps = 13;
  std::size_t points = 0;
  for (int a = 0; a <= kSteps; ++a) {
    for (int b = 0; a + b <= kSteps; ++b) {
      for (int c = 0; a + b + c <= kSteps; ++c) {
        ++points;
        for (unsigned n = 1; n <= 12; ++n) {
          const BernoulliPool pool{n, a / double(kSteps), b / double(kSteps), c / double(kSteps)};
          const double err =
              std::abs(multinom_at_least_one(pool) - (1.0 - std::pow(1.0 - pool.p, n)));
          worst_m = std::max(worst_m, err);
          o.require(err <= kMultinomialTol, "multinomial N=" + std::to_string(n));
        }
      }
    }
  }
  o.require(points >= 500, "simplex grid has only " + std::to_string(points) + " points");
  const double s = seconds_since(t0);
  o.require(s < kBudgetProbS, "runtime " + fmt(s) + " s");
  o.summary = "binomial worst " + fmt(worst_b) + ", multinomial worst " + fmt(worst_m) + " over " +
              std::to_string(points) + " simplex points, " + fmt(s) + " s";
  return o;
}

Outcome table_behaviours() {
  Outcome o;
  PNConfig gamma;
  gamma.kind = PoolKind::Gamma;
  gamma.lambda = 0.0;
  const Matrix d_gamma = pn_derivative(as_cooc(SymMatrix(fixtures::diag({1e-14}))), gamma);
  o.require(d_gamma(0, 0) > 1e6, "Gamma derivative at 1e-14 is only " + fmt(d_gamma(0, 0)));

  // Entry (0,1) is zero; the diagonal keeps the matrix nondegenerate.
  const CoocMatrix zero_off = as_cooc(SymMatrix(fixtures::diag({1.0, 1.0})));
  PNConfig sigme;
  sigme.kind = PoolKind::SigmE;
  const double d_sig = pn_derivative(zero_off, sigme)(0, 1);
  o.require(std::isfinite(d_sig) && std::abs(d_sig - sigme.eta_prime / 2) <= 1e-12 * sigme.eta_prime,
            "SigmE derivative at 0 is " + fmt(d_sig));
  PNConfig asinhe;
  asinhe.kind = PoolKind::AsinhE;
  const double d_asinh = pn_derivative(zero_off, asinhe)(0, 1);
  o.require(std::isfinite(d_asinh) &&
                std::abs(d_asinh - asinhe.gamma_prime) <= 1e-12 * asinhe.gamma_prime,
            "AsinhE derivative at 0 is " + fmt(d_asinh));

  const CoocMatrix negative = as_cooc(SymMatrix(Matrix{{1.0, -0.5}, {-0.5, 1.0}}));
  for (PoolKind kind : {PoolKind::Gamma, PoolKind::MaxExp}) {
    PNConfig p;
    p.kind = kind;
    bool rejected = false;
    try {
      pn_fwd(negative, p);
    } catch (const Error& e) {
      rejected = e.kind() == ErrorKind::Domain;
    }
    o.require(rejected, std::string(to_string(kind)) + " accepted a negative entry");
  }
  for (PoolKind kind : {PoolKind::SigmE, PoolKind::AsinhE}) {
    PNConfig p;
    p.kind = kind;
    bool accepted = false;
    try {
      accepted = all_finite(pn_fwd(negative, p).matrix());
    } catch (const Error&) {
    }
    o.require(accepted, std::string(to_string(kind)) + " rejected a negative entry");
  }
  o.summary = "Gamma D(1e-14)=" + fmt(d_gamma(0, 0)) + ", SigmE D(0)=" + fmt(d_sig) +
              ", AsinhE D(0)=" + fmt(d_asinh);
  return o;
}

Outcome dual_path_forward() {
  Outcome o;
  double worst = 0.0;
  std::uint64_t seed = 300000;
  for (PoolKind kind : kSpectralKinds) {
    PNConfig p;
    p.kind = kind;
    for (std::size_t i = 0; i < 50; ++i) {
      const std::size_t dim = 2 + i % 15;
      const double gap = harness::dual_path_forward_gap(p, dim, ++seed);
      worst = std::max(worst, gap);
      o.require(gap <= kDualPathTol, std::string(to_string(kind)) + " dim=" +
                                         std::to_string(dim) + " gap=" + fmt(gap));
    }
  }
  o.summary = "200 matrices up to dim 16, worst Frobenius gap " + fmt(worst);
  return o;
}

Outcome kernel_linearization() {
  Outcome o;
  const fixtures::KernelFit fit = fixtures::kernel_fit(10, 0.35, 100);
  o.require(fit.max_err < kKernelMaxErr, "max error " + fmt(fit.max_err));
  o.summary = "Z=10 sigma=0.35 c=" + fmt(fit.c) + " max error " + fmt(fit.max_err);
  return o;
}

Outcome complexity() {
  Outcome o;
  RunConfig cfg;
  cfg.pn.kind = PoolKind::SigmE;
  cfg.bench_dims = {64, 128, 256, 512};
  cfg.reps = 3;
  std::ostringstream sink;
  const BenchResult r = cmd_bench(cfg, sink);
  std::string ratios;
  for (std::size_t i = 0; i < r.ratios.size(); ++i) {
    ratios += (i ? ", " : "") + std::to_string(cfg.bench_dims[i]) + ":" + fmt(r.ratios[i]);
    if (i > 0) {
      o.require(r.ratios[i] > r.ratios[i - 1],
                "ratio drops at d=" + std::to_string(cfg.bench_dims[i]));
    }
  }
  o.require(r.ratios.size() == cfg.bench_dims.size(), "missing ratios");
  if (!r.ratios.empty()) {
    o.require(r.ratios.back() >= kBenchRatio, "ratio at d=512 is " + fmt(r.ratios.back()));
  }
  o.summary = "spectral/element-wise ratios " + ratios;
  return o;
}

Outcome end_to_end() {
  Outcome o;
  RunConfig cfg;
  cfg.pn.kind = PoolKind::SigmE;
  DemoOptions opts;
  opts.classes = 3;
  opts.samples_per_class = 200;
  opts.epochs = 50;
  std::ostringstream sink;
  cfg.alpha = 1.0;
  const auto t0 = Clock::now();
  const DemoResult with_codes = cmd_demo_train(cfg, opts, sink);
  const double s = seconds_since(t0);
  cfg.alpha = 0.0;
  const DemoResult without = cmd_demo_train(cfg, opts, sink);
  const double first = with_codes.losses.front(), last = with_codes.losses.back();
  o.require(last < 0.5 * first, "final loss " + fmt(last) + " vs initial " + fmt(first));
  o.require(s < kBudgetDemoS, "runtime " + fmt(s) + " s");
  o.require(last < without.losses.back(),
            "alpha>0 final " + fmt(last) + " not below alpha=0 final " +
                fmt(without.losses.back()));
  o.summary = "alpha=1 loss " + fmt(first) + " -> " + fmt(last) + " in " + fmt(s) +
              " s, alpha=0 final " + fmt(without.losses.back());
  return o;
}

Outcome structural() {
  Outcome o;
  fixtures::Rng rng(400000);
  double worst_perm = 0.0, worst_conj = 0.0;
  std::size_t forwards = 0;
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const std::size_t d = 3 + trial % 6, z = trial % 2 ? 6 : 0, n = 10 + trial;
    const Matrix raw = fixtures::random_matrix(d, n, rng);
    const Matrix codes = fixtures::random_matrix(z, n, rng, 0.0, 1.0);
    for (PoolKind kind : kElementwiseKinds) {
      PNConfig cfg;
      cfg.kind = kind;
      cfg.trace_comp = trial % 3 == 1;
      cfg.residual = trial % 3 == 2;
      if (kind != PoolKind::Gamma && kind != PoolKind::MaxExp) cfg.beta = trial % 2 ? 0.5 : 0.0;
      const FeatureBatch fb = rectify_center(FeatureBatch{raw, std::nullopt}, cfg.beta);
      const CoocMatrix m = cooc_matrix(augment(fb, codes));
      o.require(exactly_symmetric(m.m.matrix()), "cooc not exactly symmetric");
      o.require(is_psd(m.m, m.trace), "cooc has a negative eigenvalue beyond slack");
      const SymMatrix psi = pn_fwd(m, cfg);
      ++forwards;
      o.require(exactly_symmetric(psi.matrix()),
                std::string(to_string(kind)) + " forward not exactly symmetric");

      // Moving feature/code columns together must not change the pooled result.
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Matrix raw_p(d, n), codes_p(z, n);
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < d; ++r) raw_p(r, c) = raw(r, perm[c]);
        for (std::size_t r = 0; r < z; ++r) codes_p(r, c) = codes(r, perm[c]);
      }
      const FeatureBatch fb_p = rectify_center(FeatureBatch{raw_p, std::nullopt}, cfg.beta);
      const SymMatrix psi_p = pn_fwd(cooc_matrix(augment(fb_p, codes_p)), cfg);
      const double gap = rel_frobenius_diff(psi_p, psi);
      worst_perm = std::max(worst_perm, gap);
      o.require(gap <= kPermutationTol,
                std::string(to_string(kind)) + " not permutation invariant: " + fmt(gap));
    }
  }
  for (std::size_t trial = 0; trial < 10; ++trial) {
    const std::size_t dim = 2 + trial % 7;
    const SymMatrix s = fixtures::random_spd(dim, rng);
    const Matrix q = fixtures::random_orthogonal(dim, rng);
    const SymMatrix qs = fixtures::conjugate(q, s);
    for (PoolKind kind : kSpectralKinds) {
      for (SpectralPath path : {SpectralPath::Eigen, SpectralPath::ClosedForm}) {
        PNConfig p;
        p.kind = kind;
        const SpectralPlan plan{kind, path, p};
        const SymMatrix psi = spectral_fwd(as_cooc(s), plan);
        const SymMatrix psi_q = spectral_fwd(as_cooc(qs), plan);
        ++forwards;
        o.require(exactly_symmetric(psi.matrix()) && exactly_symmetric(psi_q.matrix()),
                  "spectral forward not exactly symmetric");
        const double gap = rel_frobenius_diff(psi_q, fixtures::conjugate(q, psi));
        worst_conj = std::max(worst_conj, gap);
        o.require(gap <= kConjugationTol, std::string(to_string(kind)) +
                                              " not conjugation equivariant: " + fmt(gap));
      }
    }
  }
  o.summary = std::to_string(forwards) + " forwards symmetric, worst permutation gap " +
              fmt(worst_perm) + ", worst conjugation gap " + fmt(worst_conj);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"element-wise gradients match central differences", elementwise_gradients},
      {"spectral gradients match central differences and agree across paths", spectral_gradients},
      {"probability identities", probability_identities},
      {"derivative behaviour and domain near zero", table_behaviours},
      {"closed-form spectral forward matches eigen path", dual_path_forward},
      {"kernel linearization error", kernel_linearization},
      {"element-wise forward outpaces spectral forward", complexity},
      {"end-to-end learning with spatial codes", end_to_end},
      {"structural invariants", structural},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.passed = false;
      o.failure = std::string("threw: ") + e.what();
    }
    if (!o.passed) ++failures;
    std::printf("%s %zu %s: %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.passed ? o.summary.c_str() : (o.failure + " | " + o.summary).c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
