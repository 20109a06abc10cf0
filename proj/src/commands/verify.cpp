#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "sopool/commands.hpp"
#include "sopool/harness.hpp"
#include "sopool/probmodel.hpp"

namespace sopool {

namespace {

constexpr PoolKind kElementwiseKinds[] = {PoolKind::Average, PoolKind::Gamma,
                                          PoolKind::MaxExp,  PoolKind::SigmE,
                                          PoolKind::SigmETrace, PoolKind::AsinhE};
constexpr PoolKind kSpectralKinds[] = {PoolKind::Gamma, PoolKind::MaxExp, PoolKind::AsinhE,
                                       PoolKind::SigmE};

// Records one measured error against its limit; keeps the first violation.
struct Tally {
  SuiteResult& r;
  void add(double err, double tol, const std::string& what) {
    ++r.checks;
    r.tolerance = tol;
    if (err > r.worst || std::isnan(err)) r.worst = err;
    if (!(err <= tol) && r.passed) {
      r.passed = false;
      std::ostringstream os;
      os << what << ": error " << err << " exceeds " << tol;
      r.failing = os.str();
    }
  }
  void add(const GradReport& g, const std::string& what) {
    ++r.checks;
    r.tolerance = 1e-5;
    if (g.max_rel_err > r.worst) r.worst = g.max_rel_err;
    if (!g.passed && r.passed) {
      r.passed = false;
      std::ostringstream os;
      os << what << ": analytic gradient disagrees with central differences at ("
         << g.worst_index.first << "," << g.worst_index.second << "), max_rel_err "
         << g.max_rel_err << ", max_abs_err " << g.max_abs_err;
      r.failing = os.str();
    }
  }
};

void suite_binomial(SuiteResult& r, const RunConfig&, const VerifyOptions&) {
  Tally t{r};
  for (unsigned n = 1; n <= 30; ++n) {
    for (int k = 0; k <= 100; ++k) {
      const double p = k / 100.0;
      const double expected = 1.0 - std::pow(1.0 - p, n);
      const double got = binom_at_least_one(BernoulliPool{n, p, 0.0, 0.0});
      t.add(std::abs(got - expected), 1e-12,
            "binomial expansion equals 1-(1-p)^N (N=" + std::to_string(n) + ")");
    }
  }
}

void suite_multinomial(SuiteResult& r, const RunConfig&, const VerifyOptions&) {
  Tally t{r};
  constexpr int kSteps = 13;
  for (unsigned n = 1; n <= 12; ++n) {
    for (int a = 0; a <= kSteps; ++a) {
      for (int b = 0; a + b <= kSteps; ++b) {
        for (int c = 0; a + b + c <= kSteps; ++c) {
          const BernoulliPool pool{n, a / double(kSteps), b / double(kSteps), c / double(kSteps)};
          const double expected = 1.0 - std::pow(1.0 - pool.p, n);
          t.add(std::abs(multinom_at_least_one(pool) - expected), 1e-10,
                "multinomial triple sum equals 1-(1-p)^N (N=" + std::to_string(n) + ")");
        }
      }
    }
  }
}

PNConfig spectral_params(const RunConfig& cfg, PoolKind kind) {
  PNConfig p = cfg.pn;
  p.kind = kind;
  p.trace_comp = false;
  p.residual = false;
  p.flip_maxexp_sign = false;
  p.eta = std::round(p.eta);
  if (kind == PoolKind::Gamma) p.gamma = 0.5;
  return p;
}

void suite_spectral_forward(SuiteResult& r, const RunConfig& cfg, const VerifyOptions&) {
  Tally t{r};
  for (PoolKind kind : kSpectralKinds) {
    for (std::uint64_t i = 0; i < 10; ++i) {
      const double gap =
          harness::dual_path_forward_gap(spectral_params(cfg, kind), 2 + i % 7, cfg.seed * 1000 + i);
      t.add(gap, 1e-10, std::string("closed form matches eigen path for ") +
                            std::string(to_string(kind)));
    }
  }
}

void suite_spectral_backward(SuiteResult& r, const RunConfig& cfg, const VerifyOptions&) {
  Tally t{r};
  for (std::uint64_t i = 0; i < 10; ++i) {
    const std::size_t dim = 2 + i % 7;
    t.add(harness::sylvester_vs_eigen(dim, cfg.seed * 1000 + i), 1e-8,
          "Sylvester gradient matches eigen path");
    for (unsigned eta : {1u, 2u, 4u, 7u}) {
      t.add(harness::maxexp_closed_vs_eigen(dim, eta, cfg.seed * 1000 + i), 1e-8,
            "closed MaxExp gradient matches eigen path (eta=" + std::to_string(eta) + ")");
    }
  }
}

void suite_gradcheck_elementwise(SuiteResult& r, const RunConfig& cfg, const VerifyOptions& opts) {
  Tally t{r};
  std::uint64_t seed = cfg.seed * 1000;
  for (PoolKind kind : kElementwiseKinds) {
    for (double beta : {0.0, 0.5}) {
      if (beta > 0.0 && (kind == PoolKind::Gamma || kind == PoolKind::MaxExp)) continue;
      for (std::size_t combo = 0; combo < 8; ++combo) {
        harness::ElementwiseCase c;
        c.cfg = cfg.pn;
        c.cfg.kind = kind;
        c.cfg.beta = beta;
        c.cfg.trace_comp = combo % 4 == 1 || combo % 4 == 3;
        c.cfg.residual = combo % 4 >= 2;
        c.cfg.flip_maxexp_sign = opts.break_sign;
        c.d = combo & 1 ? 8 : 3;
        c.code_dim = combo & 2 ? 6 : 0;
        c.n = combo & 4 ? 20 : 5;
        std::ostringstream what;
        what << to_string(kind) << " pn_bwd (beta=" << beta << ", d=" << c.d
             << ", Z'=" << c.code_dim << ", N=" << c.n << ")";
        t.add(harness::check_elementwise_grad(c, ++seed), what.str());
      }
    }
  }
}

void suite_gradcheck_spectral(SuiteResult& r, const RunConfig& cfg, const VerifyOptions&) {
  Tally t{r};
  std::uint64_t seed = cfg.seed * 1000;
  for (PoolKind kind : kSpectralKinds) {
    for (std::size_t i = 0; i < 4; ++i) {
      t.add(harness::check_spectral_grad(spectral_params(cfg, kind), 2 + 2 * i, ++seed),
            std::string("spectral ") + std::string(to_string(kind)) + " gradient");
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    t.add(harness::check_sylvester_grad(2 + 2 * i, ++seed), "Sylvester gradient");
    for (unsigned eta : {1u, 2u, 4u, 7u}) {
      t.add(harness::check_maxexp_closed_grad(2 + 2 * i, eta, ++seed),
            "closed MaxExp gradient (eta=" + std::to_string(eta) + ")");
    }
  }
}

struct Suite {
  const char* name;
  const char* group;
  std::function<void(SuiteResult&, const RunConfig&, const VerifyOptions&)> run;
};

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> suites = {
      {"probmodel-binomial", "probmodel", suite_binomial},
      {"probmodel-multinomial", "probmodel", suite_multinomial},
      {"spectral-forward", "spectral", suite_spectral_forward},
      {"spectral-backward", "spectral", suite_spectral_backward},
      {"gradcheck-elementwise", "gradcheck", suite_gradcheck_elementwise},
      {"gradcheck-spectral", "gradcheck", suite_gradcheck_spectral},
  };
  return suites;
}

bool selected(const Suite& s, const VerifyOptions& opts) {
  if (opts.suites.empty()) return true;
  for (const auto& f : opts.suites) {
    if (f == s.name || f == s.group) return true;
  }
  return false;
}

}  // namespace

std::vector<SuiteResult> cmd_verify(const RunConfig& cfg, const VerifyOptions& opts,
                                    std::ostream& out) {
  cfg.pn.validate();
  for (const auto& f : opts.suites) {
    bool known = false;
    for (const auto& s : all_suites()) known = known || f == s.name || f == s.group;
    if (!known) fail(ErrorKind::Config, "unknown verify suite \"" + f + "\"");
  }
  std::vector<SuiteResult> results;
  bool all_passed = true;
  for (const auto& s : all_suites()) {
    if (!selected(s, opts)) continue;
    SuiteResult r;
    r.name = s.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      s.run(r, cfg, opts);
    } catch (const Error& e) {
      r.passed = false;
      r.failing = std::string(to_string(e.kind())) + " error: " + e.what();
    }
    r.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json j{{"suite", r.name},   {"passed", r.passed},       {"checks", r.checks},
                     {"worst", r.worst},  {"tolerance", r.tolerance}, {"elapsed_ms", r.elapsed_ms}};
    if (!r.passed) j["failing"] = r.failing;
    out << j.dump() << '\n';
    all_passed = all_passed && r.passed;
    results.push_back(std::move(r));
  }
  out << nlohmann::json{{"verify", all_passed ? "pass" : "fail"}, {"suites", results.size()}}.dump()
      << '\n';
  return results;
}

}  // namespace sopool
