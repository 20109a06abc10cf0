// sopool: pool feature tensors, run the verification suites, benchmark
// element-wise against spectral pooling, and train the synthetic demo.

#include <iostream>

#include <CLI11.hpp>

#include "sopool/commands.hpp"
#include "sopool/error.hpp"

namespace {

int exit_code(sopool::ErrorKind kind) {
  using sopool::ErrorKind;
  switch (kind) {
    case ErrorKind::Numeric:
    case ErrorKind::Domain:
    case ErrorKind::Invariant:
    case ErrorKind::RankDeficient: return 2;
    case ErrorKind::Io:
    case ErrorKind::Parse: return 3;
    default: return 1;
  }
}

void add_pn_flags(CLI::App& app, sopool::RunConfig& cfg, std::string& kind, bool& closed) {
  app.add_option("--kind", kind, "Average, Gamma, MaxExp, SigmE, SigmE-trace or AsinhE")
      ->capture_default_str();
  app.add_option("--gamma", cfg.pn.gamma, "Gamma exponent")->capture_default_str();
  app.add_option("--eta", cfg.pn.eta, "MaxExp exponent")->capture_default_str();
  app.add_option("--gamma-prime", cfg.pn.gamma_prime, "AsinhE slope")->capture_default_str();
  app.add_option("--eta-prime", cfg.pn.eta_prime, "SigmE slope")->capture_default_str();
  app.add_option("--lambda", cfg.pn.lambda, "trace regularizer")->capture_default_str();
  app.add_option("--beta", cfg.pn.beta, "centering weight")->capture_default_str();
  app.add_option("--kappa", cfg.pn.kappa, "residual weight")->capture_default_str();
  app.add_flag("--trace-comp", cfg.pn.trace_comp, "multiply by (trace + lambda)^e");
  app.add_option("--trace-comp-exponent", cfg.pn.trace_comp_exponent)->capture_default_str();
  app.add_flag("--residual", cfg.pn.residual, "add kappa * M");
  app.add_option("--alpha", cfg.alpha, "spatial code weight")->capture_default_str();
  app.add_option("--Z", cfg.z, "pivots per spatial axis")->capture_default_str();
  app.add_option("--sigma", cfg.sigma, "pivot bandwidth (default: one pivot spacing)");
  app.add_flag("--spectral", cfg.spectral, "apply PN to the eigenvalues of M");
  app.add_flag("--closed-form", closed, "with --spectral, use the closed matrix form");
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order co-occurrence pooling with power normalization"};
  app.require_subcommand(1);

  sopool::RunConfig cfg;
  std::string kind = "Average";
  bool closed = false;

  auto* pool = app.add_subcommand("pool", "pool a feature tensor file");
  add_pn_flags(*pool, cfg, kind, closed);
  std::vector<std::size_t> grid;
  pool->add_option("input", cfg.input, "SOP1 tensor, d×H×W or d×N")->required();
  pool->add_option("-o,--output", cfg.output, "where to write Ψ");
  pool->add_option("--grid", grid, "W H for a rank-2 input")->expected(2);

  auto* verify = app.add_subcommand("verify", "run the property suites");
  std::string verify_kind = "Average";
  bool verify_closed = false;
  add_pn_flags(*verify, cfg, verify_kind, verify_closed);
  sopool::VerifyOptions vopts;
  verify->add_option("--suite", vopts.suites, "suite or group name (repeatable)");
  verify->add_flag("--break-sign", vopts.break_sign,
                   "test hook: flip the MaxExp trace-coupling sign");

  auto* bench = app.add_subcommand("bench", "element-wise vs spectral SigmE timing");
  std::string bench_kind = "SigmE";
  bool bench_closed = false;
  add_pn_flags(*bench, cfg, bench_kind, bench_closed);
  bench->add_option("--dims", cfg.bench_dims, "matrix sizes")->capture_default_str();
  bench->add_option("--reps", cfg.reps, "repetitions per timing")->capture_default_str();

  auto* demo = app.add_subcommand("demo-train", "synthetic end-to-end training");
  std::string demo_kind = "SigmE";
  bool demo_closed = false;
  add_pn_flags(*demo, cfg, demo_kind, demo_closed);
  sopool::DemoOptions dopts;
  demo->add_option("--epochs", dopts.epochs)->capture_default_str();
  demo->add_option("--classes", dopts.classes)->capture_default_str();
  demo->add_option("--samples", dopts.samples_per_class, "samples per class")->capture_default_str();
  demo->add_option("--lr", dopts.learning_rate, "RMSprop learning rate")->capture_default_str();
  demo->add_option("--batch", dopts.batch_size)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    auto finish = [&](const std::string& name, bool use_closed) {
      const auto parsed = sopool::parse_pool_kind(name);
      if (!parsed) sopool::fail(sopool::ErrorKind::Config, "unknown --kind \"" + name + "\"");
      cfg.pn.kind = *parsed;
      cfg.spectral_path = use_closed ? sopool::SpectralPath::ClosedForm : sopool::SpectralPath::Eigen;
    };
    if (pool->parsed()) {
      finish(kind, closed);
      if (!grid.empty()) cfg.grid = sopool::GridShape{grid[0], grid[1]};
      sopool::cmd_pool(cfg, std::cout);
    } else if (verify->parsed()) {
      finish(verify_kind, verify_closed);
      const auto results = sopool::cmd_verify(cfg, vopts, std::cout);
      for (const auto& r : results) {
        if (!r.passed) return 2;
      }
    } else if (bench->parsed()) {
      finish(bench_kind, bench_closed);
      sopool::cmd_bench(cfg, std::cout);
    } else if (demo->parsed()) {
      finish(demo_kind, demo_closed);
      // Spatial codes are what separate the demo classes, so they default on.
      if (demo->count("--alpha") == 0) cfg.alpha = 1.0;
      sopool::cmd_demo_train(cfg, dopts, std::cout);
    }
  } catch (const sopool::Error& e) {
    std::cerr << "error (" << sopool::to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  }
  return 0;
}
