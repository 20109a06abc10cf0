#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sopool/aggregate.hpp"
#include "sopool/pn_elementwise.hpp"
#include "sopool/pn_spectral.hpp"
#include "sopool/tensor_file.hpp"

namespace sopool {

/// Everything a subcommand can be configured with. JSON output goes to the
/// stream passed to each command, one object per line.
struct RunConfig {
  PNConfig pn;
  bool spectral = false;
  SpectralPath spectral_path = SpectralPath::Eigen;
  std::size_t z = 5;
  std::optional<double> sigma;
  double alpha = 0.0;
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<GridShape> grid;
  std::vector<std::size_t> bench_dims{16, 64, 128, 256, 512};
  std::size_t reps = 5;
  std::uint64_t seed = 7;

  /// PNConfig rules plus Z, σ, α and the benchmark dims.
  void validate() const;
};

// pool

struct PoolSummary {
  SymMatrix psi;
  double trace_m = 0.0;
  double trace_psi = 0.0;
  double min_eig = 0.0;
  double max_eig = 0.0;
  double aggregate_ms = 0.0;
  double pool_ms = 0.0;
};

/// Pools one d×H×W tensor (or d×N with cfg.grid). With α = 0 the code rows are
/// zero and the map may be a single pixel; otherwise W and H must be ≥ 2.
PoolSummary pool_tensor(const Tensor& input, const RunConfig& cfg);

/// Reads cfg.input, writes Ψ (f64, rank 2) to cfg.output when set, and prints
/// a JSON summary line.
void cmd_pool(const RunConfig& cfg, std::ostream& out);

// verify

struct VerifyOptions {
  /// Suite or group names ("probmodel", "spectral", "gradcheck", or a full
  /// suite name). Empty runs everything.
  std::vector<std::string> suites;
  bool break_sign = false;
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  double worst = 0.0;      // largest error seen, in the suite's own metric
  double tolerance = 0.0;
  std::string failing;     // first violated invariant, empty on success
  double elapsed_ms = 0.0;
};

/// Runs the selected suites and prints one JSON line per suite plus a final
/// summary line. Config error when the filter matches nothing.
std::vector<SuiteResult> cmd_verify(const RunConfig& cfg, const VerifyOptions& opts,
                                    std::ostream& out);

// bench

struct BenchRow {
  std::size_t dim = 0;
  std::string kind;
  std::string path;  // "elementwise" or "spectral-eigen"
  double median_ns = 0.0;
  std::size_t reps = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  /// spectral median / element-wise median, one per dim, in dims order.
  std::vector<double> ratios;
};

/// SigmE element-wise forward against the spectral eigen-path forward on the
/// same random co-occurrence matrix, single-threaded. dims must lie in
/// [16, 4096].
BenchResult cmd_bench(const RunConfig& cfg, std::ostream& out);

// demo-train

struct DemoOptions {
  std::size_t epochs = 50;
  std::size_t classes = 3;
  std::size_t samples_per_class = 200;
  double learning_rate = 1e-2;
  std::size_t batch_size = 20;
};

struct DemoResult {
  /// Mean training loss before any update, then after every epoch.
  std::vector<double> losses;
  double accuracy = 0.0;
  double elapsed_ms = 0.0;
};

/// Synthetic classification with a learnable projection in front of
/// rectify_center → spatial codes → cooc → PN → linear softmax. Numeric
/// error naming the step when the loss stops being finite.
DemoResult cmd_demo_train(const RunConfig& cfg, const DemoOptions& opts, std::ostream& out);

}  // namespace sopool
