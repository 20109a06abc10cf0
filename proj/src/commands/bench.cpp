#include <algorithm>
#include <chrono>

#include <json.hpp>

#include "sopool/commands.hpp"
#include "sopool/harness.hpp"
#include "sopool/parallel.hpp"

namespace sopool {

namespace {

template <class F>
double median_ns(std::size_t reps, F&& f) {
  std::vector<double> times;
  times.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    times.push_back(
        std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  return times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
}

}  // namespace

BenchResult cmd_bench(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  SerialScope single_threaded;
  PNConfig pn = cfg.pn;
  pn.kind = PoolKind::SigmE;
  pn.trace_comp = false;
  pn.residual = false;
  const SpectralPlan plan{PoolKind::SigmE, SpectralPath::Eigen, pn};

  BenchResult result;
  harness::Rng rng(cfg.seed);
  for (std::size_t dim : cfg.bench_dims) {
    const Matrix phi = harness::random_matrix(dim, dim + 8, -1.0, 1.0, rng);
    const FeatureBatch rectified = rectify_center(FeatureBatch{phi, std::nullopt}, pn.beta);
    const CoocMatrix m = cooc_matrix(AugmentedBatch{rectified.phi, dim});

    volatile double sink = 0.0;
    const double elem = median_ns(cfg.reps, [&] { sink = sink + pn_fwd(m, pn)(0, 0); });
    const double spec = median_ns(cfg.reps, [&] { sink = sink + spectral_fwd(m, plan)(0, 0); });
    for (const BenchRow& row : {BenchRow{dim, "SigmE", "elementwise", elem, cfg.reps},
                                BenchRow{dim, "SigmE", "spectral-eigen", spec, cfg.reps}}) {
      out << nlohmann::json{{"dim", row.dim},   {"kind", row.kind},
                            {"path", row.path}, {"median_ns", row.median_ns},
                            {"reps", row.reps}}
                 .dump()
          << '\n';
      result.rows.push_back(row);
    }
    const double ratio = spec / elem;
    result.ratios.push_back(ratio);
    out << nlohmann::json{{"dim", dim}, {"ratio", ratio}}.dump() << '\n';
  }
  return result;
}

}  // namespace sopool
