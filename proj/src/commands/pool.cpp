#include <chrono>
#include <sstream>

#include <json.hpp>

#include "sopool/commands.hpp"
#include "sopool/kernelmap.hpp"
#include "sopool/linalg.hpp"

namespace sopool {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void RunConfig::validate() const {
  pn.validate();
  require(z >= 2 && z <= 64, ErrorKind::Config, "Z must lie in [2, 64]");
  require(!sigma || *sigma > 0.0, ErrorKind::Config, "sigma must be positive");
  require(alpha >= 0.0, ErrorKind::Config, "alpha must be nonnegative");
  require(reps >= 1, ErrorKind::Config, "reps must be at least 1");
  for (auto d : bench_dims) {
    require(d >= 16 && d <= 4096, ErrorKind::Config,
            "bench dim " + std::to_string(d) + " outside [16, 4096]");
  }
  if (spectral) SpectralPlan{pn.kind, spectral_path, pn}.validate(false);
}

PoolSummary pool_tensor(const Tensor& input, const RunConfig& cfg) {
  cfg.validate();
  std::size_t d = 0;
  GridShape grid;
  if (input.dims.size() == 3) {
    d = input.dims[0];
    grid = GridShape{input.dims[2], input.dims[1]};
    if (cfg.grid && (cfg.grid->width != grid.width || cfg.grid->height != grid.height)) {
      fail(ErrorKind::Dimension, "--grid disagrees with the rank-3 input shape");
    }
  } else {
    if (!cfg.grid) fail(ErrorKind::Config, "rank-2 input needs --grid W H");
    d = input.dims[0];
    grid = *cfg.grid;
  }
  const std::size_t n = input.element_count() / d;
  const std::size_t cells = grid.width * grid.height;
  if (cells == 0 || n % cells != 0) {
    std::ostringstream os;
    os << "N=" << n << " is not a multiple of W*H=" << cells;
    fail(ErrorKind::Dimension, os.str());
  }

  const auto t0 = std::chrono::steady_clock::now();
  // Row-major d×H×W is already d×(H·W) with column y·W + x.
  Matrix phi(d, n);
  std::copy(input.values.begin(), input.values.end(), phi.flat().begin());
  const PivotGrid pivots = make_grid(cfg.z, cfg.sigma);
  const Matrix codes = cfg.alpha == 0.0
                           ? Matrix(2 * cfg.z, n)
                           : spatial_codes(n, grid.width, grid.height, cfg.alpha, pivots);
  const FeatureBatch centered = rectify_center(FeatureBatch{phi, grid}, cfg.pn.beta);
  const CoocMatrix m = cooc_matrix(augment(centered, codes));
  const double aggregate_ms = ms_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  SymMatrix psi = cfg.spectral ? spectral_fwd(m, SpectralPlan{cfg.pn.kind, cfg.spectral_path, cfg.pn})
                               : pn_fwd(m, cfg.pn);
  const double pool_ms = ms_since(t1);

  const EigenPair eig = sym_eig(psi);
  PoolSummary s;
  s.trace_m = m.trace;
  s.trace_psi = trace(psi);
  s.max_eig = eig.values.front();
  s.min_eig = eig.values.back();
  s.aggregate_ms = aggregate_ms;
  s.pool_ms = pool_ms;
  s.psi = std::move(psi);
  return s;
}

void cmd_pool(const RunConfig& cfg, std::ostream& out) {
  const Tensor input = read_tensor(cfg.input);
  const PoolSummary s = pool_tensor(input, cfg);
  if (!cfg.output.empty()) {
    Tensor t;
    t.dtype = DType::F64;
    t.dims = {static_cast<std::uint32_t>(s.psi.dim()), static_cast<std::uint32_t>(s.psi.dim())};
    const auto flat = s.psi.matrix().flat();
    t.values.assign(flat.begin(), flat.end());
    write_tensor(cfg.output, t);
  }
  nlohmann::json j;
  j["command"] = "pool";
  j["kind"] = std::string(to_string(cfg.pn.kind));
  j["path"] = !cfg.spectral ? "elementwise"
              : cfg.spectral_path == SpectralPath::Eigen ? "spectral-eigen"
                                                          : "spectral-closed";
  j["dim"] = s.psi.dim();
  j["trace"] = s.trace_psi;
  j["trace_m"] = s.trace_m;
  j["min_eig"] = s.min_eig;
  j["max_eig"] = s.max_eig;
  j["timings_ms"] = {{"aggregate", s.aggregate_ms}, {"pool", s.pool_ms}};
  out << j.dump() << '\n';
}

}  // namespace sopool
