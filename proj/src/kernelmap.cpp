#include "sopool/kernelmap.hpp"

#include <cmath>
#include <sstream>

namespace sopool {

std::vector<double> make_pivots(std::size_t z) {
  require(z >= 2, ErrorKind::Config, "make_pivots: need at least 2 pivots");
  std::vector<double> p(z);
  const double step = 1.4 / static_cast<double>(z - 1);
  for (std::size_t k = 0; k < z; ++k) p[k] = -0.2 + step * static_cast<double>(k);
  p.back() = 1.2;
  return p;
}

PivotGrid make_grid(std::size_t z, std::optional<double> sigma) {
  if (z < 2 || z > 64) {
    std::ostringstream os;
    os << "pivot count Z=" << z << " outside [2, 64]";
    fail(ErrorKind::Config, os.str());
  }
  PivotGrid g{make_pivots(z), sigma.value_or(1.4 / static_cast<double>(z - 1))};
  require(g.sigma > 0.0 && std::isfinite(g.sigma), ErrorKind::Config,
          "pivot bandwidth sigma must be positive");
  return g;
}

std::vector<double> feature_map(double x, const PivotGrid& grid) {
  require(grid.sigma > 0.0, ErrorKind::Config, "feature_map: sigma must be positive");
  const double inv_s2 = 1.0 / (grid.sigma * grid.sigma);
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double u = x - grid.pivots[k];
    out[k] = std::exp(-u * u * inv_s2);
  }
  return out;
}

std::vector<double> encode_spatial(std::size_t x, std::size_t y, std::size_t width,
                                   std::size_t height, double alpha, const PivotGrid& grid) {
  require(width >= 2 && height >= 2, ErrorKind::Config,
          "encode_spatial: map width and height must be at least 2");
  require(x < width && y < height, ErrorKind::Config, "encode_spatial: location outside the map");
  const double nx = static_cast<double>(x) / static_cast<double>(width - 1);
  const double ny = static_cast<double>(y) / static_cast<double>(height - 1);
  std::vector<double> out = feature_map(nx, grid);
  const std::vector<double> fy = feature_map(ny, grid);
  out.insert(out.end(), fy.begin(), fy.end());
  for (double& v : out) v *= alpha;
  return out;
}

Matrix spatial_codes(std::size_t n, std::size_t width, std::size_t height, double alpha,
                     const PivotGrid& grid) {
  const std::size_t cells = width * height;
  if (cells == 0 || n % cells != 0) {
    std::ostringstream os;
    os << "spatial_codes: N=" << n << " is not a multiple of W*H=" << cells;
    fail(ErrorKind::Dimension, os.str());
  }
  Matrix codes(2 * grid.size(), n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t cell = col % cells;
    const auto c = encode_spatial(cell % width, cell / width, width, height, alpha, grid);
    for (std::size_t r = 0; r < c.size(); ++r) codes(r, col) = c[r];
  }
  return codes;
}

}  // namespace sopool
