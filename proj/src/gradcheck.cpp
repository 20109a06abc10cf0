#include "sopool/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sopool/parallel.hpp"

namespace sopool {

namespace {

double checked(const LossFn& f, const Matrix& x, std::size_t r, std::size_t c, double sign) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "central difference: loss is not finite when entry (" << r << "," << c << ") is moved by "
       << (sign > 0 ? "+h" : "-h");
    fail(ErrorKind::Numeric, os.str());
  }
  return v;
}

}  // namespace

Matrix central_diff_grad(const LossFn& f, const Matrix& phi, double h) {
  require(h > 0.0, ErrorKind::Config, "central_diff_grad: step must be positive");
  Matrix grad(phi.rows(), phi.cols());
  parallel_for(phi.rows(), [&](std::size_t r) {
    Matrix x = phi;
    for (std::size_t c = 0; c < phi.cols(); ++c) {
      const double orig = x(r, c);
      x(r, c) = orig + h;
      const double up = checked(f, x, r, c, 1.0);
      x(r, c) = orig - h;
      const double down = checked(f, x, r, c, -1.0);
      x(r, c) = orig;
      grad(r, c) = (up - down) / (2.0 * h);
    }
  });
  return grad;
}

Matrix central_diff_grad_sym(const LossFn& f, const SymMatrix& m, double h) {
  require(h > 0.0, ErrorKind::Config, "central_diff_grad_sym: step must be positive");
  const std::size_t n = m.dim();
  Matrix grad(n, n);
  parallel_for(n, [&](std::size_t k) {
    Matrix x = m.matrix();
    for (std::size_t l = k; l < n; ++l) {
      const double step = k == l ? h : 0.5 * h;
      const double a = x(k, l);
      auto set = [&](double v) {
        x(k, l) = v;
        x(l, k) = v;
      };
      set(a + step);
      const double up = checked(f, x, k, l, 1.0);
      set(a - step);
      const double down = checked(f, x, k, l, -1.0);
      set(a);
      grad(k, l) = grad(l, k) = (up - down) / (2.0 * h);
    }
  });
  return grad;
}

GradReport compare(const Matrix& analytic, const Matrix& numeric, double rel_tol, double abs_tol) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
    std::ostringstream os;
    os << "compare: shape mismatch " << analytic.rows() << "x" << analytic.cols() << " vs "
       << numeric.rows() << "x" << numeric.cols();
    fail(ErrorKind::Dimension, os.str());
  }
  GradReport report;
  const double switch_over = abs_tol / rel_tol;
  double worst_ratio = -1.0;
  for (std::size_t r = 0; r < analytic.rows(); ++r) {
    for (std::size_t c = 0; c < analytic.cols(); ++c) {
      const double a = analytic(r, c);
      const double n = numeric(r, c);
      const double err = std::abs(a - n);
      const double mag = std::max(std::abs(a), std::abs(n));
      report.max_abs_err = std::max(report.max_abs_err, err);
      double ratio;
      if (mag >= switch_over) {
        const double rel = err / std::max(mag, kRelFloor);
        report.max_rel_err = std::max(report.max_rel_err, rel);
        ratio = rel / rel_tol;
      } else {
        ratio = err / abs_tol;
      }
      if (!(ratio <= 1.0)) report.passed = false;
      if (!(ratio <= worst_ratio)) {
        worst_ratio = ratio;
        report.worst_index = {r, c};
      }
    }
  }
  return report;
}

}  // namespace sopool
