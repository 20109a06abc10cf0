#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "sopool/matrix.hpp"

namespace sopool {

/// Outcome of comparing an analytic gradient against a numeric one.
///
/// An entry whose magnitude max(|a|, |n|) is at least abs_tol/rel_tol is held
/// to the relative tolerance; smaller entries are held to abs_tol instead.
/// max_rel_err is taken over the relative entries with denominator
/// max(|a|, |n|, 1e-8); worst_index is the entry closest to (or furthest
/// past) its own limit.
struct GradReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::pair<std::size_t, std::size_t> worst_index{0, 0};
  double h = 0.0;
  bool passed = true;
};

inline constexpr double kDefaultStep = 1e-6;
inline constexpr double kRelFloor = 1e-8;

using LossFn = std::function<double(const Matrix&)>;

/// (f(Φ + h·E_mn) − f(Φ − h·E_mn)) / 2h for every entry. f is called from
/// several threads at once and must be reentrant. Numeric error naming the
/// entry when f is not finite.
Matrix central_diff_grad(const LossFn& f, const Matrix& phi, double h = kDefaultStep);

/// Same, for a loss over symmetric matrices: entry (k,l) is the central
/// difference along the symmetric direction ½(J_kl + J_lk), which recovers G_kl
/// when G = dℓ/dM is symmetric.
Matrix central_diff_grad_sym(const LossFn& f, const SymMatrix& m, double h = kDefaultStep);

GradReport compare(const Matrix& analytic, const Matrix& numeric, double rel_tol = 1e-5,
                   double abs_tol = 1e-8);

}  // namespace sopool
