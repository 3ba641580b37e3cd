#pragma once

#include <array>
#include <functional>
#include <vector>

namespace pilinv {

struct ScalarMinimum {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Golden-section search on [lo, hi] until the bracket is narrower than tol.
/// Returns the best point seen, including the endpoints when `probe_ends` is set.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol,
                                      bool probe_ends = false, int max_evaluations = 200);

struct SimplexMinimum {
  std::array<double, 2> x{};
  double fx = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead on two variables with box clamping; stops when the simplex
/// diameter drops below `tol`.
SimplexMinimum nelder_mead_2d(const std::function<double(double, double)>& f, std::array<double, 2> start,
                              std::array<double, 2> step, std::array<double, 2> lower, std::array<double, 2> upper,
                              double tol, int max_evaluations = 400);

}  // namespace pilinv
