#include "pilinv/search.hpp"

#include <algorithm>
#include <cmath>

#include "pilinv/errors.hpp"

namespace pilinv {

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol,
                                      bool probe_ends, int max_evaluations) {
  if (!(lo <= hi)) throw ContractViolation("golden section needs lo <= hi");
  if (!(tol > 0.0)) throw ContractViolation("golden section needs a positive tolerance");
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  ScalarMinimum best;
  best.fx = INFINITY;
  auto eval = [&](double x) {
    double v = f(x);
    ++best.evaluations;
    if (v < best.fx || (v == best.fx && x < best.x)) {
      best.fx = v;
      best.x = x;
    }
    return v;
  };
  if (hi - lo <= tol) {
    eval(0.5 * (lo + hi));
    return best;
  }
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > tol && best.evaluations < max_evaluations) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  if (probe_ends) {
    eval(lo);
    eval(hi);
  }
  return best;
}

SimplexMinimum nelder_mead_2d(const std::function<double(double, double)>& f, std::array<double, 2> start,
                              std::array<double, 2> step, std::array<double, 2> lower, std::array<double, 2> upper,
                              double tol, int max_evaluations) {
  using P = std::array<double, 2>;
  SimplexMinimum out;
  auto clamp = [&](P p) {
    for (int i = 0; i < 2; ++i) p[static_cast<std::size_t>(i)] = std::clamp(p[static_cast<std::size_t>(i)], lower[static_cast<std::size_t>(i)], upper[static_cast<std::size_t>(i)]);
    return p;
  };
  auto eval = [&](const P& p) {
    ++out.evaluations;
    return f(p[0], p[1]);
  };
  std::array<P, 3> v = {clamp(start), clamp({start[0] + step[0], start[1]}), clamp({start[0], start[1] + step[1]})};
  std::array<double, 3> fv{};
  for (std::size_t i = 0; i < 3; ++i) fv[i] = eval(v[i]);
  auto diameter = [&]() {
    double dmax = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) dmax = std::max(dmax, std::hypot(v[i][0] - v[j][0], v[i][1] - v[j][1]));
    return dmax;
  };
  while (out.evaluations < max_evaluations) {
    std::array<std::size_t, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::array<P, 3> sv = {v[idx[0]], v[idx[1]], v[idx[2]]};
    std::array<double, 3> sf = {fv[idx[0]], fv[idx[1]], fv[idx[2]]};
    v = sv;
    fv = sf;
    if (diameter() < tol) {
      out.converged = true;
      break;
    }
    P centroid = {(v[0][0] + v[1][0]) / 2.0, (v[0][1] + v[1][1]) / 2.0};
    auto along = [&](double t) { return clamp({centroid[0] + t * (v[2][0] - centroid[0]), centroid[1] + t * (v[2][1] - centroid[1])}); };
    P xr = along(-1.0);
    double fr = eval(xr);
    if (fr < fv[0]) {
      P xe = along(-2.0);
      double fe = eval(xe);
      if (fe < fr) v[2] = xe, fv[2] = fe;
      else v[2] = xr, fv[2] = fr;
      continue;
    }
    if (fr < fv[1]) {
      v[2] = xr;
      fv[2] = fr;
      continue;
    }
    P xc = fr < fv[2] ? along(-0.5) : along(0.5);
    double fc = eval(xc);
    if (fc < std::min(fr, fv[2])) {
      v[2] = xc;
      fv[2] = fc;
      continue;
    }
    for (std::size_t i = 1; i < 3; ++i) {
      v[i] = clamp({(v[i][0] + v[0][0]) / 2.0, (v[i][1] + v[0][1]) / 2.0});
      fv[i] = eval(v[i]);
    }
  }
  std::size_t b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  out.x = v[b];
  out.fx = fv[b];
  return out;
}

}  // namespace pilinv
