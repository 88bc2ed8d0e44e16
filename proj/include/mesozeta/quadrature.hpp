#pragma once

// Thin wrappers over Boost.Math quadrature used across the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mesozeta/summation.hpp"

namespace mesozeta::quad {

inline void accumulate(CompensatedSum& s, double v) { s.add(v); }
inline void accumulate(CompensatedComplexSum& s, std::complex<double> v) { s.add(v); }

template <class T>
struct SumFor {
  using type = CompensatedSum;
};
template <>
struct SumFor<std::complex<double>> {
  using type = CompensatedComplexSum;
};

// Fixed 20-point Gauss-Legendre on [a, b].
template <class F>
auto gl20(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

namespace detail {

template <class F>
auto gk_recurse(F& f, double a, double b, double abs_tol, int depth, double& err) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double e = 0.0, l1 = 0.0;
  auto v = GK::integrate(f, a, b, 0, 0.0, &e, &l1);
  // below roundoff in the samples there is nothing left to gain
  if (!(e > std::max(abs_tol, 1e-15 * l1)) || depth == 0) {
    err += e;
    return v;
  }
  const double m = 0.5 * (a + b);
  auto left = gk_recurse(f, a, m, abs_tol * 0.7071, depth - 1, err);
  return left + gk_recurse(f, m, b, abs_tol * 0.7071, depth - 1, err);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (15/31) on a finite interval. The error target is
// absolute when abs_tol > 0, else tol times the first-pass L1 estimate.
template <class F>
auto adaptive(F&& f, double a, double b, double tol = 1e-12, double* error = nullptr, double abs_tol = 0.0) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0, l1 = 0.0;
  auto first = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (abs_tol <= 0.0) abs_tol = std::max(tol, 1e-15) * l1;
  if (!(err > abs_tol)) {
    if (error) *error = err;
    return first;
  }
  double acc = 0.0;
  auto r = detail::gk_recurse(f, a, b, abs_tol, 15, acc);
  if (error) *error = acc;
  return r;
}

// Sorted, deduplicated break points restricted to the open interval (a, b),
// bracketed by a and b.
inline std::vector<double> split_points(double a, double b, std::vector<double> cuts) {
  std::vector<double> pts{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts) {
    if (c > a && c < b && c > pts.back()) pts.push_back(c);
  }
  pts.push_back(b);
  return pts;
}

// Integrates over [a, b] split at `cuts` and into panels no wider than
// `max_width`, each panel handled by adaptive Gauss-Kronrod. abs_tol, when
// positive, is an absolute error budget for the whole range.
template <class F>
auto panels(F&& f, double a, double b, double max_width, const std::vector<double>& cuts = {},
            double tol = 1e-12, double* error = nullptr, double abs_tol = 0.0) {
  using R = decltype(f(a));
  struct Piece {
    double a, b, err, l1;
  };
  typename SumFor<R>::type sum;
  std::vector<Piece> pieces;
  std::vector<R> values;
  double err_total = 0.0, l1_total = 0.0;
  auto pts = split_points(a, b, cuts);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    auto n = static_cast<std::size_t>(std::ceil((hi - lo) / max_width));
    n = std::max<std::size_t>(n, 1);
    double h = (hi - lo) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      double x0 = lo + h * static_cast<double>(k);
      double x1 = (k + 1 == n) ? hi : x0 + h;
      double e = 0.0, l1 = 0.0;
      auto v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, x0, x1, 0, 0.0, &e, &l1);
      pieces.push_back({x0, x1, e, l1});
      values.push_back(v);
      l1_total += l1;
    }
  }
  // shared absolute target so that negligible panels are not refined
  const double target = std::max(std::max(tol, 1e-15) * l1_total, abs_tol) /
                        static_cast<double>(std::max<std::size_t>(pieces.size(), 1));
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].err > target) {
      double e = 0.0;
      values[i] = adaptive(f, pieces[i].a, pieces[i].b, tol, &e, target);
      pieces[i].err = e;
    }
    accumulate(sum, values[i]);
    err_total += pieces[i].err;
  }
  if (error) *error = err_total;
  return sum.value();
}

// Same panel layout, fixed Gauss-Legendre rule per panel.
template <class F>
auto panels_gl(F&& f, double a, double b, double max_width, const std::vector<double>& cuts = {}) {
  using R = decltype(f(a));
  typename SumFor<R>::type sum;
  auto pts = split_points(a, b, cuts);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    auto n = static_cast<std::size_t>(std::ceil((hi - lo) / max_width));
    n = std::max<std::size_t>(n, 1);
    double h = (hi - lo) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      double x0 = lo + h * static_cast<double>(k);
      double x1 = (k + 1 == n) ? hi : x0 + h;
      accumulate(sum, gl20(f, x0, x1));
    }
  }
  return sum.value();
}

}  // namespace mesozeta::quad
