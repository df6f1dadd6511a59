#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

// Adaptive Gauss-Kronrod over [a, b], split at the given interior breakpoints.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& breaks = {}) {
  std::vector<double> pts{a};
  for (double p : breaks) {
    if (p > pts.back() && p < b) pts.push_back(p);
  }
  pts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1], 15, 1e-13);
  }
  return total;
}

// Geometric breakpoints scale, 10 scale, 100 scale, ... below `top`.
inline std::vector<double> geometric_breaks(double scale, double top) {
  std::vector<double> out;
  for (double p = scale; p < top; p *= 10.0) out.push_back(p);
  return out;
}

// Root of an increasing function on [lo, hi] by plain bisection.
inline double bisect(const std::function<double(double)>& f, double target, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oracle
