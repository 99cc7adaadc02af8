#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fracmle::stats {

// Kahan compensated accumulator; keeps parallel reductions order-stable
// to near machine precision.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("empty sample");
  Accumulator a;
  for (double x : v) a.add(x);
  return a.value() / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("need two observations");
  double m = mean(v);
  Accumulator a;
  for (double x : v) a.add((x - m) * (x - m));
  return a.value() / static_cast<double>(v.size() - 1);
}

inline double std_error(const std::vector<double>& v) {
  return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile level out of range");
  std::sort(v.begin(), v.end());
  double pos = p * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

inline double median(const std::vector<double>& v) { return quantile(v, 0.5); }

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit ols_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("bad fit data");
  double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

// two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline double ecdf(const std::vector<double>& sorted, double x) {
  auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

}  // namespace fracmle::stats
