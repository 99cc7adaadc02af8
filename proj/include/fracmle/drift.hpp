#pragma once

#include <functional>
#include <map>
#include <string>

namespace fracmle::sde {

// Drift coefficient with the regularity data the estimators and the
// consistency checks need. growth bounds |b(x)| <= growth (1+|x|).
struct DriftModel {
  std::string name;
  std::function<double(double)> b;
  std::function<double(double)> db;
  std::function<double(double)> d2b;
  double lipschitz = 1.0;
  double growth = 1.0;
  bool is_linear = false;
  // small-value concentration exponent gamma: the law of Q_t/sqrt(t) puts at
  // most eps t^{gamma H} mass below eps. gamma = 0 is the strong form valid
  // for all H; the curvature-decay route gives gamma = 1 - beta for H < 1/2.
  bool gamma_known = false;
  double gamma = 0.0;
  double slope_lower = 0.0;  // positive lower bound on b' when available
  std::string notes;
};

DriftModel make_linear();

// b(x) = x + log(cosh x)/2; slope in [1/2, 3/2], curvature sech^2(x)/2 decays
// fast, slope bounded away from zero
DriftModel make_logcosh();

// b(x) = C + c x + (min(|x|,1))^alpha, alpha in (0,1); asymptotically affine
// with a power kink at the origin
DriftModel make_capped_power(double C, double c, double alpha);

DriftModel make_custom(std::function<double(double)> b, std::function<double(double)> db,
                       std::function<double(double)> d2b, double lipschitz,
                       double growth);

// presets addressable by name: linear, logcosh, capped_power
const std::map<std::string, DriftModel>& drift_registry();
DriftModel drift_by_name(const std::string& name);

}  // namespace fracmle::sde
