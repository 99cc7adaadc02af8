#include "fracmle/drift.hpp"

#include <cmath>
#include <stdexcept>

namespace fracmle::sde {

DriftModel make_linear() {
  DriftModel d;
  d.name = "linear";
  d.b = [](double x) { return x; };
  d.db = [](double) { return 1.0; };
  d.d2b = [](double) { return 0.0; };
  d.lipschitz = 1.0;
  d.growth = 1.0;
  d.is_linear = true;
  d.gamma_known = true;
  d.gamma = 0.0;
  d.slope_lower = 1.0;
  d.notes = "bounded small-value mass uniformly in t, arcsine-type law";
  return d;
}

DriftModel make_logcosh() {
  DriftModel d;
  d.name = "logcosh";
  d.b = [](double x) {
    // log cosh x = |x| + log((1+e^{-2|x|})/2), safe for large |x|
    double a = std::abs(x);
    return x + 0.5 * (a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0));
  };
  d.db = [](double x) { return 1.0 + 0.5 * std::tanh(x); };
  d.d2b = [](double x) {
    double c = std::cosh(x);
    return x > 350.0 || x < -350.0 ? 0.0 : 0.5 / (c * c);
  };
  d.lipschitz = 1.5;
  d.growth = 1.5;
  d.gamma_known = true;
  // curvature decays exponentially, so any decay exponent beta < 1 is
  // admissible for H < 1/2; gamma = 1 - beta recorded at a representative
  // beta = 0.9
  d.gamma = 0.1;
  d.slope_lower = 0.5;
  d.notes = "slope in [1/2,3/2], curvature sech^2/2";
  return d;
}

DriftModel make_capped_power(double C, double c, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
  if (c <= 0.0) throw std::invalid_argument("slope must be positive");
  DriftModel d;
  d.name = "capped_power";
  d.b = [C, c, alpha](double x) {
    return C + c * x + std::pow(std::min(std::abs(x), 1.0), alpha);
  };
  d.db = [c, alpha](double x) {
    double a = std::abs(x);
    if (a >= 1.0) return c;
    // not Lipschitz at the origin, the derivative blows up like |x|^{alpha-1}
    double s = x >= 0.0 ? 1.0 : -1.0;
    return c + s * alpha * std::pow(a, alpha - 1.0);
  };
  d.d2b = [alpha](double x) {
    double a = std::abs(x);
    if (a >= 1.0 || a == 0.0) return 0.0;
    return alpha * (alpha - 1.0) * std::pow(a, alpha - 2.0);
  };
  d.lipschitz = c + 1.0;  // valid away from the origin kink
  d.growth = std::abs(C) + c + 1.0;
  d.gamma_known = true;
  d.gamma = 0.0;  // asymptotically affine ratio, strong small-value bound
  d.slope_lower = 0.0;
  d.notes = "affine plus power kink, |b(x)-C|/|x| -> c";
  return d;
}

DriftModel make_custom(std::function<double(double)> b, std::function<double(double)> db,
                       std::function<double(double)> d2b, double lipschitz,
                       double growth) {
  if (!b) throw std::invalid_argument("missing drift callable");
  DriftModel d;
  d.name = "custom";
  d.b = std::move(b);
  d.db = std::move(db);
  d.d2b = std::move(d2b);
  d.lipschitz = lipschitz;
  d.growth = growth;
  return d;
}

const std::map<std::string, DriftModel>& drift_registry() {
  static const std::map<std::string, DriftModel> reg = [] {
    std::map<std::string, DriftModel> m;
    m.emplace("linear", make_linear());
    m.emplace("logcosh", make_logcosh());
    m.emplace("capped_power", make_capped_power(1.0, 1.0, 0.5));
    return m;
  }();
  return reg;
}

DriftModel drift_by_name(const std::string& name) {
  const auto& reg = drift_registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw std::invalid_argument("unknown drift " + name);
  return it->second;
}

}  // namespace fracmle::sde
