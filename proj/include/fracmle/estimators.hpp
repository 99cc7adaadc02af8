#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fracmle/frac_ops.hpp"
#include "fracmle/grid.hpp"

namespace fracmle::est {

struct DegenerateInformation : std::runtime_error {
  explicit DegenerateInformation(double info)
      : std::runtime_error("degenerate information"), information(info) {}
  double information;
};

struct MleResult {
  double theta = 0.0;
  double numerator = 0.0;    // ito sum
  double information = 0.0;  // sum q^2 dt
};

// cell values from node values by the left endpoint
std::vector<double> left_cells(const std::vector<double>& qnodes);

// theta = - sum q_i dw_i / sum q_i^2 dt. With dw the raw driving increments
// this targets the drift of the reference tilt; handing it the negated
// innovations makes it coincide with the z form.
MleResult mle_w_form(const std::vector<double>& qcells, const std::vector<double>& dw,
                     double dt);

// theta = + sum q_i dz_i / sum q_i^2 dt with dz increments of the whitened
// observation; this is the estimator all sampling code uses
MleResult mle_z_form(const std::vector<double>& qcells, const std::vector<double>& dz,
                     double dt);

// F(theta) = -theta sum q dw - theta^2/2 sum q^2 dt; concave, argmax at the
// w-form estimate
double loglikelihood(double theta, const std::vector<double>& qcells,
                     const std::vector<double>& dw, double dt);

// Q at nodes from drift samples g = b(X) at nodes, exact-cell plan
std::vector<double> compute_Q(double H, const Grid& g, const std::vector<double>& gnodes,
                              const std::string& plan_cache_dir = "");

// same target by O(n log n) kernel-moment convolution
std::vector<double> compute_q_fast(double H, const Grid& g,
                                   const std::vector<double>& gnodes);

// linear drift only: Q_t = int_0^t A(t,v) dZ_v with
// A(t,v) = ((v/t)^{1/2-H} + (t/v)^{1/2-H})/2, evaluated by two running sums
std::vector<double> q_linear_from_dz(double H, const Grid& g,
                                     const std::vector<double>& dz);

// kernel-transform objects for the semimartingale route, linear drift scope
struct KbObjects {
  double H = 0.5;
  std::vector<double> z;      // transformed observation at nodes
  std::vector<double> a;      // int_0^t k(t,s) X_s ds
  std::vector<double> q;      // dA/d omega
  std::vector<double> omega;  // time change lambda^{-1} t^{2-2H}
};

KbObjects kb_objects(double H, const Grid& g, const std::vector<double>& x);

// theta = sum q dz / sum q^2 d omega over the transformed objects
MleResult mle_kb(const KbObjects& kb, const Grid& g);

// brownian-scale process recovered from the transformed one,
// Z_t = d^{-1} int_0^t s^{H-1/2} dZkb_s
std::vector<double> z_from_kb(double H, const Grid& g, const std::vector<double>& zkb);

}  // namespace fracmle::est
