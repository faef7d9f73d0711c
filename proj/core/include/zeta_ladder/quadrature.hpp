#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "zeta_ladder/parallel.hpp"

namespace zeta_ladder {

// Panel scheduling for oscillatory integrands whose local oscillation scale
// at height t is ~ 2pi/ln(t/2pi). Defaults resolve one Z^4 bump with four
// Gauss-Legendre panels of 16 nodes each, which is near machine precision;
// the order-doubling comparison per panel supplies the error estimate.
struct PanelPolicy {
  int gl_order = 16;
  double panels_per_oscillation = 4.0;
  double rel_tol = 1e-8;
  long long max_panels = 1LL << 25;

  void validate() const;
  std::string canonical() const;
  std::uint64_t fingerprint() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long long panels_used = 0;
  long long evaluations = 0;
};

// Local oscillation scale 2pi/ln(max(t,20)/2pi).
double oscillation_width(double t);

// Width of the lattice panel starting at t (oscillation scale / ppo, with one
// lookahead step so the bound also holds at the right edge).
double panel_width_bound(double t, const PanelPolicy& policy);

// Integral of f over [a, b]. Panels are compared at gl_order and 2*gl_order;
// panels failing their share of the budget are split until the total error
// estimate meets rel_tol (relative to the value). The panel reduction is a
// fixed balanced tree over the panel index, so the result is bit-identical
// regardless of thread count.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const PanelPolicy& policy = {},
                           const ThreadPool* pool = nullptr);

// Integral of f(t) e^{-t/x} over [a, b]; panels additionally capped at width
// x/8 so the weight varies slowly across a panel.
QuadratureResult integrate_weighted(const std::function<double(double)>& f,
                                    double x, double a, double b,
                                    const PanelPolicy& policy = {},
                                    const ThreadPool* pool = nullptr);

}  // namespace zeta_ladder
