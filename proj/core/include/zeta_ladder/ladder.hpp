#pragma once

#include <memory>
#include <vector>

#include "zeta_ladder/detail/chebyshev.hpp"
#include "zeta_ladder/moments.hpp"
#include "zeta_ladder/weighted_moments.hpp"

namespace zeta_ladder {

// A solved point of the defining equation W(phi2) = I(T).
struct LadderPoint {
  double T = 0.0;
  double phi2 = 0.0;
  double residual = 0.0;  // |W(phi2) - I(T)| / I(T)
  int iterations = 0;
};

// Preimage of [T, T+U] under phi2.
struct ReverseInterval {
  double T = 0.0;
  double U = 0.0;
  double T_ring = 0.0;   // M2(T)
  double TU_ring = 0.0;  // M2(T+U)
};

struct LadderContext {
  WeightedMomentContext wm;
  std::shared_ptr<MomentTable> moments;
};

// Desk-scale floor below which the bracket and monotonicity are not
// numerically robust.
inline constexpr double kLadderFloorT = 100.0;

// Solve W(x) = I(T) for x = phi2(T) by a bracketed secant/bisection hybrid on
// the strictly increasing map x -> W(x) - I(T). Logical initial bracket
// [T/2, 2T], warm-started at x = T; endpoints are only evaluated if the
// iteration is pushed against them.
LadderPoint solve_phi2(double T, const LadderContext& ctx, double tol = 1e-9);

// Inverse ladder M2: solve I(T) = W(y) for T.
double inverse_ladder(double y, const LadderContext& ctx, double tol = 1e-9);

// phi2'(t) = Z^4(t) / Phi2'(phi2(t)); nonnegative, zero exactly at zeros of Z.
double phi2_derivative(double t, const LadderContext& ctx);

ReverseInterval reverse_interval(double T, double U, const LadderContext& ctx);

// (phi2(T+U) - phi2(T)) / U.
double chord_slope(double T, double U, const LadderContext& ctx);

// Dense phi2 over [t0, t1] by anchored propagation: RK4 on
// d phi2/dt = Z^4(t) / Phi2'(phi2) against a Chebyshev interpolant of
// phi2_prime over the image interval, re-anchored by a full solve at every
// 50th grid node. Queries interpolate a fine Hermite table, so evaluation is
// cheap and thread-safe after construction.
class DensePhi2 {
 public:
  DensePhi2(double t0, double t1, const LadderContext& ctx, int grid_nodes = 401);

  double operator()(double t) const;
  double derivative(double t) const;  // Z^4(t) / Phi2'(phi2(t)), fresh Z^4
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  const detail::Chebyshev& phi2_prime_interp() const { return phi_prime_; }
  int anchor_count() const { return anchor_count_; }
  double max_anchor_jump() const { return max_jump_; }

  // phi2 at an ascending sequence of times by a fresh anchored RK4 sweep
  // (no interpolation error; one sequential pass over the whole sequence).
  std::vector<double> at_sorted(std::span<const double> t) const;

 private:
  struct Segment {
    double t_start = 0.0;
    double step = 0.0;
    std::size_t offset = 0;  // into values_/derivs_
    std::size_t count = 0;   // grid points including both ends
  };

  const ZEvaluator* evaluator_;
  double t0_, t1_;
  double h_fine_ = 0.0;
  detail::Chebyshev phi_prime_;
  std::vector<Segment> segments_;
  std::vector<double> values_, derivs_;
  std::vector<double> anchor_t_, anchor_y_;
  int anchor_count_ = 0;
  double max_jump_ = 0.0;
};

// Adaptive Chebyshev fit of phi2_prime over [ylo, yhi]: doubles the node
// count until two interpolants agree to rel_target, starting at 17 nodes.
detail::Chebyshev fit_phi2_prime(double ylo, double yhi,
                                 const WeightedMomentContext& ctx,
                                 double rel_target = 1e-6, int max_nodes = 65);

}  // namespace zeta_ladder
