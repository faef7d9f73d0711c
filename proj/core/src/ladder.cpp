#include "zeta_ladder/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zeta_ladder/errors.hpp"
#include "zeta_ladder/fingerprint.hpp"

namespace zeta_ladder {

namespace {

void check_solver_domain(double v, const char* what) {
  if (!std::isfinite(v) || !(v >= kLadderFloorT)) {
    throw DomainError(std::string(what) + ": argument must be finite and >= " +
                      canonical_double(kLadderFloorT) + ", got " +
                      canonical_double(v));
  }
}

struct RootResult {
  double x = 0.0;
  double residual_abs = 0.0;
  int iterations = 0;
};

// Bracketed secant/bisection on a strictly increasing map f with f(root) = 0.
// The presumed bracket [lo, hi] is evaluated lazily: endpoints are only
// probed when iterates pile up against them, and a same-sign probe raises
// BracketError.
RootResult increasing_root(const std::function<double(double)>& f, double lo,
                           double hi, double x0, double d_est, double tol_abs,
                           const char* what) {
  double blo = lo, bhi = hi;  // best-known enclosure (signs presumed)
  bool lo_checked = false, hi_checked = false;
  int iters = 0;
  auto eval = [&](double x) {
    ++iters;
    return f(x);
  };
  double x1 = std::clamp(x0, lo, hi);
  double f1 = eval(x1);
  if (std::abs(f1) <= tol_abs) return {x1, std::abs(f1), iters};
  if (f1 < 0.0) blo = x1; else bhi = x1;
  double x2 = std::clamp(x1 - f1 / std::max(d_est, 1e-300), blo, bhi);
  if (x2 == x1) x2 = 0.5 * (blo + bhi);
  double f2;
  for (int it = 0; it < 80; ++it) {
    f2 = eval(x2);
    if (std::abs(f2) <= tol_abs) return {x2, std::abs(f2), iters};
    if (f2 < 0.0) blo = std::max(blo, x2); else bhi = std::min(bhi, x2);
    // secant proposal, bisection fallback
    double xn;
    double denom = f2 - f1;
    if (denom != 0.0) {
      xn = x2 - f2 * (x2 - x1) / denom;
    } else {
      xn = 0.5 * (blo + bhi);
    }
    if (!(xn > blo) || !(xn < bhi)) xn = 0.5 * (blo + bhi);
    // pushed against a presumed endpoint: verify the bracket actually holds
    if (!lo_checked && xn <= lo * (1.0 + 1e-12) && blo == lo) {
      lo_checked = true;
      if (eval(lo) > 0.0) {
        throw BracketError(std::string(what) +
                           ": no root in presumed bracket (left endpoint)");
      }
    }
    if (!hi_checked && xn >= hi * (1.0 - 1e-12) && bhi == hi) {
      hi_checked = true;
      if (eval(hi) < 0.0) {
        throw BracketError(std::string(what) +
                           ": no root in presumed bracket (right endpoint)");
      }
    }
    x1 = x2;
    f1 = f2;
    x2 = xn;
    if (bhi - blo < 1e-14 * bhi) {
      double fr = eval(x2);
      if (std::abs(fr) <= tol_abs) return {x2, std::abs(fr), iters};
      throw ConvergenceError(std::string(what) +
                                 ": interval collapsed before meeting tolerance",
                             x2, std::abs(fr));
    }
  }
  throw ConvergenceError(std::string(what) + ": no convergence after 80 iterations",
                         x2, std::abs(f2));
}

}  // namespace

LadderPoint solve_phi2(double T, const LadderContext& ctx, double tol) {
  check_solver_domain(T, "solve_phi2");
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw DomainError("solve_phi2: tol must be positive");
  }
  double I = ctx.moments->fourth_moment(T);
  if (!(I > 0.0)) {
    throw ConvergenceError("solve_phi2: I(T) not positive", 0.0, 0.0);
  }
  auto f = [&](double x) { return weighted_fourth_moment(x, ctx.wm) - I; };
  double lnT = std::log(T);
  double l2 = lnT * lnT;
  double d_est = l2 * l2 / (2.0 * std::numbers::pi * std::numbers::pi);
  RootResult r =
      increasing_root(f, 0.5 * T, 2.0 * T, T, d_est, tol * I, "solve_phi2");
  return {T, r.x, r.residual_abs / I, r.iterations};
}

double inverse_ladder(double y, const LadderContext& ctx, double tol) {
  check_solver_domain(y, "inverse_ladder");
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw DomainError("inverse_ladder: tol must be positive");
  }
  double W = weighted_fourth_moment(y, ctx.wm);
  if (!(W > 0.0)) {
    throw ConvergenceError("inverse_ladder: W(y) not positive", 0.0, 0.0);
  }
  auto f = [&](double T) { return ctx.moments->fourth_moment(T) - W; };
  double lny = std::log(y);
  double l2 = lny * lny;
  double d_est = l2 * l2 / (2.0 * std::numbers::pi * std::numbers::pi);
  RootResult r =
      increasing_root(f, 0.5 * y, 2.0 * y, y, d_est, tol * W, "inverse_ladder");
  return r.x;
}

double phi2_derivative(double t, const LadderContext& ctx) {
  check_solver_domain(t, "phi2_derivative");
  LadderPoint p = solve_phi2(t, ctx);
  double pp = phi2_prime(p.phi2, ctx.wm);
  if (!(pp > 0.0)) {
    throw ConvergenceError("phi2_derivative: Phi2' not positive at phi2(t)", pp,
                           0.0);
  }
  return ctx.wm.evaluator().z4(t) / pp;
}

ReverseInterval reverse_interval(double T, double U, const LadderContext& ctx) {
  check_solver_domain(T, "reverse_interval");
  if (!(U > 0.0) || !(U <= T) || !std::isfinite(U)) {
    throw DomainError("reverse_interval: need 0 < U <= T");
  }
  ReverseInterval r;
  r.T = T;
  r.U = U;
  r.T_ring = inverse_ladder(T, ctx);
  r.TU_ring = inverse_ladder(T + U, ctx);
  return r;
}

double chord_slope(double T, double U, const LadderContext& ctx) {
  check_solver_domain(T, "chord_slope");
  if (!(U > 0.0) || !std::isfinite(U)) {
    throw DomainError("chord_slope: need U > 0");
  }
  double p0 = solve_phi2(T, ctx).phi2;
  double p1 = solve_phi2(T + U, ctx).phi2;
  return (p1 - p0) / U;
}

detail::Chebyshev fit_phi2_prime(double ylo, double yhi,
                                 const WeightedMomentContext& ctx,
                                 double rel_target, int max_nodes) {
  auto f = [&ctx](double y) { return phi2_prime(y, ctx); };
  detail::Chebyshev cur =
      detail::Chebyshev::fit(ylo, yhi, 17, f, ctx.pool());
  for (int n = 33; n <= max_nodes; n = 2 * n - 1) {
    detail::Chebyshev fine = detail::Chebyshev::fit(ylo, yhi, n, f, ctx.pool());
    double worst = 0.0;
    double scale = 0.0;
    for (int i = 0; i <= 96; ++i) {
      double y = ylo + (yhi - ylo) * i / 96.0;
      double a = cur(y), b = fine(y);
      worst = std::max(worst, std::abs(a - b));
      scale = std::max(scale, std::abs(b));
    }
    if (worst <= rel_target * scale) return fine;
    cur = fine;
  }
  return cur;
}

DensePhi2::DensePhi2(double t0, double t1, const LadderContext& ctx, int grid_nodes)
    : evaluator_(&ctx.wm.evaluator()), t0_(t0), t1_(t1) {
  if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
    throw DomainError("DensePhi2: need finite t0 < t1");
  }
  if (grid_nodes < 2) throw DomainError("DensePhi2: grid_nodes must be >= 2");

  // anchors: every 50th grid node, full solves
  std::vector<double>& anchor_t = anchor_t_;
  std::vector<double>& anchor_y = anchor_y_;
  for (int k = 0; k < grid_nodes; k += 50) {
    anchor_t.push_back(t0 + (t1 - t0) * k / (grid_nodes - 1));
  }
  if (anchor_t.back() != t1) anchor_t.push_back(t1);
  for (double ta : anchor_t) {
    anchor_y.push_back(solve_phi2(ta, ctx).phi2);
  }
  anchor_count_ = static_cast<int>(anchor_t.size());

  phi_prime_ = fit_phi2_prime(anchor_y.front() - 2.0, anchor_y.back() + 2.0, ctx.wm);
  // guard: the interpolated derivative must stay positive on the range
  for (int i = 0; i <= 200; ++i) {
    double y = phi_prime_.lo() + (phi_prime_.hi() - phi_prime_.lo()) * i / 200.0;
    if (!(phi_prime_(y) > 0.0)) {
      throw ConvergenceError("DensePhi2: Phi2' interpolant not positive",
                             phi_prime_(y), 0.0);
    }
  }

  const ZEvaluator& ev = *evaluator_;
  h_fine_ = oscillation_width(std::max(t1, 20.0)) / 32.0;
  double h_target = h_fine_;
  segments_.reserve(anchor_t.size() - 1);
  double y = anchor_y.front();
  for (std::size_t s = 0; s + 1 < anchor_t.size(); ++s) {
    double ta = anchor_t[s], tb = anchor_t[s + 1];
    auto count = static_cast<std::size_t>(std::ceil((tb - ta) / h_target)) + 1;
    if (count < 2) count = 2;
    double h = (tb - ta) / static_cast<double>(count - 1);
    Segment seg{ta, h, values_.size(), count};
    y = anchor_y[s];  // snap to anchor
    double z4_t = ev.z4(ta);
    for (std::size_t i = 0; i + 1 < count; ++i) {
      double t = ta + h * static_cast<double>(i);
      double k1 = z4_t / phi_prime_(y);
      values_.push_back(y);
      derivs_.push_back(k1);
      double tm = t + 0.5 * h;
      double z4_m = ev.z4(tm);
      double k2 = z4_m / phi_prime_(y + 0.5 * h * k1);
      double k3 = z4_m / phi_prime_(y + 0.5 * h * k2);
      double z4_n = ev.z4(t + h);
      double k4 = z4_n / phi_prime_(y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      z4_t = z4_n;
    }
    // segment endpoint: record drift against the anchor solve, then snap
    max_jump_ = std::max(max_jump_, std::abs(y - anchor_y[s + 1]));
    values_.push_back(anchor_y[s + 1]);
    derivs_.push_back(z4_t / phi_prime_(anchor_y[s + 1]));
    segments_.push_back(seg);
  }
}

double DensePhi2::operator()(double t) const {
  if (!(t >= t0_) || !(t <= t1_)) {
    throw DomainError("DensePhi2: t outside propagated range");
  }
  // locate segment (anchor spacing is uniform except possibly the last)
  std::size_t s = segments_.size() - 1;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    double tend = seg.t_start + seg.step * static_cast<double>(seg.count - 1);
    if (t <= tend || i == segments_.size() - 1) {
      s = i;
      break;
    }
  }
  const Segment& seg = segments_[s];
  double u = (t - seg.t_start) / seg.step;
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i >= seg.count - 1) i = seg.count - 2;
  double x = u - static_cast<double>(i);
  std::size_t o = seg.offset + i;
  double y0 = values_[o], y1 = values_[o + 1];
  double d0 = derivs_[o] * seg.step, d1 = derivs_[o + 1] * seg.step;
  // cubic Hermite
  double x2 = x * x, x3 = x2 * x;
  return (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * d0 +
         (-2 * x3 + 3 * x2) * y1 + (x3 - x2) * d1;
}

double DensePhi2::derivative(double t) const {
  double y = (*this)(t);
  return evaluator_->z4(t) / phi_prime_(y);
}

std::vector<double> DensePhi2::at_sorted(std::span<const double> t) const {
  std::vector<double> out;
  out.reserve(t.size());
  const ZEvaluator& ev = *evaluator_;
  double tc = anchor_t_.front();
  double y = anchor_y_.front();
  double z4_c = ev.z4(tc);
  std::size_t next_anchor = 1;
  auto rk4_to = [&](double target) {
    while (tc < target) {
      double h = std::min(h_fine_, target - tc);
      double k1 = z4_c / phi_prime_(y);
      double tm = tc + 0.5 * h;
      double z4_m = ev.z4(tm);
      double k2 = z4_m / phi_prime_(y + 0.5 * h * k1);
      double k3 = z4_m / phi_prime_(y + 0.5 * h * k2);
      double z4_n = ev.z4(tc + h);
      double k4 = z4_n / phi_prime_(y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      tc += h;
      z4_c = z4_n;
    }
  };
  for (double tq : t) {
    if (!(tq >= t0_) || !(tq <= t1_) || tq < tc - 1e-9 * (1.0 + std::abs(tq))) {
      throw DomainError("DensePhi2::at_sorted: times must ascend within range");
    }
    while (next_anchor < anchor_t_.size() && anchor_t_[next_anchor] <= tq) {
      rk4_to(anchor_t_[next_anchor]);
      y = anchor_y_[next_anchor];
      ++next_anchor;
    }
    rk4_to(tq);
    out.push_back(y);
  }
  return out;
}

}  // namespace zeta_ladder
