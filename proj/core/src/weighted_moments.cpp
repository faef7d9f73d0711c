#include "zeta_ladder/weighted_moments.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "zeta_ladder/errors.hpp"
#include "zeta_ladder/fingerprint.hpp"

namespace zeta_ladder {

MuFamily::MuFamily(double omega1, double omega2) : omega1_(omega1), omega2_(omega2) {
  if (!(omega1_ >= 1.0) || !(omega2_ >= 1.0) || !std::isfinite(omega1_) ||
      !std::isfinite(omega2_)) {
    throw DomainError("MuFamily: omega1 and omega2 must be >= 1");
  }
}

void MuFamily::check_domain(double y) const {
  if (!(y >= 2.0) || !std::isfinite(y)) {
    throw DomainError("MuFamily: y must be finite and >= 2, got " +
                      canonical_double(y));
  }
}

double MuFamily::mu(double y) const {
  check_domain(y);
  return 4.0 * std::pow(y, omega1_) * std::pow(std::log(y), omega2_);
}

std::pair<double, double> MuFamily::mu_derivatives(double y) const {
  check_domain(y);
  double l = std::log(y);
  double d1 = 4.0 * std::pow(y, omega1_ - 1.0) * std::pow(l, omega2_ - 1.0) *
              (omega1_ * l + omega2_);
  double d2 = 4.0 * std::pow(y, omega1_ - 2.0) * std::pow(l, omega2_ - 2.0) *
              (omega1_ * (omega1_ - 1.0) * l * l +
               omega2_ * (2.0 * omega1_ - 1.0) * l + omega2_ * (omega2_ - 1.0));
  return {d1, d2};
}

std::string MuFamily::canonical() const {
  return "mu|w1=" + canonical_double(omega1_) + "|w2=" + canonical_double(omega2_);
}

struct WeightedMomentContext::Memo {
  std::mutex m;
  std::unordered_map<std::uint64_t, double> w_values;
};

WeightedMomentContext::WeightedMomentContext(MuFamily mu,
                                             std::shared_ptr<Z4PanelLattice> lattice,
                                             const PanelPolicy& policy)
    : mu_(std::move(mu)), lattice_(std::move(lattice)), policy_(policy),
      memo_(std::make_shared<Memo>()) {
  policy_.validate();
  if (policy_.gl_order != lattice_->lattice_policy().gl_order ||
      policy_.panels_per_oscillation !=
          lattice_->lattice_policy().panels_per_oscillation) {
    throw DomainError(
        "WeightedMomentContext: policy panel shape differs from lattice");
  }
  fingerprint_ = fnv1a64("wm|" + fingerprint_hex(lattice_->fingerprint()) + "|" +
                         policy_.canonical() + "|" + mu_.canonical());
}

double WeightedMomentContext::memoized_w(
    double x, const std::function<double(double)>& compute) const {
  std::uint64_t key = std::bit_cast<std::uint64_t>(x);
  {
    std::lock_guard lk(memo_->m);
    auto it = memo_->w_values.find(key);
    if (it != memo_->w_values.end()) return it->second;
  }
  double v = compute(x);
  std::lock_guard lk(memo_->m);
  memo_->w_values.emplace(key, v);
  return v;
}

double mu(double y, const WeightedMomentContext& ctx) {
  return ctx.mu_family().mu(y);
}

std::pair<double, double> mu_derivatives(double y, const WeightedMomentContext& ctx) {
  return ctx.mu_family().mu_derivatives(y);
}

namespace {

// Integral of poly(t) e^{-t/x} Z^4(t) over [a, b]; lattice-assembled when the
// x/8 width cap cannot bind, direct panels otherwise (small x only).
double weighted_z4_integral(const WeightedMomentContext& ctx, double x,
                            const std::array<double, 3>& poly, double a, double b) {
  quad::Weight wt;
  wt.inv_x = 1.0 / x;
  wt.poly = poly;
  if (x >= ctx.lattice().min_weight_scale()) {
    return ctx.lattice().integrate(wt, a, b, ctx.policy()).value;
  }
  const ZEvaluator& ev = ctx.evaluator();
  QuadratureResult q = integrate_weighted(
      [&ev, &poly](double t) {
        return (poly[0] + t * (poly[1] + t * poly[2])) * ev.z4(t);
      },
      x, a, b, ctx.policy(), ctx.pool());
  return q.value;
}

}  // namespace

double weighted_fourth_moment(double x, const WeightedMomentContext& ctx) {
  if (!(x >= 2.0) || !std::isfinite(x)) {
    throw DomainError("weighted_fourth_moment: x must be finite and >= 2");
  }
  return ctx.memoized_w(x, [&](double xv) {
    double b = ctx.mu_family().mu(xv);
    return weighted_z4_integral(ctx, xv, {1.0, 0.0, 0.0}, 0.0, b);
  });
}

double laplace_fourth_moment(double delta, const WeightedMomentContext& ctx) {
  if (!(delta > 0.0) || !(delta <= 0.5) || !std::isfinite(delta)) {
    throw DomainError("laplace_fourth_moment: need 0 < delta <= 1/2");
  }
  return weighted_fourth_moment(1.0 / delta, ctx);
}

double phi2_prime(double y, const WeightedMomentContext& ctx) {
  if (!(y >= 2.0) || !std::isfinite(y)) {
    throw DomainError("phi2_prime: y must be finite and >= 2");
  }
  double m = ctx.mu_family().mu(y);
  auto [d1, d2] = ctx.mu_family().mu_derivatives(y);
  (void)d2;
  double integral = weighted_z4_integral(ctx, y, {0.0, 1.0, 0.0}, 0.0, m);
  double boundary = ctx.evaluator().z4(m) * std::exp(-m / y) * d1;
  return integral / (y * y) + boundary;
}

Phi2SecondParts phi2_second_parts(double y, const WeightedMomentContext& ctx) {
  if (!(y >= 2.0) || !std::isfinite(y)) {
    throw DomainError("phi2_second: y must be finite and >= 2");
  }
  const ZEvaluator& ev = ctx.evaluator();
  double m = ctx.mu_family().mu(y);
  auto [d1, d2] = ctx.mu_family().mu_derivatives(y);
  // J: integrand (t^2/y - 2t) e^{-t/y} Z^4 changes sign at t = 2y
  std::array<double, 3> poly{0.0, -2.0, 1.0 / y};
  double split = std::min(2.0 * y, m);
  double j = weighted_z4_integral(ctx, y, poly, 0.0, split);
  if (split < m) j += weighted_z4_integral(ctx, y, poly, split, m);
  j /= y * y * y;
  // Q: boundary terms at t = mu(y); Z' by central difference
  double zm = ev.hardy_z(m);
  double z3 = zm * zm * zm;
  double z4m = z3 * zm;
  double h = 1e-4;
  double zprime = (ev.hardy_z(m + h) - ev.hardy_z(m - h)) / (2.0 * h);
  double q = std::exp(-m / y) *
             (2.0 / (y * y) * m * d1 * z4m + 4.0 * d1 * d1 * z3 * zprime -
              d1 * d1 / y * z4m + d2 * z4m);
  return {j, q};
}

double phi2_second(double y, const WeightedMomentContext& ctx) {
  Phi2SecondParts p = phi2_second_parts(y, ctx);
  return p.j + p.q;
}

}  // namespace zeta_ladder
