#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "zeta_ladder/detail/z4_lattice.hpp"
#include "zeta_ladder/quadrature.hpp"

namespace zeta_ladder {

// Truncation family mu(y) = 4 y^w1 ln^w2 y, w1, w2 >= 1, strictly increasing
// on its domain y >= 2.
class MuFamily {
 public:
  explicit MuFamily(double omega1 = 1.0, double omega2 = 1.0);

  double mu(double y) const;
  // (mu'(y), mu''(y)) in closed form.
  std::pair<double, double> mu_derivatives(double y) const;

  double omega1() const { return omega1_; }
  double omega2() const { return omega2_; }
  std::string canonical() const;

 private:
  void check_domain(double y) const;
  double omega1_, omega2_;
};

// Pairing of a mu family with a Z evaluator (through the shared panel
// lattice) and a panel policy. Immutable; all operations on it are pure and
// thread-safe. Holds a memo of W values keyed by x (recomputation would give
// bit-identical results, the memo only saves work).
class WeightedMomentContext {
 public:
  WeightedMomentContext(MuFamily mu, std::shared_ptr<Z4PanelLattice> lattice,
                        const PanelPolicy& policy);

  const MuFamily& mu_family() const { return mu_; }
  const PanelPolicy& policy() const { return policy_; }
  const ZEvaluator& evaluator() const { return lattice_->evaluator(); }
  Z4PanelLattice& lattice() const { return *lattice_; }
  const std::shared_ptr<Z4PanelLattice>& lattice_ptr() const { return lattice_; }
  ThreadPool* pool() const { return lattice_->pool(); }
  std::uint64_t fingerprint() const { return fingerprint_; }

  double memoized_w(double x, const std::function<double(double)>& compute) const;

 private:
  MuFamily mu_;
  std::shared_ptr<Z4PanelLattice> lattice_;
  PanelPolicy policy_;
  std::uint64_t fingerprint_;
  struct Memo;
  std::shared_ptr<Memo> memo_;
};

double mu(double y, const WeightedMomentContext& ctx);
std::pair<double, double> mu_derivatives(double y, const WeightedMomentContext& ctx);

// W(x) = integral of Z^4(t) e^{-t/x} over [0, mu(x)]; strictly increasing.
double weighted_fourth_moment(double x, const WeightedMomentContext& ctx);

// Laplace-transform integral truncated at mu(1/delta); identical to
// weighted_fourth_moment(1/delta). Requires 0 < delta <= 1/2.
double laplace_fourth_moment(double delta, const WeightedMomentContext& ctx);

// Phi_2'(y): (1/y^2) Int t Z^4 e^{-t/y} over [0, mu(y)] plus the boundary term
// Z^4(mu) e^{-mu/y} mu'(y).
double phi2_prime(double y, const WeightedMomentContext& ctx);

// Phi_2''(y) = J + Q; J integrates (t^2/y - 2t) e^{-t/y} Z^4 / y^3 with an
// explicit split at the sign change t = 2y, Q collects the four boundary
// terms (Z' at mu(y) by central difference with step 1e-4).
struct Phi2SecondParts {
  double j = 0.0;
  double q = 0.0;
};
Phi2SecondParts phi2_second_parts(double y, const WeightedMomentContext& ctx);
double phi2_second(double y, const WeightedMomentContext& ctx);

}  // namespace zeta_ladder
