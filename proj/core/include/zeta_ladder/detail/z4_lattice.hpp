#pragma once

#include <cstdint>
#include <memory>

#include "zeta_ladder/detail/quadrature_impl.hpp"
#include "zeta_ladder/parallel.hpp"
#include "zeta_ladder/quadrature.hpp"
#include "zeta_ladder/zeta_core.hpp"

namespace zeta_ladder {

// Cache of Z^4 panel moments on the global panel lattice anchored at t = 0.
// Every fourth-moment integral (weighted and unweighted) assembles from the
// same per-panel data through the same arithmetic as the generic quadrature
// path, so cached and fresh evaluations agree bit for bit while repeated
// integrals cost panel-assembly arithmetic instead of fresh Z evaluations.
//
// Extension is single-writer; reads are lock-free against published chunks.
class Z4PanelLattice {
 public:
  Z4PanelLattice(std::shared_ptr<const ZEvaluator> evaluator,
                 const PanelPolicy& policy, std::shared_ptr<ThreadPool> pool);
  ~Z4PanelLattice();

  Z4PanelLattice(const Z4PanelLattice&) = delete;
  Z4PanelLattice& operator=(const Z4PanelLattice&) = delete;

  const ZEvaluator& evaluator() const { return *evaluator_; }
  const std::shared_ptr<const ZEvaluator>& evaluator_ptr() const { return evaluator_; }
  const PanelPolicy& lattice_policy() const { return policy_; }
  ThreadPool* pool() const { return pool_.get(); }
  std::uint64_t fingerprint() const { return fingerprint_; }

  // Smallest weight scale x for which the x/8 panel-width cap cannot bind, so
  // lattice panels remain valid for the weighted integrand.
  double min_weight_scale() const { return 8.0 * max_width_; }

  // Integral of poly(t) e^{-t/x} Z^4(t) over [a, b], 0 <= a <= b, assembled
  // from cached panels; rel_tol and max_panels come from `policy`, whose
  // gl_order and panels_per_oscillation must match the lattice.
  QuadratureResult integrate(const quad::Weight& wt, double a, double b,
                             const PanelPolicy& policy) const;

  std::size_t panels_filled() const;

  struct Chunk;

 private:
  struct State;

  void ensure_coverage(double b) const;

  std::shared_ptr<const ZEvaluator> evaluator_;
  PanelPolicy policy_;
  std::shared_ptr<ThreadPool> pool_;
  std::uint64_t fingerprint_;
  double max_width_;
  std::unique_ptr<State> state_;
};

}  // namespace zeta_ladder
