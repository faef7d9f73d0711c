#pragma once

#include <complex>
#include <cstdint>
#include <span>

namespace zeta_ladder {

struct ZEvaluatorConfig {
  // Riemann-Siegel correction terms to include (C_0 .. C_{rs_terms-1}).
  int rs_terms = 3;
  // Height below which the direct Euler-Maclaurin evaluation is used instead
  // of Riemann-Siegel. The default is where RS with three correction terms
  // first attains the default target_abs_err.
  double crossover_t = 5000.0;
  // Requested absolute accuracy of Z(t).
  double target_abs_err = 1e-8;
};

// Evaluator of the phase theta(t), the Hardy function Z(t) and its fourth
// power on the critical line. Immutable after construction; every operation
// is a pure function of (config, t) and safe to call from any thread.
class ZEvaluator {
 public:
  explicit ZEvaluator(const ZEvaluatorConfig& cfg = {});

  // theta(t) = -(t/2) ln pi + Im ln Gamma(1/4 + it/2).
  // Asymptotic expansion at and above crossover_t, log-Gamma below.
  double theta(double t) const;

  // Z(t) = e^{i theta(t)} zeta(1/2 + it), real on the critical line.
  double hardy_z(double t) const;

  // Z(t)^4 (always >= 0).
  double z4(double t) const;
  void z4_block(std::span<const double> t, std::span<double> out) const;

  // zeta(1/2 + it) by the direct evaluation path (O(t) cost, any height).
  std::complex<double> zeta_half(double t) const;

  // Zero of Z in (a, b); requires a sign change over [a, b].
  double find_zero(double a, double b) const;

  // Absolute-error model for hardy_z at height t under this configuration.
  double accuracy_bound(double t) const;

  const ZEvaluatorConfig& config() const { return cfg_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  double hardy_z_rs(double t) const;
  double hardy_z_direct(double t) const;

  ZEvaluatorConfig cfg_;
  std::uint64_t fingerprint_;
};

}  // namespace zeta_ladder
