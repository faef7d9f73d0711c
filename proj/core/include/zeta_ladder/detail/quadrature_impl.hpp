#pragma once

// Shared internals of the quadrature engine. The Z^4 panel lattice assembles
// integrals from exactly these helpers, so cached and fresh evaluations go
// through identical arithmetic and agree bit for bit.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "zeta_ladder/quadrature.hpp"

namespace zeta_ladder::quad {

struct GLRule {
  int n = 0;
  std::vector<double> x;     // nodes on (-1, 1), ascending
  std::vector<double> w;     // weights
  std::vector<double> spow;  // spow[i*kMoments + j] = x[i]^j
};

const GLRule& gl_rule(int n);

// Raw panel moments m_j = h * sum_i w_i f(c + h x_i) x_i^j. Nine moments keep
// the weight-expansion truncation below 1e-12 relative for panel widths up to
// x/8. The float-compressed order-16/32 differences feed the error estimate.
inline constexpr int kMoments = 9;
inline constexpr int kDiffMoments = 5;

struct PanelData {
  double m[kMoments];
  float d[kDiffMoments];
};

using BlockEval = std::function<void(std::span<const double>, std::span<double>)>;

PanelData compute_panel(const BlockEval& f, double c, double h, const GLRule& lo,
                        const GLRule& hi);

// Weight P(t) e^{-t/x} with deg P <= 2 (P given by ascending coefficients in t).
struct Weight {
  double inv_x = 0.0;
  std::array<double, 3> poly{1.0, 0.0, 0.0};
};

// Per-panel expansion of the weight in the scaled coordinate s = (t - c)/h:
// integral over the panel = scale * sum_j gamma[j] m_j.
void weight_coeffs(const Weight& wt, double c, double h, double* gamma,
                   double* scale);

double panel_value(const PanelData& pd, const double* gamma, double scale);
double panel_estimate(const PanelData& pd, const double* gamma, double scale);

// Deterministic, indexable set of panels covering [a, b].
class PanelProvider {
 public:
  virtual ~PanelProvider() = default;
  virtual std::size_t count() const = 0;
  virtual void panel(std::size_t i, double& c, double& h) const = 0;
  // Cached moments for panel i, or nullptr to evaluate fresh.
  virtual const PanelData* cached(std::size_t /*i*/) const { return nullptr; }
};

// Assembly + adaptive refinement over a panel set. total_width is b - a.
QuadratureResult run_panels(const PanelProvider& panels, const BlockEval& f,
                            const Weight& wt, const PanelPolicy& policy,
                            double total_width, const ThreadPool* pool);

// Boundary walk of the global lattice (anchored at `anchor`, usually 0) with
// an optional width cap; appends boundaries > from up to >= b.
std::vector<double> walk_boundaries(double anchor, double a, double b,
                                    const PanelPolicy& policy, double width_cap);

}  // namespace zeta_ladder::quad
