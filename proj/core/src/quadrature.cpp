#include "zeta_ladder/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "zeta_ladder/detail/quadrature_impl.hpp"
#include "zeta_ladder/errors.hpp"
#include "zeta_ladder/fingerprint.hpp"

namespace zeta_ladder {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::size_t kSumChunk = 65536;
}  // namespace

void PanelPolicy::validate() const {
  if (gl_order < 4 || gl_order > 100) {
    throw DomainError("PanelPolicy: gl_order must be in [4, 100]");
  }
  if (!(panels_per_oscillation >= 1.0) || !std::isfinite(panels_per_oscillation)) {
    throw DomainError("PanelPolicy: panels_per_oscillation must be >= 1");
  }
  if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) {
    throw DomainError("PanelPolicy: rel_tol must be in (0, 1)");
  }
  if (max_panels < 1) {
    throw DomainError("PanelPolicy: max_panels must be >= 1");
  }
}

std::string PanelPolicy::canonical() const {
  return "quad|gl=" + std::to_string(gl_order) +
         "|ppo=" + canonical_double(panels_per_oscillation) +
         "|rtol=" + canonical_double(rel_tol) +
         "|maxp=" + std::to_string(max_panels);
}

std::uint64_t PanelPolicy::fingerprint() const { return fnv1a64(canonical()); }

double oscillation_width(double t) {
  return kTwoPi / std::log(std::max(t, 20.0) / kTwoPi);
}

double panel_width_bound(double t, const PanelPolicy& policy) {
  double w0 = oscillation_width(t) / policy.panels_per_oscillation;
  return oscillation_width(t + w0) / policy.panels_per_oscillation;
}

namespace quad {

// ---------------------------------------------------------------------------
// Gauss-Legendre rules (Newton on the Legendre recurrence), cached per order.
// ---------------------------------------------------------------------------
namespace {
GLRule build_rule(int n) {
  GLRule r;
  r.n = n;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one polishing step after convergence
        double q0 = 1.0, q1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double q2 = q1;
          q1 = q0;
          q0 = ((2.0 * j + 1.0) * x * q1 - j * q2) / (j + 1.0);
        }
        pp = n * (x * q0 - q1) / (x * x - 1.0);
        x -= q0 / pp;
        break;
      }
    }
    // nodes ascending: i-th computed node is the (n-1-i)-th largest
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double wgt = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = wgt;
    r.w[n - 1 - i] = wgt;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  r.spow.resize(static_cast<std::size_t>(n) * kMoments);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int j = 0; j < kMoments; ++j) {
      r.spow[static_cast<std::size_t>(i) * kMoments + j] = p;
      p *= r.x[i];
    }
  }
  return r;
}
}  // namespace

const GLRule& gl_rule(int n) {
  static std::mutex mu;
  static std::map<int, GLRule> cache;
  std::lock_guard lk(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

PanelData compute_panel(const BlockEval& f, double c, double h, const GLRule& lo,
                        const GLRule& hi) {
  thread_local std::vector<double> tbuf, vbuf;
  auto moments = [&](const GLRule& r, double* m) {
    tbuf.resize(r.n);
    vbuf.resize(r.n);
    for (int i = 0; i < r.n; ++i) tbuf[i] = c + h * r.x[i];
    f(std::span<const double>(tbuf.data(), r.n), std::span<double>(vbuf.data(), r.n));
    for (int j = 0; j < kMoments; ++j) m[j] = 0.0;
    for (int i = 0; i < r.n; ++i) {
      double wv = r.w[i] * vbuf[i];
      if (!std::isfinite(wv)) {
        throw DomainError("integrate: integrand not finite at t = " +
                          canonical_double(tbuf[i]));
      }
      const double* sp = &r.spow[static_cast<std::size_t>(i) * kMoments];
      for (int j = 0; j < kMoments; ++j) m[j] += wv * sp[j];
    }
    for (int j = 0; j < kMoments; ++j) m[j] *= h;
  };
  double mlo[kMoments];
  PanelData pd;
  moments(lo, mlo);
  moments(hi, pd.m);
  for (int j = 0; j < kDiffMoments; ++j) {
    pd.d[j] = static_cast<float>(pd.m[j] - mlo[j]);
  }
  return pd;
}

void weight_coeffs(const Weight& wt, double c, double h, double* gamma,
                   double* scale) {
  *scale = wt.inv_x == 0.0 ? 1.0 : std::exp(-c * wt.inv_x);
  double q0 = wt.poly[0] + c * (wt.poly[1] + c * wt.poly[2]);
  double q1 = (wt.poly[1] + 2.0 * wt.poly[2] * c) * h;
  double q2 = wt.poly[2] * h * h;
  double e[kMoments];
  e[0] = 1.0;
  double u = -h * wt.inv_x;
  for (int j = 1; j < kMoments; ++j) e[j] = e[j - 1] * u / j;
  for (int j = 0; j < kMoments; ++j) {
    double g = q0 * e[j];
    if (j >= 1) g += q1 * e[j - 1];
    if (j >= 2) g += q2 * e[j - 2];
    gamma[j] = g;
  }
}

double panel_value(const PanelData& pd, const double* gamma, double scale) {
  double v = 0.0;
  for (int j = 0; j < kMoments; ++j) v += gamma[j] * pd.m[j];
  return scale * v;
}

double panel_estimate(const PanelData& pd, const double* gamma, double scale) {
  double e = 0.0;
  for (int j = 0; j < kDiffMoments; ++j) {
    e += std::abs(gamma[j] * static_cast<double>(pd.d[j]));
  }
  return scale * e;
}

std::vector<double> walk_boundaries(double anchor, double a, double b,
                                    const PanelPolicy& policy, double width_cap) {
  std::vector<double> out;
  out.push_back(a);
  double t = anchor;
  while (t < b) {
    double w = std::min(panel_width_bound(t, policy), width_cap);
    double nxt = t + w;
    if (nxt <= t) {
      throw DomainError("integrate: panel width underflow in layout walk");
    }
    if (nxt > a && nxt < b) out.push_back(nxt);
    t = nxt;
  }
  out.push_back(b);
  return out;
}

// ---------------------------------------------------------------------------
// Assembly + refinement engine
// ---------------------------------------------------------------------------
namespace {

struct RefineCtx {
  const BlockEval& f;
  const Weight& wt;
  const GLRule& lo;
  const GLRule& hi;
  long long cap = 0;
  long long added = 0;
  long long evals = 0;
  bool exhausted = false;
};

// Split [c-h, c+h] in two; recurse into halves still over their budget share.
std::pair<double, double> refine_panel(RefineCtx& ctx, double c, double h,
                                       double budget, int depth) {
  double ch = 0.5 * h;
  double cs[2] = {c - ch, c + ch};
  double vv = 0.0, ee = 0.0;
  ctx.added += 2;
  for (int k = 0; k < 2; ++k) {
    PanelData pd = compute_panel(ctx.f, cs[k], ch, ctx.lo, ctx.hi);
    ctx.evals += ctx.lo.n + ctx.hi.n;
    double gamma[kMoments], scale;
    weight_coeffs(ctx.wt, cs[k], ch, gamma, &scale);
    double v = panel_value(pd, gamma, scale);
    double e = panel_estimate(pd, gamma, scale);
    if (e > 0.5 * budget) {
      bool splittable = depth < 40 && ch > 1e-14 * (1.0 + std::abs(cs[k])) &&
                        ctx.added + 2 <= ctx.cap;
      if (splittable) {
        auto [rv, re] = refine_panel(ctx, cs[k], ch, 0.5 * budget, depth + 1);
        v = rv;
        e = re;
      } else {
        ctx.exhausted = true;
      }
    }
    vv += v;
    ee += e;
  }
  return {vv, ee};
}

}  // namespace

QuadratureResult run_panels(const PanelProvider& panels, const BlockEval& f,
                            const Weight& wt, const PanelPolicy& policy,
                            double total_width, const ThreadPool* pool) {
  const GLRule& lo = gl_rule(policy.gl_order);
  const GLRule& hi = gl_rule(2 * policy.gl_order);
  const std::size_t n = panels.count();
  const std::size_t nchunks = (n + kSumChunk - 1) / kSumChunk;
  if (n == 0) return {0.0, 0.0, 0, 0};

  std::vector<double> chunk_v(nchunks), chunk_e(nchunks);
  std::vector<long long> chunk_evals(nchunks), chunk_added(nchunks);
  std::vector<char> chunk_exhausted(nchunks);

  double tol_abs = 0.0;  // 0 disables refinement (first pass measures only)
  long long refine_cap = 0;

  auto sweep = [&](bool refine) {
    auto work = [&](std::size_t ci) {
      thread_local std::vector<double> vb, eb;
      std::size_t i0 = ci * kSumChunk;
      std::size_t i1 = std::min(n, i0 + kSumChunk);
      std::size_t m = i1 - i0;
      vb.resize(m);
      eb.resize(m);
      long long evals = 0, added = 0;
      bool exhausted = false;
      for (std::size_t i = i0; i < i1; ++i) {
        double c, h;
        panels.panel(i, c, h);
        const PanelData* cp = panels.cached(i);
        PanelData fresh;
        if (cp == nullptr) {
          fresh = compute_panel(f, c, h, lo, hi);
          cp = &fresh;
          evals += lo.n + hi.n;
        }
        double gamma[kMoments], scale;
        weight_coeffs(wt, c, h, gamma, &scale);
        double v = panel_value(*cp, gamma, scale);
        double e = panel_estimate(*cp, gamma, scale);
        if (refine) {
          double budget =
              total_width > 0.0 ? tol_abs * (2.0 * h) / total_width : tol_abs;
          if (e > budget && h > 0.0) {
            RefineCtx ctx{f, wt, lo, hi, refine_cap};
            auto [rv, re] = refine_panel(ctx, c, h, budget, 0);
            v = rv;
            e = re;
            evals += ctx.evals;
            added += ctx.added;
            exhausted = exhausted || ctx.exhausted;
          }
        }
        vb[i - i0] = v;
        eb[i - i0] = e;
      }
      chunk_v[ci] = pairwise_sum(std::span<const double>(vb.data(), m));
      chunk_e[ci] = pairwise_sum(std::span<const double>(eb.data(), m));
      chunk_evals[ci] = evals;
      chunk_added[ci] = added;
      chunk_exhausted[ci] = exhausted ? 1 : 0;
    };
    if (pool != nullptr) {
      pool->parallel_for(nchunks, work);
    } else {
      for (std::size_t ci = 0; ci < nchunks; ++ci) work(ci);
    }
  };

  QuadratureResult res;
  long long total_evals = 0;
  for (int pass = 0; pass < 8; ++pass) {
    sweep(pass > 0);
    res.value = pairwise_sum(chunk_v);
    res.error_estimate = pairwise_sum(chunk_e);
    long long evals = 0, added = 0;
    bool exhausted = false;
    for (std::size_t ci = 0; ci < nchunks; ++ci) {
      evals += chunk_evals[ci];
      added += chunk_added[ci];
      exhausted = exhausted || chunk_exhausted[ci] != 0;
    }
    total_evals += evals;
    res.evaluations = total_evals;
    res.panels_used = static_cast<long long>(n) + added;
    tol_abs = policy.rel_tol * std::max(std::abs(res.value), 1e-300);
    if (res.error_estimate <= tol_abs) return res;
    if (pass > 0 && (exhausted || res.panels_used > policy.max_panels)) {
      throw ConvergenceError("integrate: max_panels exhausted before meeting rel_tol",
                             res.value, res.error_estimate);
    }
    refine_cap = std::max<long long>(
        64, (policy.max_panels - static_cast<long long>(n)) /
                static_cast<long long>(std::max<std::size_t>(1, nchunks)));
  }
  throw ConvergenceError("integrate: refinement did not meet rel_tol", res.value,
                         res.error_estimate);
}

}  // namespace quad

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------
namespace {

class BoundaryProvider final : public quad::PanelProvider {
 public:
  explicit BoundaryProvider(std::vector<double> bounds) : b_(std::move(bounds)) {}
  std::size_t count() const override { return b_.size() - 1; }
  void panel(std::size_t i, double& c, double& h) const override {
    c = 0.5 * (b_[i] + b_[i + 1]);
    h = 0.5 * (b_[i + 1] - b_[i]);
  }

 private:
  std::vector<double> b_;
};

QuadratureResult integrate_generic(const std::function<double(double)>& f,
                                   const quad::Weight& wt, double a, double b,
                                   const PanelPolicy& policy,
                                   const ThreadPool* pool) {
  policy.validate();
  if (!std::isfinite(a) || !std::isfinite(b) || !(a <= b)) {
    throw DomainError("integrate: need finite a <= b");
  }
  double cap = wt.inv_x > 0.0 ? 1.0 / (8.0 * wt.inv_x)
                              : std::numeric_limits<double>::infinity();
  double anchor = a >= 0.0 ? 0.0 : a;
  BoundaryProvider panels(quad::walk_boundaries(anchor, a, b, policy, cap));
  if (static_cast<long long>(panels.count()) > policy.max_panels) {
    throw ConvergenceError("integrate: initial layout exceeds max_panels",
                           std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::infinity());
  }
  quad::BlockEval be = [&f](std::span<const double> t, std::span<double> out) {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = f(t[i]);
  };
  return quad::run_panels(panels, be, wt, policy, b - a, pool);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const PanelPolicy& policy,
                           const ThreadPool* pool) {
  return integrate_generic(f, quad::Weight{}, a, b, policy, pool);
}

QuadratureResult integrate_weighted(const std::function<double(double)>& f,
                                    double x, double a, double b,
                                    const PanelPolicy& policy,
                                    const ThreadPool* pool) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("integrate_weighted: scale x must be positive and finite");
  }
  quad::Weight wt;
  wt.inv_x = 1.0 / x;
  return integrate_generic(f, wt, a, b, policy, pool);
}

}  // namespace zeta_ladder
