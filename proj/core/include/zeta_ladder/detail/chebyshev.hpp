#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "zeta_ladder/parallel.hpp"

namespace zeta_ladder::detail {

// Chebyshev interpolant on [a, b] from function values at the n first-kind
// nodes; evaluation by Clenshaw recurrence.
class Chebyshev {
 public:
  Chebyshev() = default;

  static Chebyshev fit(double a, double b, int n,
                       const std::function<double(double)>& f,
                       const ThreadPool* pool = nullptr) {
    Chebyshev c;
    c.a_ = a;
    c.b_ = b;
    std::vector<double> vals(n);
    auto node = [&](int j) {
      double x = std::cos(std::numbers::pi * (j + 0.5) / n);
      return a + 0.5 * (b - a) * (x + 1.0);
    };
    if (pool != nullptr) {
      pool->parallel_for(n, [&](std::size_t j) { vals[j] = f(node(static_cast<int>(j))); });
    } else {
      for (int j = 0; j < n; ++j) vals[j] = f(node(j));
    }
    c.coef_.resize(n);
    for (int m = 0; m < n; ++m) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        acc += vals[j] * std::cos(std::numbers::pi * m * (j + 0.5) / n);
      }
      c.coef_[m] = 2.0 * acc / n;
    }
    c.coef_[0] *= 0.5;
    return c;
  }

  double operator()(double x) const {
    double u = 2.0 * (x - a_) / (b_ - a_) - 1.0;
    if (u < -1.0) u = -1.0;
    if (u > 1.0) u = 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t m = coef_.size(); m-- > 1;) {
      double b0 = 2.0 * u * b1 - b2 + coef_[m];
      b2 = b1;
      b1 = b0;
    }
    return u * b1 - b2 + coef_[0];
  }

  double lo() const { return a_; }
  double hi() const { return b_; }
  int size() const { return static_cast<int>(coef_.size()); }
  bool empty() const { return coef_.empty(); }

 private:
  double a_ = 0.0, b_ = 1.0;
  std::vector<double> coef_;
};

}  // namespace zeta_ladder::detail
