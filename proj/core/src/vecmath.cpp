#include "zeta_ladder/detail/vecmath.hpp"

#include <cmath>

namespace zeta_ladder::detail {

namespace {
constexpr double kTwoOverPi = 0.6366197723675814;
// pi/2 = P1 + P2 + P3, each piece carrying 27 significant bits
constexpr double kP1 = 1.570796325802803;       // 0x1.921fb54p+0
constexpr double kP2 = 9.920935739593517e-10;   // 0x1.10b461p-30
constexpr double kP3 = 5.721188726109832e-18;   // 0x1.a62633145c06ep-58

inline double poly_sin(double r, double r2) {
  // r - r^3/3! + ... - r^15/15!
  double p = -7.647163731819816e-13;            // -1/15!
  p = p * r2 + 1.6059043836821613e-10;          //  1/13!
  p = p * r2 + -2.505210838544172e-08;          // -1/11!
  p = p * r2 + 2.7557319223985893e-06;          //  1/9!
  p = p * r2 + -0.0001984126984126984;          // -1/7!
  p = p * r2 + 0.008333333333333333;            //  1/5!
  p = p * r2 + -0.16666666666666666;            // -1/3!
  return r + r * (r2 * p);
}

inline double poly_cos(double r2) {
  // 1 - r^2/2! + ... + r^16/16!
  double p = 4.779477332387385e-14;             //  1/16!
  p = p * r2 + -1.1470745597729725e-11;         // -1/14!
  p = p * r2 + 2.08767569878681e-09;            //  1/12!
  p = p * r2 + -2.7557319223985888e-07;         // -1/10!
  p = p * r2 + 2.48015873015873e-05;            //  1/8!
  p = p * r2 + -0.001388888888888889;           // -1/6!
  p = p * r2 + 0.041666666666666664;            //  1/4!
  p = p * r2 + -0.5;                            // -1/2!
  return 1.0 + r2 * p;
}
}  // namespace

void block_sincos(const double* x, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double xi = x[i];
    double fn = std::nearbyint(xi * kTwoOverPi);
    double r = xi - fn * kP1;
    r -= fn * kP2;
    r -= fn * kP3;
    double r2 = r * r;
    double sr = poly_sin(r, r2);
    double cr = poly_cos(r2);
    // quadrant q = fn mod 4, decoded arithmetically to stay branch-free
    double q = fn - 4.0 * std::floor(fn * 0.25);
    double h = std::floor(q * 0.5);        // 0,0,1,1
    double b1 = q - 2.0 * h;               // q & 1
    double h1 = std::floor((q + 1.0) * 0.5);
    double sgn_c = 1.0 - 2.0 * (h1 - 2.0 * std::floor(h1 * 0.5));
    double sgn_s = 1.0 - 2.0 * h;
    c[i] = sgn_c * (cr + b1 * (sr - cr));
    s[i] = sgn_s * (sr + b1 * (cr - sr));
  }
}

}  // namespace zeta_ladder::detail
