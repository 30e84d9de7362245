#pragma once

#include <array>
#include <cmath>

namespace hommb {

/// Gauss-Legendre rule on [-1/2, 1/2] (unit cell centered at 0).
/// Nodes/weights for n points are exact for polynomials of degree 2n-1.
struct GaussRule {
  int m_n = 0;
  std::array<double, 8> m_x{};
  std::array<double, 8> m_w{};
};

inline GaussRule gauss_rule(int n) {
  GaussRule r;
  r.m_n = n;
  // Abscissae on [-1, 1], scaled by 1/2 below. Values to 20 digits.
  switch (n) {
    case 1:
      r.m_x = {0.0};
      r.m_w = {2.0};
      break;
    case 2:
      r.m_x = {-0.57735026918962576451, 0.57735026918962576451};
      r.m_w = {1.0, 1.0};
      break;
    case 3:
      r.m_x = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
      r.m_w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    case 4:
      r.m_x = {-0.86113631159405257522, -0.33998104358485626480,
               0.33998104358485626480, 0.86113631159405257522};
      r.m_w = {0.34785484513745385737, 0.65214515486254614263,
               0.65214515486254614263, 0.34785484513745385737};
      break;
    case 5:
      r.m_x = {-0.90617984593866399280, -0.53846931010568309104, 0.0,
               0.53846931010568309104, 0.90617984593866399280};
      r.m_w = {0.23692688505618908751, 0.47862867049936646804,
               0.56888888888888888889, 0.47862867049936646804,
               0.23692688505618908751};
      break;
    default: {
      // n == 6, largest rule used anywhere in this project
      r.m_n = 6;
      r.m_x = {-0.93246951420315202781, -0.66120938646626451366,
               -0.23861918608319690863, 0.23861918608319690863,
               0.66120938646626451366,  0.93246951420315202781};
      r.m_w = {0.17132449237917034504, 0.36076157304813860757,
               0.46791393457269104739, 0.46791393457269104739,
               0.36076157304813860757, 0.17132449237917034504};
      break;
    }
  }
  // rescale from [-1,1] to [-1/2,1/2]: x -> x/2, weights sum to 1
  for (int i = 0; i < r.m_n; ++i) {
    r.m_x[static_cast<size_t>(i)] *= 0.5;
    r.m_w[static_cast<size_t>(i)] *= 0.5;
  }
  return r;
}

/// Average of f over the 1D interval [c - h/2, c + h/2] with an n-point rule.
template <typename F>
inline double gauss_average_1d(F&& f, double c, double h, int n) {
  const GaussRule r = gauss_rule(n);
  double s = 0.0;
  for (int i = 0; i < r.m_n; ++i)
    s += r.m_w[static_cast<size_t>(i)] * f(c + h * r.m_x[static_cast<size_t>(i)]);
  return s;
}

} // namespace hommb
