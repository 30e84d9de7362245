#ifndef HOMMB_GEOMETRY_HPP
#define HOMMB_GEOMETRY_HPP

#include <memory>
#include <vector>

#include "hommb/mapping.hpp"
#include "hommb/multiblock.hpp"

namespace hommb {

/// A multiblock domain together with one mapping per block.
struct BlockGeometry {
  MultiBlockDomain<2> m_domain;
  std::vector<std::shared_ptr<const MappingSpec<2>>> m_maps;
};

namespace detail {

// rotation by k * 90 degrees done with exact component swaps
inline RealVec<2> rot90(int k, const RealVec<2>& x) {
  switch (k & 3) {
  case 1: return RealVec<2>{-x[1], x[0]};
  case 2: return RealVec<2>{-x[0], -x[1]};
  case 3: return RealVec<2>{x[1], -x[0]};
  default: return x;
  }
}

} // namespace detail

/// Central block of the cubed disc: [0,1]^2 onto a gently bulged square of
/// half-width about s. The blend between the straight square and the
/// elliptical square keeps the corners well away from degeneracy.
class CubedDiscCenterMapping : public MappingSpec<2> {
public:
  CubedDiscCenterMapping(double s, double lambda) : m_s(s), m_lambda(lambda) {}
  RealVec<2> eval(const RealVec<2>& xi) const override {
    const double u = 2.0 * xi[0] - 1.0;
    const double v = 2.0 * xi[1] - 1.0;
    const double eu = u * std::sqrt(1.0 - 0.5 * v * v);
    const double ev = v * std::sqrt(1.0 - 0.5 * u * u);
    return RealVec<2>{m_s * ((1.0 - m_lambda) * u + m_lambda * eu),
                      m_s * ((1.0 - m_lambda) * v + m_lambda * ev)};
  }
  std::string note() const override { return "cubed disc center"; }

private:
  double m_s, m_lambda;
};

/// Sector block k (0..3 for +x, +y, -x, -y): xi0 sweeps from the central
/// block's edge out to the circle of radius R, xi1 sweeps the quarter arc.
class CubedDiscSectorMapping : public MappingSpec<2> {
public:
  CubedDiscSectorMapping(double router, double s, double lambda, int k)
    : m_center(s, lambda), m_router(router), m_k(k) {}
  RealVec<2> eval(const RealVec<2>& xi) const override {
    const RealVec<2> c = m_center.eval(RealVec<2>{1.0, xi[1]});
    const double th = (2.0 * xi[1] - 1.0) * (0.25 * pi_const);
    const RealVec<2> o{m_router * std::cos(th), m_router * std::sin(th)};
    const RealVec<2> p{(1.0 - xi[0]) * c[0] + xi[0] * o[0],
                       (1.0 - xi[0]) * c[1] + xi[0] * o[1]};
    return detail::rot90(m_k, p);
  }
  std::string note() const override { return "cubed disc sector"; }

private:
  CubedDiscCenterMapping m_center;
  double m_router;
  int m_k;
};

/// Five-block quadrilateralization of the disc of radius router: a bulged
/// central square of half-width about sinner plus four annular sectors.
/// All blocks are n by n cells; the eight seams are index-conforming.
inline BlockGeometry cubed_disc(double router, double sinner, int n) {
  if (!(router > 0.0))
    throw ValidationError("cubed_disc needs a positive outer radius");
  if (!(sinner > 0.0) || !(sinner < router))
    throw ValidationError("cubed_disc needs 0 < s_inner < R_outer");
  HOMMB_REQUIRE(n >= 8, "cubed_disc wants at least 8 cells per block axis");

  const double lambda = 0.5;
  BlockGeometry g;
  const Box<2> box(IndexVec<2>{0, 0}, IndexVec<2>{n - 1, n - 1});
  for (int b = 0; b < 5; ++b) g.m_domain.add_block(box);
  g.m_maps.push_back(std::make_shared<CubedDiscCenterMapping>(sinner, lambda));
  for (int k = 0; k < 4; ++k)
    g.m_maps.push_back(
        std::make_shared<CubedDiscSectorMapping>(router, sinner, lambda, k));

  using XF = IndexTransform<2>;
  // center +x face meets sector 1's inner face, indices aligned
  g.m_domain.connect(0, 0, 1, 1, 0, 0, XF::translation(IndexVec<2>{-n, 0}), true);
  // center +y: ghost (i, n) lands on sector 2 cell (0, n-1-i)
  {
    XF t;
    t.m_perm = {1, 0};
    t.m_sign = {1, -1};
    t.m_offset = IndexVec<2>{-n, n - 1};
    g.m_domain.connect(0, 1, 1, 2, 0, 0, t, true);
  }
  // center -x: ghost (-1, j) lands on sector 3 cell (0, n-1-j)
  {
    XF t;
    t.m_perm = {0, 1};
    t.m_sign = {-1, -1};
    t.m_offset = IndexVec<2>{-1, n - 1};
    g.m_domain.connect(0, 0, 0, 3, 0, 0, t, true);
  }
  // center -y: ghost (i, -1) lands on sector 4 cell (0, i)
  {
    XF t;
    t.m_perm = {1, 0};
    t.m_sign = {-1, 1};
    t.m_offset = IndexVec<2>{-1, 0};
    g.m_domain.connect(0, 1, 0, 4, 0, 0, t, true);
  }
  // sector-to-sector seams run counterclockwise: high-v face to low-v face
  for (int k = 0; k < 4; ++k)
    g.m_domain.connect(1 + k, 1, 1, 1 + (k + 1) % 4, 1, 0,
                       XF::translation(IndexVec<2>{0, -n}), true);
  g.m_domain.validate();
  return g;
}

} // namespace hommb

#endif
