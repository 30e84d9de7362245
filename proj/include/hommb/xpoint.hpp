#ifndef HOMMB_XPOINT_HPP
#define HOMMB_XPOINT_HPP

#include <algorithm>
#include <cmath>

#include "hommb/geometry.hpp"

namespace hommb {

/// Model X-point flux: a hyperbolic equilibrium psi0 = psix + (aR)^2 - (bZ)^2
/// whose separatrix legs |aR| = |bZ| meet at the origin, plus a piecewise
/// linear near-field stand-in that shares the legs but keeps level sets at a
/// fixed slope instead of degenerating quadratically.
struct XPointParams {
  double m_alpha = 1.0;
  double m_beta = 1.0;
  double m_D = 0.25;   // blend width: pure psi0 beyond rho = D
  double m_psix = 0.0; // flux value at the X point

  void check() const {
    if (!(m_alpha > 0.0) || !(m_beta > 0.0) || !(m_D > 0.0))
      throw ValidationError("xpoint parameters need alpha, beta, D > 0");
  }
};

/// Quintic smoothstep: 0 for rho <= D/2, 1 for rho >= D, C2 in between.
inline double xpoint_blend(double rho, double d) {
  const double s = std::clamp(2.0 * rho / d - 1.0, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

struct XPointFlux {
  double m_psi0;   // quadratic equilibrium flux
  double m_psilin; // piecewise linear near-field flux
  double m_psi;    // blended model flux
};

inline XPointFlux xpoint_flux(double r, double z, const XPointParams& p) {
  p.check();
  const double x = p.m_alpha * r;
  const double y = p.m_beta * z;
  XPointFlux f;
  const double quad = x * x - y * y;
  f.m_psi0 = p.m_psix + quad;
  f.m_psilin = p.m_D * (std::abs(x) - std::abs(y));
  const double w = xpoint_blend(std::hypot(x, y), p.m_D);
  f.m_psi = p.m_psix + ((1.0 - w) * f.m_psilin + w * quad);
  return f;
}

namespace detail {

// Canonical wedge frame: scaled coordinates (x, y) = (alpha R, beta Z) are
// rotated so the wedge bisector lies along +p and the legs along p = |q|.
// Quadrant k (0..3) has its bisector along angle k * 90 degrees in (x, y).
inline void canon_from_scaled(int k, double x, double y, double& p, double& q) {
  switch (k & 3) {
  case 1: p = y; q = -x; break;
  case 2: p = -x; q = -y; break;
  case 3: p = -y; q = x; break;
  default: p = x; q = y; break;
  }
}

inline void scaled_from_canon(int k, double p, double q, double& x, double& y) {
  switch (k & 3) {
  case 1: x = -q; y = p; break;
  case 2: x = -p; y = -q; break;
  case 3: x = q; y = -p; break;
  default: x = p; y = q; break;
  }
}

// rows of d(x,y)/d(p,q) for the rotation above
inline void canon_rot_rows(int k, double r[2][2]) {
  switch (k & 3) {
  case 1: r[0][0] = 0; r[0][1] = -1; r[1][0] = 1; r[1][1] = 0; break;
  case 2: r[0][0] = -1; r[0][1] = 0; r[1][0] = 0; r[1][1] = -1; break;
  case 3: r[0][0] = 0; r[0][1] = 1; r[1][0] = -1; r[1][1] = 0; break;
  default: r[0][0] = 1; r[0][1] = 0; r[1][0] = 0; r[1][1] = 1; break;
  }
}

// In-wedge flux pair and its derivatives. psi is the radial coordinate
// (positive inside the wedge, zero on the legs), chi the smooth transverse
// coordinate 2 q ((1-w) D + w p). With blended false the pure quadratic is
// used throughout (w identically 1).
struct CanonEval {
  double m_psi = 0.0;
  double m_chi = 0.0;
  double m_dpsi[2] = {0.0, 0.0};
  double m_dchi[2] = {0.0, 0.0};
};

inline CanonEval canon_eval(double p, double q, double d, bool blended) {
  CanonEval e;
  const double rho = std::hypot(p, q);
  const double aq = std::abs(q);
  const double sq = (q > 0.0) ? 1.0 : (q < 0.0 ? -1.0 : 0.0);
  double w = 1.0, wp = 0.0;
  if (blended) {
    if (rho <= 0.5 * d) {
      w = 0.0;
    } else if (rho < d) {
      const double s = 2.0 * rho / d - 1.0;
      w = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
      wp = (2.0 / d) * 30.0 * s * s * (1.0 - s) * (1.0 - s);
    }
  }
  const double lin = d * (p - aq);
  const double quad = p * p - q * q;
  e.m_psi = (1.0 - w) * lin + w * quad;
  e.m_chi = 2.0 * q * ((1.0 - w) * d + w * p);
  const double drp = rho > 0.0 ? p / rho : 0.0;
  const double drq = rho > 0.0 ? q / rho : 0.0;
  e.m_dpsi[0] = (1.0 - w) * d + 2.0 * w * p + wp * drp * (quad - lin);
  e.m_dpsi[1] = -(1.0 - w) * d * sq - 2.0 * w * q + wp * drq * (quad - lin);
  e.m_dchi[0] = 2.0 * q * (w + wp * drp * (p - d));
  e.m_dchi[1] = 2.0 * ((1.0 - w) * d + w * p) + 2.0 * q * wp * drq * (p - d);
  return e;
}

// psi along the wedge bisector (q = 0) at radius r >= 0, and its slope
inline double bisector_psi(double r, double d, bool blended) {
  return canon_eval(r, 0.0, d, blended).m_psi;
}
inline double bisector_dpsi(double r, double d, bool blended) {
  return canon_eval(r, 0.0, d, blended).m_dpsi[0];
}

// Damped, bracket-safeguarded Newton along a column of fixed transverse
// coordinate q: find p with psi(p, q) = psit. The in-wedge branch (psit >= 0)
// is strictly monotone; targets with psit < 0 continue the column smoothly a
// short way across the legs for ghost geometry, staying in the local
// monotone basin around the near-field chevron.
inline double solve_column(double psit, double q, double d, double pscale,
                           bool blended) {
  const double scale = std::max({d * d, pscale * pscale, std::abs(psit)});
  const double tol = 1e-13 * scale;

  // closed forms: chevron (exact where w = 0) and hyperbola (exact w = 1)
  double p = psit / d + std::abs(q);
  const double pfsq = q * q + psit;
  if (psit >= 0.0 && pfsq > 0.0) {
    const double pf = std::sqrt(pfsq);
    if (std::hypot(pf, q) >= d) p = pf;
  }
  if (!blended) {
    if (pfsq < 0.0)
      throw NumericalContractError("xpoint column leaves the quadratic range");
    return std::sqrt(pfsq);
  }

  double lo = -1e300, hi = 1e300; // sign bracket, filled in as we go
  CanonEval e = canon_eval(p, q, d, true);
  double f = e.m_psi - psit;
  for (int iter = 0; iter < 60; ++iter) {
    if (std::abs(f) <= tol) return p;
    if (f < 0.0)
      lo = std::max(lo, p);
    else
      hi = std::min(hi, p);
    double pn;
    if (e.m_dpsi[0] > 1e-30 * scale)
      pn = p - f / e.m_dpsi[0];
    else
      pn = p + (f < 0.0 ? 0.05 : -0.05) * d;
    if (lo > -1e300 && hi < 1e300 && !(pn > lo && pn < hi))
      pn = 0.5 * (lo + hi);
    // cut the step until the residual actually drops
    for (int cut = 0; cut < 15; ++cut) {
      const CanonEval eTry = canon_eval(pn, q, d, true);
      const double fTry = eTry.m_psi - psit;
      if (std::abs(fTry) < std::abs(f) || cut == 14) {
        p = pn;
        e = eTry;
        f = fTry;
        break;
      }
      pn = 0.5 * (p + pn);
    }
  }
  throw NumericalContractError("xpoint column inversion did not converge");
}

// Monotone 1D Newton with a bisection bracket: find t >= 0 on the ray with
// direction (cx, cy) in canonical coordinates where psi equals psit >= 0.
inline double solve_ray(double psit, double cx, double cy, double d,
                        double pscale, bool blended) {
  if (psit == 0.0) return 0.0;
  const double scale = std::max({d * d, pscale * pscale, psit});
  const double tol = 1e-12 * scale;
  const double c1 = cx - std::abs(cy); // near-field slope factor
  const double c2 = cx * cx - cy * cy; // far-field curvature factor
  HOMMB_REQUIRE(c1 > 0.0 && c2 > 0.0, "ray leaves the wedge interior");

  double t = std::sqrt(psit / c2);
  if (blended) t = std::min(t, psit / (d * c1));
  double lo = 0.0;
  double hi = std::max(2.0 * t, d);
  for (int k = 0; k < 80; ++k) {
    if (canon_eval(hi * cx, hi * cy, d, blended).m_psi >= psit) break;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 50; ++iter) {
    const CanonEval e = canon_eval(t * cx, t * cy, d, blended);
    const double f = e.m_psi - psit;
    if (std::abs(f) <= tol) return t;
    if (f < 0.0)
      lo = t;
    else
      hi = t;
    const double df = e.m_dpsi[0] * cx + e.m_dpsi[1] * cy;
    double tn = (df != 0.0) ? t - f / df : 0.5 * (lo + hi);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    t = tn;
  }
  throw NumericalContractError("xpoint ray inversion did not converge");
}

} // namespace detail

/// One blended wedge block of the X-point neighborhood. xi0 walks the Psi
/// levels (spaced uniformly in bisector radius, so the near field is a
/// uniform rectilinear grid); xi1 walks straight cuts parallel to the
/// bisector at transverse offset q. The xi0 = 0 edge lies on the separatrix
/// leg pair; negative xi0 continues across the legs for ghost geometry.
class XPointWedgeMapping : public MappingSpec<2> {
public:
  XPointWedgeMapping(int quadrant, const XPointParams& p, double pmax,
                     double qmax)
    : m_p(p), m_quadrant(quadrant), m_pmax(pmax), m_qmax(qmax) {
    p.check();
    HOMMB_REQUIRE(quadrant >= 0 && quadrant < 4, "quadrant must be 0..3");
    if (!(pmax > 0.0) || !(qmax > 0.0))
      throw ValidationError("xpoint wedge needs positive extents");
  }

  RealVec<2> eval(const RealVec<2>& xi) const override {
    double p, q;
    solve_targets(xi, p, q);
    double x, y;
    detail::scaled_from_canon(m_quadrant, p, q, x, y);
    return RealVec<2>{x / m_p.m_alpha, y / m_p.m_beta};
  }

  bool has_gradient() const override { return true; }
  SmallMat<2> gradient(const RealVec<2>& xi) const override {
    double p, q;
    solve_targets(xi, p, q);
    const detail::CanonEval e = detail::canon_eval(p, q, m_p.m_D, true);
    HOMMB_REQUIRE(std::abs(e.m_dpsi[0]) > 0.0, "degenerate wedge column");
    const double r = xi[0] * m_pmax;
    const double dpsit0 =
        detail::bisector_dpsi(std::abs(r), m_p.m_D, true) * m_pmax;
    const double dq1 = 2.0 * m_qmax;
    const double dp0 = dpsit0 / e.m_dpsi[0];
    const double dp1 = -e.m_dpsi[1] * dq1 / e.m_dpsi[0];
    double rot[2][2];
    detail::canon_rot_rows(m_quadrant, rot);
    SmallMat<2> g;
    g[0] = RealVec<2>{rot[0][0] * dp0 / m_p.m_alpha,
                      (rot[0][0] * dp1 + rot[0][1] * dq1) / m_p.m_alpha};
    g[1] = RealVec<2>{rot[1][0] * dp0 / m_p.m_beta,
                      (rot[1][0] * dp1 + rot[1][1] * dq1) / m_p.m_beta};
    return g;
  }

  std::string note() const override { return "xpoint blended wedge"; }

private:
  void solve_targets(const RealVec<2>& xi, double& p, double& q) const {
    const double r = xi[0] * m_pmax;
    const double sr = (r >= 0.0) ? 1.0 : -1.0;
    const double psit =
        sr * detail::bisector_psi(std::abs(r), m_p.m_D, true);
    q = (2.0 * xi[1] - 1.0) * m_qmax;
    p = detail::solve_column(psit, q, m_p.m_D, m_pmax, true);
  }

  XPointParams m_p;
  int m_quadrant;
  double m_pmax, m_qmax;
};

/// Extents of a single-wedge block for xpoint_mapping: levels cover the flux
/// band [psix, psix + psimax] (in the wedge's own radial sign) and rays fan
/// out to +-taumax around the bisector; taumax < pi/4 keeps the rays clear
/// of the legs where levels stop crossing them.
struct XPointExtents {
  double m_psimax = 1.0;
  double m_taumax = 0.7;
};

/// Ray-parametrized wedge: xi0 picks the Psi level (uniform in bisector
/// radius), xi1 picks a ray from the X point; the grid point is the
/// ray-level intersection. With blended false the grid is aligned with the
/// pure quadratic flux psi0 all the way in, and the fan of rays pinches the
/// innermost cells: their Jacobian sinks like 1/N. The blended variant is
/// rectilinear near the X point.
class XPointRayMapping : public MappingSpec<2> {
public:
  XPointRayMapping(int quadrant, const XPointParams& p,
                   const XPointExtents& ext, bool blended)
    : m_p(p), m_quadrant(quadrant), m_taumax(ext.m_taumax), m_blended(blended) {
    p.check();
    HOMMB_REQUIRE(quadrant >= 0 && quadrant < 4, "quadrant must be 0..3");
    if (!(ext.m_psimax > 0.0))
      throw ValidationError("xpoint extents need psimax > 0");
    if (!(ext.m_taumax > 0.0) || !(ext.m_taumax < 0.25 * pi_const))
      throw ValidationError("xpoint extents need 0 < taumax < pi/4");
    // bisector radius of the outermost level
    m_pmax = detail::solve_ray(ext.m_psimax, 1.0, 0.0, p.m_D, 1.0, blended);
  }

  RealVec<2> eval(const RealVec<2>& xi) const override {
    const double t = ray_radius(xi);
    const double tau = (2.0 * xi[1] - 1.0) * m_taumax;
    const double p = t * std::cos(tau);
    const double q = t * std::sin(tau);
    double x, y;
    detail::scaled_from_canon(m_quadrant, p, q, x, y);
    return RealVec<2>{x / m_p.m_alpha, y / m_p.m_beta};
  }

  bool has_gradient() const override { return true; }
  SmallMat<2> gradient(const RealVec<2>& xi) const override {
    const double t = ray_radius(xi);
    const double tau = (2.0 * xi[1] - 1.0) * m_taumax;
    const double cx = std::cos(tau), cy = std::sin(tau);
    const detail::CanonEval e =
        detail::canon_eval(t * cx, t * cy, m_p.m_D, m_blended);
    const double denom = e.m_dpsi[0] * cx + e.m_dpsi[1] * cy;
    if (std::abs(denom) < 1e-14 * std::max(m_p.m_D, m_pmax))
      return fd_gradient2(*this, xi, 1e-6); // reflected ghost zone fallback
    const double r = xi[0] * m_pmax;
    const double dpsit0 =
        detail::bisector_dpsi(std::abs(r), m_p.m_D, m_blended) * m_pmax;
    const double dtau1 = 2.0 * m_taumax;
    const double dperp = (-e.m_dpsi[0] * cy + e.m_dpsi[1] * cx) * t * dtau1;
    const double dt0 = dpsit0 / denom;
    const double dt1 = -dperp / denom;
    // canonical rows
    const double dpdxi0 = dt0 * cx;
    const double dqdxi0 = dt0 * cy;
    const double dpdxi1 = dt1 * cx - t * cy * dtau1;
    const double dqdxi1 = dt1 * cy + t * cx * dtau1;
    double rot[2][2];
    detail::canon_rot_rows(m_quadrant, rot);
    SmallMat<2> g;
    g[0] = RealVec<2>{(rot[0][0] * dpdxi0 + rot[0][1] * dqdxi0) / m_p.m_alpha,
                      (rot[0][0] * dpdxi1 + rot[0][1] * dqdxi1) / m_p.m_alpha};
    g[1] = RealVec<2>{(rot[1][0] * dpdxi0 + rot[1][1] * dqdxi0) / m_p.m_beta,
                      (rot[1][0] * dpdxi1 + rot[1][1] * dqdxi1) / m_p.m_beta};
    return g;
  }

  std::string note() const override {
    return m_blended ? "xpoint ray wedge, blended"
                     : "xpoint ray wedge, flux aligned";
  }

  // bisector radius of the outermost level
  double pmax() const { return m_pmax; }

private:
  // signed ray radius; negative levels reflect straight through the X point
  double ray_radius(const RealVec<2>& xi) const {
    const double r = xi[0] * m_pmax;
    const double sr = (r >= 0.0) ? 1.0 : -1.0;
    const double psit = detail::bisector_psi(std::abs(r), m_p.m_D, m_blended);
    const double tau = (2.0 * xi[1] - 1.0) * m_taumax;
    const double t = detail::solve_ray(psit, std::cos(tau), std::sin(tau),
                                       m_p.m_D, m_pmax, m_blended);
    return sr * t;
  }

  XPointParams m_p;
  int m_quadrant;
  double m_taumax;
  bool m_blended;
  double m_pmax = 0.0;
};

inline std::shared_ptr<const MappingSpec<2>> xpoint_mapping(
    int quadrant, const XPointParams& p, const XPointExtents& ext,
    bool blended = true) {
  return std::make_shared<XPointRayMapping>(quadrant, p, ext, blended);
}

/// Four blended wedges tiling a plus-shaped neighborhood of the X point,
/// each bounded by the two separatrix legs, an outer flux level, and two
/// straight transverse cuts. Each wedge's low-xi0 face runs along two legs
/// and is shared with the two adjacent wedges, so it is marked BlockMulti
/// and filled geometrically; everything else is a physical boundary.
inline BlockGeometry xpoint_domain(const XPointParams& p, double pmax,
                                   double qmax, int n) {
  p.check();
  if (!(pmax > 0.0) || !(qmax > 0.0))
    throw ValidationError("xpoint domain needs positive extents");
  if (n < 8 || n % 2 != 0)
    throw ValidationError("xpoint domain wants an even block size >= 8");
  BlockGeometry g;
  const Box<2> box(IndexVec<2>{0, 0}, IndexVec<2>{n - 1, n - 1});
  for (int k = 0; k < 4; ++k) {
    g.m_domain.add_block(box);
    g.m_maps.push_back(std::make_shared<XPointWedgeMapping>(k, p, pmax, qmax));
  }
  for (int k = 0; k < 4; ++k) {
    FaceConnection<2>& legs = g.m_domain.face(k, 0, 0);
    legs.m_kind = FaceKind::BlockMulti;
  }
  g.m_domain.validate();
  return g;
}

} // namespace hommb

#endif
