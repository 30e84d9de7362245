#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hommb/xpoint.hpp"

using namespace hommb;

namespace {

// max over cells of |sum_d (F_d(i+e_d) - F_d(i)) / h_d| for a constant
// advection field c dotted into the face metric rows
double freestream_residual(const MetricCache<2>& mc, const RealVec<2>& c) {
  double worst = 0.0;
  for (BoxIter<2> it(mc.m_box); it.ok(); ++it) {
    double div = 0.0;
    for (int d = 0; d < 2; ++d) {
      IndexVec<2> hi = *it;
      hi[d] += 1;
      const GridArray<2>& N = mc.m_N[static_cast<size_t>(d)];
      const double fLo = N(*it, 2 * d + 0) * c[0] + N(*it, 2 * d + 1) * c[1];
      const double fHi = N(hi, 2 * d + 0) * c[0] + N(hi, 2 * d + 1) * c[1];
      div += (fHi - fLo) / mc.m_h[static_cast<size_t>(d)];
    }
    worst = std::max(worst, std::abs(div));
  }
  return worst;
}

double min_jacobian(const MetricCache<2>& mc) {
  double mn = 1e300;
  for (BoxIter<2> it(mc.m_box); it.ok(); ++it)
    mn = std::min(mn, mc.m_Jpoint(*it, 0));
  return mn;
}

} // namespace

TEST_CASE("xpoint flux values and blend zones", "[xpoint]") {
  XPointParams p;
  p.m_alpha = 1.0;
  p.m_beta = 1.0;
  p.m_D = 0.25;
  p.m_psix = 0.75;

  // at the X point both model fields sit exactly at psix
  const XPointFlux at0 = xpoint_flux(0.0, 0.0, p);
  REQUIRE(at0.m_psi0 == 0.75);
  REQUIRE(at0.m_psilin == 0.0);
  REQUIRE(at0.m_psi == 0.75);

  // on the legs |x| = |y| every variant collapses to psix, exactly
  for (double s : {0.05, 0.1, 0.2, 0.5, 1.3}) {
    for (int sx : {-1, 1}) {
      for (int sy : {-1, 1}) {
        const XPointFlux f = xpoint_flux(sx * s, sy * s, p);
        REQUIRE(f.m_psi0 == 0.75);
        REQUIRE(f.m_psilin == 0.0);
        REQUIRE(f.m_psi == 0.75);
      }
    }
  }

  // far field is the pure quadratic: psi(1, 0) = psix + 1
  REQUIRE(xpoint_flux(1.0, 0.0, p).m_psi == Catch::Approx(1.75).epsilon(1e-15));

  // blend window: identically 0 inside rho <= D/2, identically 1 outside
  // rho >= D, strictly increasing between
  REQUIRE(xpoint_blend(0.0, 0.25) == 0.0);
  REQUIRE(xpoint_blend(0.124999, 0.25) == 0.0);
  REQUIRE(xpoint_blend(0.25, 0.25) == 1.0);
  REQUIRE(xpoint_blend(0.77, 0.25) == 1.0);
  double prev = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double rho = 0.125 + 0.125 * k / 40.0;
    const double w = xpoint_blend(rho, 0.25);
    REQUIRE(w >= prev);
    prev = w;
  }
  REQUIRE(prev == 1.0);

  // inside the linear zone psi is exactly the linear model
  const XPointFlux nearField = xpoint_flux(0.06, -0.03, p);
  REQUIRE(nearField.m_psi ==
          Catch::Approx(0.75 + 0.25 * (0.06 - 0.03)).margin(1e-16));

  XPointParams bad = p;
  bad.m_D = 0.0;
  REQUIRE_THROWS_AS(xpoint_flux(0.1, 0.1, bad), ValidationError);
  bad = p;
  bad.m_alpha = -2.0;
  REQUIRE_THROWS_AS(xpoint_flux(0.1, 0.1, bad), ValidationError);
}

TEST_CASE("xpoint canonical field derivatives", "[xpoint]") {
  // scalar finite differences on the closed-form wedge fields, sampled
  // across near zone, blend annulus and far zone
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> up(-0.6, 1.2);
  std::uniform_real_distribution<double> uq(-1.0, 1.0);
  const double d = 0.25;
  const double delta = 1e-6;
  int used = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const double p = up(rng);
    const double q = uq(rng);
    if (std::abs(q) < 1e-3) continue; // transverse kink line
    for (bool blended : {true, false}) {
      const detail::CanonEval e = detail::canon_eval(p, q, d, blended);
      const detail::CanonEval pp = detail::canon_eval(p + delta, q, d, blended);
      const detail::CanonEval pm = detail::canon_eval(p - delta, q, d, blended);
      const detail::CanonEval qp = detail::canon_eval(p, q + delta, d, blended);
      const detail::CanonEval qm = detail::canon_eval(p, q - delta, d, blended);
      REQUIRE(e.m_dpsi[0] ==
              Catch::Approx((pp.m_psi - pm.m_psi) / (2 * delta)).margin(1e-6));
      REQUIRE(e.m_dpsi[1] ==
              Catch::Approx((qp.m_psi - qm.m_psi) / (2 * delta)).margin(1e-6));
      REQUIRE(e.m_dchi[0] ==
              Catch::Approx((pp.m_chi - pm.m_chi) / (2 * delta)).margin(1e-6));
      REQUIRE(e.m_dchi[1] ==
              Catch::Approx((qp.m_chi - qm.m_chi) / (2 * delta)).margin(1e-6));
    }
    ++used;
  }
  REQUIRE(used > 300);
}

TEST_CASE("xpoint wedge mapping hits its flux targets", "[xpoint]") {
  XPointParams p;
  p.m_alpha = 1.2;
  p.m_beta = 0.8;
  p.m_D = 0.3;
  p.m_psix = -0.25;
  const double pmax = 1.1;
  const double qmax = 0.9;

  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> u0(-0.1, 1.0);
  std::uniform_real_distribution<double> u1(0.0, 1.0);

  for (int quad = 0; quad < 4; ++quad) {
    const XPointWedgeMapping map(quad, p, pmax, qmax);
    const double sigma = (quad % 2 == 0) ? 1.0 : -1.0;
    for (int trial = 0; trial < 60; ++trial) {
      const RealVec<2> xi{u0(rng), u1(rng)};
      const RealVec<2> X = map.eval(xi);
      const double r = xi[0] * pmax;
      const double sr = (r >= 0.0) ? 1.0 : -1.0;
      const double want =
          sr * detail::bisector_psi(std::abs(r), p.m_D, true);
      const double scale = std::max(1.0, std::abs(want));
      // the canonical field at the image must reproduce the requested level
      // (holds across the legs too, where the signed continuation lives)
      double pc, qc;
      detail::canon_from_scaled(quad, p.m_alpha * X[0], p.m_beta * X[1], pc,
                                qc);
      REQUIRE(detail::canon_eval(pc, qc, p.m_D, true).m_psi ==
              Catch::Approx(want).margin(1e-11 * scale));
      // in the wedge proper this is the physical flux up to the quadrant sign
      if (xi[0] >= 0.0) {
        const XPointFlux f = xpoint_flux(X[0], X[1], p);
        REQUIRE(sigma * (f.m_psi - p.m_psix) ==
                Catch::Approx(want).margin(1e-11 * scale));
      }
    }
  }
}

TEST_CASE("xpoint wedge grid lines are flux level sets", "[xpoint]") {
  XPointParams p;
  p.m_D = 0.25;
  const double pmax = 1.0, qmax = 0.8;
  const XPointWedgeMapping map(0, p, pmax, qmax);

  const int n = 24;
  for (int i = 0; i <= n; ++i) {
    const double xi0 = double(i) / n;
    double ref = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double xi1 = double(j) / n;
      const RealVec<2> X = map.eval(RealVec<2>{xi0, xi1});
      const double psi = xpoint_flux(X[0], X[1], p).m_psi;
      if (j == 0)
        ref = psi;
      else
        REQUIRE(psi == Catch::Approx(ref).margin(1e-10));
    }
  }
}

TEST_CASE("xpoint wedge near field is rectilinear", "[xpoint]") {
  XPointParams p;
  p.m_D = 0.3;
  const double pmax = 1.0, qmax = 0.8;

  for (int quad = 0; quad < 4; ++quad) {
    const XPointWedgeMapping map(quad, p, pmax, qmax);
    const int n = 32;
    // walk cells; where every corner sits at rho <= D/2 the cell must be a
    // parallelogram traced by straight level and ray segments, which we
    // check via midpoint-on-chord
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        RealVec<2> c[4];
        bool nearZone = true;
        int idx = 0;
        for (int di = 0; di <= 1; ++di) {
          for (int dj = 0; dj <= 1; ++dj) {
            const RealVec<2> xi{double(i + di) / n, double(j + dj) / n};
            c[idx] = map.eval(xi);
            const double rho = std::hypot(p.m_alpha * c[idx][0],
                                          p.m_beta * c[idx][1]);
            nearZone = nearZone && (rho <= 0.5 * p.m_D + 1e-12);
            ++idx;
          }
        }
        if (!nearZone) continue;
        for (int e = 0; e < 2; ++e) {
          // edges (c0,c1) and (c0,c2): midpoints must lie on the chords
          const RealVec<2>& a = c[0];
          const RealVec<2>& b = e == 0 ? c[1] : c[2];
          RealVec<2> ximid{(i + 0.5 * (e == 1)) / double(n),
                           (j + 0.5 * (e == 0)) / double(n)};
          const RealVec<2> m = map.eval(ximid);
          REQUIRE(m[0] == Catch::Approx(0.5 * (a[0] + b[0])).margin(1e-10));
          REQUIRE(m[1] == Catch::Approx(0.5 * (a[1] + b[1])).margin(1e-10));
        }
      }
    }
  }
}

TEST_CASE("xpoint wedge far field follows the quadratic flux", "[xpoint]") {
  XPointParams p;
  p.m_D = 0.2;
  const XPointWedgeMapping map(2, p, 1.0, 0.7);
  const int n = 20;
  for (int i = 0; i <= n; ++i) {
    const double xi0 = double(i) / n;
    double ref = 0.0;
    bool have = false;
    for (int j = 0; j <= n; ++j) {
      const RealVec<2> X = map.eval(RealVec<2>{xi0, double(j) / n});
      const double rho = std::hypot(p.m_alpha * X[0], p.m_beta * X[1]);
      if (rho < p.m_D) continue; // blend zone, psi0 not constant there
      const double psi0 = xpoint_flux(X[0], X[1], p).m_psi0;
      if (!have) {
        ref = psi0;
        have = true;
      } else {
        REQUIRE(psi0 == Catch::Approx(ref).margin(1e-10));
      }
    }
  }
}

namespace {

// true when the centered 6th order stencil around xi stays inside one
// smoothness zone of the blend: the map is only C2 where the image crosses
// rho = D/2 or rho = D, where the level schedule g(xi0 pmax) crosses the
// same shells, and it is kinked across the wedge centerline
bool fd_stencil_smooth(const MappingSpec<2>& map, const RealVec<2>& xi,
                       double delta, double alpha, double beta, double d,
                       double pmax) {
  if (std::abs(xi[1] - 0.5) < 7.0 * delta) return false;
  const double pad = 1e-3 * d;
  const double rLo = (xi[0] - 3.5 * delta) * pmax;
  const double rHi = (xi[0] + 3.5 * delta) * pmax;
  if (rLo - pad < 0.5 * d && rHi + pad > 0.5 * d) return false;
  if (rLo - pad < d && rHi + pad > d) return false;
  double lo = 1e300, hi = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (int k = -3; k <= 3; ++k) {
      RealVec<2> probe = xi;
      probe[c] += k * delta;
      const RealVec<2> X = map.eval(probe);
      const double rho = std::hypot(alpha * X[0], beta * X[1]);
      lo = std::min(lo, rho);
      hi = std::max(hi, rho);
    }
  }
  if (lo - pad < 0.5 * d && hi + pad > 0.5 * d) return false;
  if (lo - pad < d && hi + pad > d) return false;
  return true;
}

} // namespace

TEST_CASE("xpoint wedge analytic gradient matches differences", "[xpoint]") {
  XPointParams p;
  p.m_alpha = 0.9;
  p.m_beta = 1.3;
  p.m_D = 0.3;
  const XPointWedgeMapping map(1, p, 1.0, 0.8);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u0(0.02, 0.98);
  // small steps: the blend polynomial's high derivatives grow like (2/D)^k,
  // so wider stencils pick up visible truncation error
  const double delta = 1e-3;
  int used = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const RealVec<2> xi{u0(rng), u0(rng)};
    if (!fd_stencil_smooth(map, xi, delta, p.m_alpha, p.m_beta, p.m_D, 1.0))
      continue;
    const SmallMat<2> ga = map.gradient(xi);
    const SmallMat<2> gn = fd_gradient6(map, xi, delta);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        REQUIRE(ga[static_cast<size_t>(r)][c] ==
                Catch::Approx(gn[static_cast<size_t>(r)][c]).margin(1e-8));
    ++used;
  }
  REQUIRE(used >= 40);
}

TEST_CASE("xpoint domain wedges connect along the separatrix legs",
          "[xpoint]") {
  XPointParams p;
  p.m_D = 0.25;
  BlockGeometry g = xpoint_domain(p, 1.0, 0.8, 16);
  REQUIRE(g.m_domain.nblocks() == 4);
  REQUIRE(g.m_maps.size() == 4);

  for (BlockId b = 0; b < 4; ++b) {
    for (int axis = 0; axis < 2; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const FaceKind kind = g.m_domain.face(b, axis, side).m_kind;
        if (axis == 0 && side == 0)
          REQUIRE(kind == FaceKind::BlockMulti);
        else
          REQUIRE(kind == FaceKind::PhysicalBoundary);
      }
    }
  }

  // geometric seam: the low-xi0 edge of wedge q splits at the bisector; the
  // upper half (xi1 > 1/2) lies on the leg shared with wedge q+1, the lower
  // half on the leg shared with wedge q-1, with xi1 reversed either way
  for (int qa = 0; qa < 4; ++qa) {
    const MappingSpec<2>& A = *g.m_maps[static_cast<size_t>(qa)];
    const MappingSpec<2>& up = *g.m_maps[static_cast<size_t>((qa + 1) % 4)];
    const MappingSpec<2>& dn = *g.m_maps[static_cast<size_t>((qa + 3) % 4)];
    for (double t : {0.55, 0.7, 0.85, 0.97}) {
      const RealVec<2> Xa = A.eval(RealVec<2>{0.0, t});
      const RealVec<2> Xb = up.eval(RealVec<2>{0.0, 1.0 - t});
      REQUIRE(Xa[0] == Catch::Approx(Xb[0]).margin(1e-11));
      REQUIRE(Xa[1] == Catch::Approx(Xb[1]).margin(1e-11));
    }
    for (double t : {0.03, 0.2, 0.4, 0.45}) {
      const RealVec<2> Xa = A.eval(RealVec<2>{0.0, t});
      const RealVec<2> Xb = dn.eval(RealVec<2>{0.0, 1.0 - t});
      REQUIRE(Xa[0] == Catch::Approx(Xb[0]).margin(1e-11));
      REQUIRE(Xa[1] == Catch::Approx(Xb[1]).margin(1e-11));
    }
  }

  REQUIRE_THROWS_AS(xpoint_domain(p, 1.0, 0.8, 15), ValidationError);
  REQUIRE_THROWS_AS(xpoint_domain(p, -1.0, 0.8, 16), ValidationError);
}

TEST_CASE("xpoint blended wedges keep their jacobian bounded", "[xpoint]") {
  XPointParams p;
  p.m_D = 0.25;
  double minJ16 = 0.0;
  for (int n : {16, 32, 64}) {
    BlockGeometry g = xpoint_domain(p, 1.0, 0.8, n);
    double mn = 1e300;
    for (BlockId b = 0; b < 4; ++b) {
      const MetricCache<2> mc =
          compute_metrics(*g.m_maps[static_cast<size_t>(b)],
                          g.m_domain.block_box(b), n);
      mn = std::min(mn, min_jacobian(mc));
    }
    REQUIRE(mn > 0.0);
    if (n == 16) minJ16 = mn;
    // refining must not collapse cells: the sampled minimum settles toward
    // the continuum floor instead of decaying with n
    REQUIRE(mn >= 0.65 * minJ16);
  }
}

TEST_CASE("xpoint freestream on the blended wedges", "[xpoint]") {
  XPointParams p;
  p.m_alpha = 1.1;
  p.m_beta = 0.9;
  p.m_D = 0.25;
  for (int n : {16, 32}) {
    BlockGeometry g = xpoint_domain(p, 1.0, 0.8, n);
    for (BlockId b = 0; b < 4; ++b) {
      const MetricCache<2> mc =
          compute_metrics(*g.m_maps[static_cast<size_t>(b)],
                          g.m_domain.block_box(b), n);
      REQUIRE(freestream_residual(mc, RealVec<2>{0.6, -1.4}) <= 1e-12);
    }
  }
}

TEST_CASE("xpoint ray mapping inverts its level targets", "[xpoint]") {
  XPointParams p;
  p.m_alpha = 1.0;
  p.m_beta = 1.0;
  p.m_D = 0.25;
  p.m_psix = 0.4;
  XPointExtents ext;
  ext.m_psimax = 0.9;
  ext.m_taumax = 0.6;

  for (bool blended : {true, false}) {
    for (int quad = 0; quad < 4; ++quad) {
      auto map = xpoint_mapping(quad, p, ext, blended);
      const double sigma = (quad % 2 == 0) ? 1.0 : -1.0;
      // outermost level must land exactly on psimax
      const RealVec<2> Xout = map->eval(RealVec<2>{1.0, 0.5});
      const XPointFlux fOut = xpoint_flux(Xout[0], Xout[1], p);
      const double psiOut =
          blended ? fOut.m_psi : fOut.m_psi0;
      REQUIRE(sigma * (psiOut - p.m_psix) ==
              Catch::Approx(ext.m_psimax).margin(1e-10));

      // levels are constant along grid rows
      const int n = 12;
      for (int i = 1; i <= n; ++i) {
        double ref = 0.0;
        for (int j = 0; j <= n; ++j) {
          const RealVec<2> X =
              map->eval(RealVec<2>{double(i) / n, double(j) / n});
          const XPointFlux f = xpoint_flux(X[0], X[1], p);
          const double psi = blended ? f.m_psi : f.m_psi0;
          if (j == 0)
            ref = psi;
          else
            REQUIRE(psi == Catch::Approx(ref).margin(1e-10));
        }
      }
    }
  }

  XPointExtents bad = ext;
  bad.m_taumax = 0.8; // >= pi/4
  REQUIRE_THROWS_AS(xpoint_mapping(0, p, bad, true), ValidationError);
  bad = ext;
  bad.m_psimax = 0.0;
  REQUIRE_THROWS_AS(xpoint_mapping(0, p, bad, true), ValidationError);
}

TEST_CASE("xpoint ray mapping gradients", "[xpoint]") {
  XPointParams p;
  p.m_alpha = 1.3;
  p.m_beta = 0.7;
  p.m_D = 0.3;
  XPointExtents ext;
  ext.m_psimax = 1.2;
  ext.m_taumax = 0.55;
  for (bool blended : {true, false}) {
    const XPointRayMapping map(3, p, ext, blended);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const double delta = 1e-3;
    int used = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const RealVec<2> xi{u(rng), u(rng)};
      if (blended && !fd_stencil_smooth(map, xi, delta, p.m_alpha, p.m_beta,
                                        p.m_D, map.pmax()))
        continue;
      const SmallMat<2> ga = map.gradient(xi);
      const SmallMat<2> gn = fd_gradient6(map, xi, delta);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          REQUIRE(ga[static_cast<size_t>(r)][c] ==
                  Catch::Approx(gn[static_cast<size_t>(r)][c]).margin(1e-8));
      ++used;
    }
    REQUIRE(used >= 40);
  }
}

TEST_CASE("xpoint unblended rays pinch at the separatrix", "[xpoint]") {
  XPointParams p;
  p.m_D = 0.25;
  XPointExtents ext;
  ext.m_psimax = 1.0;
  ext.m_taumax = 0.6;

  double prev = 0.0;
  double j16 = 0.0, j64 = 0.0;
  for (int n : {16, 32, 64}) {
    const XPointRayMapping map(0, p, ext, false);
    const MetricCache<2> mc = compute_metrics(
        map, Box<2>(IndexVec<2>{0, 0}, IndexVec<2>{n - 1, n - 1}), n);
    const double mn = min_jacobian(mc);
    REQUIRE(mn > 0.0);
    if (n > 16) REQUIRE(mn < prev); // strictly shrinking under refinement
    if (n == 16) j16 = mn;
    if (n == 64) j64 = mn;
    prev = mn;
  }
  REQUIRE(j16 / j64 >= 4.0);
}
