#ifndef HOMMB_ADVECT_HPP
#define HOMMB_ADVECT_HPP

#include <functional>
#include <limits>
#include <tuple>
#include <vector>

#include "hommb/geometry.hpp"
#include "hommb/mbinterp.hpp"
#include "hommb/quadrature.hpp"

namespace hommb {

/// How face-averaged metric velocities W_d = <J grad(xi_d) . v> are built.
///
/// MetricProduct forms them as fourth-order products of the cached metric
/// rows with face averages of a pointwise velocity field. StreamFunction
/// differences a stream function at the face endpoints, which is the exact
/// face average for v = (d\psi/dy, -d\psi/dx); it also zeroes the normal
/// velocity identically on any boundary where \psi is constant, so closed
/// domains stay closed to roundoff.
enum class VelocityMode { MetricProduct, StreamFunction };

struct VelocityField {
  VelocityMode m_mode = VelocityMode::MetricProduct;
  std::function<RealVec<2>(const RealVec<2>&)> m_point;
  std::function<double(const RealVec<2>&)> m_stream;
  // psi(b) - psi(a) in a factored form when one exists. Differencing psi
  // values directly rounds O(1) numbers before dividing by h^2 in the flux
  // divergence; a factored difference keeps the roundoff proportional to
  // the node spacing instead.
  std::function<double(const RealVec<2>&, const RealVec<2>&)> m_streamDiff;
};

inline VelocityField constant_velocity(double vx, double vy) {
  VelocityField v;
  v.m_mode = VelocityMode::StreamFunction;
  v.m_point = [vx, vy](const RealVec<2>&) { return RealVec<2>{vx, vy}; };
  v.m_stream = [vx, vy](const RealVec<2>& x) { return vx * x[1] - vy * x[0]; };
  v.m_streamDiff = [vx, vy](const RealVec<2>& a, const RealVec<2>& b) {
    return vx * (b[1] - a[1]) - vy * (b[0] - a[0]);
  };
  return v;
}

/// Solid-body rotation about the origin: v = omega * (-y, x).
inline VelocityField rotation_velocity(double omega) {
  VelocityField v;
  v.m_mode = VelocityMode::StreamFunction;
  v.m_point = [omega](const RealVec<2>& x) {
    return RealVec<2>{-omega * x[1], omega * x[0]};
  };
  v.m_stream = [omega](const RealVec<2>& x) {
    return -0.5 * omega * (x[0] * x[0] + x[1] * x[1]);
  };
  v.m_streamDiff = [omega](const RealVec<2>& a, const RealVec<2>& b) {
    return -0.5 * omega * ((b[0] + a[0]) * (b[0] - a[0]) +
                           (b[1] + a[1]) * (b[1] - a[1]));
  };
  return v;
}

namespace detail {

inline Box<2> grow_axis(const Box<2>& b, int axis, int g) {
  return grow_side(grow_side(b, axis, 0, g), axis, 1, g);
}

} // namespace detail

/// Fourth-order finite-volume advection of a conserved scalar on a mapped
/// multiblock grid. The state is one array per block holding cell averages
/// of J * phi over computational cells; the tendency is
///
///   d<J phi>/dt = -sum_d (F_d(i+e_d) - F_d(i)) / h_d,
///   F_d = <W_d phi>_face,  W_d = <J grad(xi_d) . v>_face.
///
/// One evaluation deconvolves the state against the cached Jacobian
/// (constants reconstruct exactly), refills two ghost layers through
/// MultiblockFill, interpolates primitive averages to faces, and assembles
/// fluxes with the transverse product correction. W_d rows built from node
/// coordinate differences make the divergence of a constant field telescope
/// to roundoff on every grid.
class AdvectOp {
public:
  AdvectOp(const BlockGeometry& g, const VelocityField& vel)
    : m_geom(g), m_vel(vel), m_fill(g, 2) {
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    const size_t nb = static_cast<size_t>(dom.nblocks());
    m_metrics.reserve(nb);
    m_phi.reserve(nb);
    m_pt.reserve(nb);
    for (BlockId b = 0; b < dom.nblocks(); ++b) {
      const Box<2> bx = dom.block_box(b);
      m_metrics.push_back(compute_metrics(
          *m_geom.m_maps[static_cast<size_t>(b)], bx,
          IndexVec<2>{bx.extent(0), bx.extent(1)}));
      m_phi.emplace_back(bx, 2, Centering::cell(), 1, 0.0);
      m_pt.emplace_back(bx, 0, Centering::cell(), 1, 0.0);
      std::array<GridArray<2>, 2> w, face, flux;
      for (int d = 0; d < 2; ++d) {
        const Box<2> wide = detail::grow_axis(bx, 1 - d, 1);
        w[static_cast<size_t>(d)] = GridArray<2>(wide, 0, Centering::face(d), 1);
        face[static_cast<size_t>(d)] = GridArray<2>(wide, 0, Centering::face(d), 1);
        flux[static_cast<size_t>(d)] = GridArray<2>(bx, 0, Centering::face(d), 1);
        build_face_velocity(b, d, w[static_cast<size_t>(d)]);
      }
      m_W.push_back(std::move(w));
      m_face.push_back(std::move(face));
      m_flux.push_back(std::move(flux));
    }
    build_flux_matches();
  }

  const BlockGeometry& geometry() const { return m_geom; }
  const MetricCache<2>& metrics(BlockId b) const {
    return m_metrics[static_cast<size_t>(b)];
  }

  /// One zeroed single-component array per block, valid cells only.
  std::vector<GridArray<2>> zero_state() const {
    std::vector<GridArray<2>> s;
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    for (BlockId b = 0; b < dom.nblocks(); ++b)
      s.emplace_back(dom.block_box(b), 0, Centering::cell(), 1, 0.0);
    return s;
  }

  /// Build <J phi> from a pointwise field: phi is sampled at cell centers,
  /// multiplied by the cached point Jacobian, and convolved to averages.
  /// A constant K yields exactly K * <J>, which the tendency pipeline maps
  /// to zero; anything smooth is represented to fourth order.
  template <typename F>
  std::vector<GridArray<2>> initial_state(F&& phi0) const {
    std::vector<GridArray<2>> s = zero_state();
    for (BlockId b = 0; b < m_geom.m_domain.nblocks(); ++b) {
      const size_t sb = static_cast<size_t>(b);
      const Box<2> bx = m_geom.m_domain.block_box(b);
      GridArray<2> pt(bx, 0, Centering::cell(), 1);
      for (BoxIter<2> it(bx); it.ok(); ++it) {
        const RealVec<2> x =
            m_geom.m_maps[sb]->eval(m_metrics[sb].xi_of_center(*it));
        pt(*it) = m_metrics[sb].m_Jpoint(*it) * phi0(x);
      }
      convolve_cell_bounded(pt, s[sb], bx, bx);
    }
    return s;
  }

  /// Tendency d<J phi>/dt of the given state.
  void rhs(const std::vector<GridArray<2>>& u, std::vector<GridArray<2>>& out) {
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    const size_t nb = static_cast<size_t>(dom.nblocks());
    HOMMB_REQUIRE(u.size() == nb && out.size() == nb,
                  "advection state wants one array per block");
    for (size_t b = 0; b < nb; ++b) {
      const Box<2> bx = dom.block_box(static_cast<BlockId>(b));
      deconvolve_cell_bounded(u[b], m_pt[b], bx, bx);
      for (BoxIter<2> it(bx); it.ok(); ++it)
        m_pt[b](*it) /= m_metrics[b].m_Jdeconv(*it);
      convolve_cell_bounded(m_pt[b], m_phi[b], bx, bx);
    }
    m_fill.fill(m_phi);
    for (size_t b = 0; b < nb; ++b) {
      const Box<2> bx = dom.block_box(static_cast<BlockId>(b));
      for (int d = 0; d < 2; ++d) {
        const size_t sd = static_cast<size_t>(d);
        const Box<2> wide = detail::grow_axis(bx, 1 - d, 1);
        const Box<2> allFaces(wide.lo(), wide.hi() + IndexVec<2>::unit(d));
        interp_cell_to_face(m_phi[b], d, allFaces, m_face[b][sd]);
        const Box<2> fluxFaces(bx.lo(), bx.hi() + IndexVec<2>::unit(d));
        face_product_average(m_W[b][sd], m_face[b][sd], d, fluxFaces,
                             m_flux[b][sd]);
      }
    }
    reconcile_fluxes();
    for (size_t b = 0; b < nb; ++b) {
      const Box<2> bx = dom.block_box(static_cast<BlockId>(b));
      divergence(m_flux[b], m_metrics[b].m_h, bx, out[b]);
      for (BoxIter<2> it(bx); it.ok(); ++it) out[b](*it) = -out[b](*it);
    }
  }

  /// Classic four-stage Runge-Kutta step.
  void step_rk4(std::vector<GridArray<2>>& u, double dt) {
    ensure_scratch();
    rhs(u, m_k1);
    stage(u, 0.5 * dt, m_k1);
    rhs(m_ut, m_k2);
    stage(u, 0.5 * dt, m_k2);
    rhs(m_ut, m_k3);
    stage(u, dt, m_k3);
    rhs(m_ut, m_k4);
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    for (size_t b = 0; b < u.size(); ++b) {
      const Box<2> bx = dom.block_box(static_cast<BlockId>(b));
      const double c = dt / 6.0;
      for (BoxIter<2> it(bx); it.ok(); ++it)
        u[b](*it) += c * (m_k1[b](*it) + 2.0 * m_k2[b](*it) +
                          2.0 * m_k3[b](*it) + m_k4[b](*it));
    }
  }

  /// Largest stable step for the given CFL number, from per-axis face
  /// speeds |W_d| over the adjacent Jacobian averages.
  double stable_dt(double cfl) const {
    double dt = std::numeric_limits<double>::max();
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    for (BlockId b = 0; b < dom.nblocks(); ++b) {
      const size_t sb = static_cast<size_t>(b);
      const Box<2> bx = dom.block_box(b);
      for (int d = 0; d < 2; ++d) {
        const Box<2> faces(bx.lo(), bx.hi() + IndexVec<2>::unit(d));
        for (BoxIter<2> it(faces); it.ok(); ++it) {
          const double w = std::abs(m_W[sb][static_cast<size_t>(d)](*it));
          if (w <= 0.0) continue;
          IndexVec<2> c0 = *it - IndexVec<2>::unit(d);
          IndexVec<2> c1 = *it;
          c0[d] = std::max(c0[d], bx.lo()[d]);
          c1[d] = std::min(c1[d], bx.hi()[d]);
          const double j =
              std::min(m_metrics[sb].m_Javg(c0), m_metrics[sb].m_Javg(c1));
          dt = std::min(dt, cfl * m_metrics[sb].m_h[d] * j / w);
        }
      }
    }
    return dt;
  }

  /// Integral of the conserved field: sum of <J phi> times the cell measure.
  /// Compensated summation keeps the value deterministic enough to compare
  /// across hundreds of steps.
  double mass(const std::vector<GridArray<2>>& u) const {
    double s = 0.0, comp = 0.0;
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    for (size_t b = 0; b < u.size(); ++b) {
      const double meas = m_metrics[b].cell_measure();
      for (BoxIter<2> it(dom.block_box(static_cast<BlockId>(b))); it.ok(); ++it) {
        const double y = u[b](*it) * meas - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
      }
    }
    return s;
  }

private:
  // W on the faces of `wide` (valid faces along d, one extra transverse
  // row for the flux product correction)
  void build_face_velocity(BlockId b, int d, GridArray<2>& w) const {
    const size_t sb = static_cast<size_t>(b);
    const MetricCache<2>& mc = m_metrics[sb];
    const int tang = 1 - d;
    const Box<2> fb = w.storage_box();
    if (m_vel.m_mode == VelocityMode::StreamFunction) {
      HOMMB_REQUIRE(
          static_cast<bool>(m_vel.m_stream) || static_cast<bool>(m_vel.m_streamDiff),
          "StreamFunction velocity wants a stream function");
      const double sgn = (d == 0) ? 1.0 : -1.0;
      for (BoxIter<2> it(fb); it.ok(); ++it) {
        const RealVec<2> a = mc.node_coord(*it);
        const RealVec<2> bnd = mc.node_coord(*it + IndexVec<2>::unit(tang));
        const double dpsi = m_vel.m_streamDiff
                                ? m_vel.m_streamDiff(a, bnd)
                                : m_vel.m_stream(bnd) - m_vel.m_stream(a);
        w(*it) = sgn * dpsi / mc.m_h[tang];
      }
      return;
    }
    HOMMB_REQUIRE(static_cast<bool>(m_vel.m_point),
                  "MetricProduct velocity wants a pointwise field");
    // face averages of the velocity components, one transverse row beyond
    // the W faces so their product correction can stay centered
    const Box<2> vb = detail::grow_axis(w.storage_box(), tang, 1);
    GridArray<2> vAvg(vb, 0, Centering::face(d), 2);
    const GaussRule rule = gauss_rule(3);
    for (BoxIter<2> it(vAvg.storage_box()); it.ok(); ++it) {
      RealVec<2> acc{};
      for (int q = 0; q < rule.m_n; ++q) {
        RealVec<2> xi = mc.xi_of_node(*it);
        xi[tang] += (0.5 + rule.m_x[q]) * mc.m_h[tang];
        const RealVec<2> v = m_vel.m_point(m_geom.m_maps[sb]->eval(xi));
        for (int c = 0; c < 2; ++c) acc[c] += rule.m_w[q] * v[c];
      }
      for (int c = 0; c < 2; ++c) vAvg(*it, c) = acc[c];
    }
    const GridArray<2>& N = mc.m_N[static_cast<size_t>(d)];
    const Box<2> navail = N.storage_box();
    for (BoxIter<2> it(fb); it.ok(); ++it) {
      const IndexVec<2> f = *it;
      const IndexVec<2> tp = IndexVec<2>::unit(tang);
      double acc = 0.0;
      for (int c = 0; c < 2; ++c) {
        const int comp = d * 2 + c;
        const double nv = N(f, comp);
        double dn;
        if (f[tang] - 1 >= navail.lo()[tang] && f[tang] + 1 <= navail.hi()[tang])
          dn = N(f + tp, comp) - N(f - tp, comp);
        else if (f[tang] - 1 < navail.lo()[tang])
          dn = -3.0 * N(f, comp) + 4.0 * N(f + tp, comp) - N(f + 2 * tp, comp);
        else
          dn = 3.0 * N(f, comp) - 4.0 * N(f - tp, comp) + N(f - 2 * tp, comp);
        const double dv = vAvg(f + tp, c) - vAvg(f - tp, c);
        acc += nv * vAvg(f, c) + dn * dv / 48.0;
      }
      w(f) = acc;
    }
  }

  // The two blocks meeting at a conforming seam each assemble the shared
  // face flux from their own side; the values agree to truncation order but
  // not bitwise, which would leak mass. Each seam face therefore gets one
  // common value (the average), stored back on both sides with the sign the
  // two orientations imply. Periodic wrap faces are the same face twice in
  // one block and get a straight copy.
  struct FluxMatch {
    size_t m_ba = 0, m_bb = 0;
    int m_da = 0, m_db = 0;
    IndexVec<2> m_fa{}, m_fb{};
    double m_sgn = 1.0;
  };

  void build_flux_matches() {
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    for (BlockId b = 0; b < dom.nblocks(); ++b) {
      const Box<2> bx = dom.block_box(b);
      for (int d = 0; d < 2; ++d) {
        for (int s = 0; s < 2; ++s) {
          const FaceConnection<2>& fc = dom.face(b, d, s);
          if (fc.m_kind != FaceKind::Block || !fc.m_conforming) continue;
          if (dom.is_periodic_self(b, d, s)) continue;
          const BlockId ob = fc.m_other;
          const int od = fc.m_otherAxis, os = fc.m_otherSide;
          if (std::tie(b, d, s) > std::tie(ob, od, os)) continue;
          // flux oriented along +xi_d leaves A through a high face and
          // enters B through a low one; same-side pairings flip the sign
          const double sgn = (s != os) ? 1.0 : -1.0;
          for (BoxIter<2> it(adjacent_cells(bx, d, s, 1)); it.ok(); ++it) {
            const IndexVec<2> g = *it;
            const IndexVec<2> cb = fc.m_toOther.apply_cell(g);
            FluxMatch fm;
            fm.m_ba = static_cast<size_t>(b);
            fm.m_bb = static_cast<size_t>(ob);
            fm.m_da = d;
            fm.m_db = od;
            fm.m_fa = (s == 1) ? g : g + IndexVec<2>::unit(d);
            fm.m_fb = (os == 1) ? cb + IndexVec<2>::unit(od) : cb;
            fm.m_sgn = sgn;
            m_matches.push_back(fm);
          }
        }
      }
    }
  }

  void reconcile_fluxes() {
    for (const FluxMatch& fm : m_matches) {
      double& fa = m_flux[fm.m_ba][static_cast<size_t>(fm.m_da)](fm.m_fa);
      double& fb = m_flux[fm.m_bb][static_cast<size_t>(fm.m_db)](fm.m_fb);
      const double c = 0.5 * (fa + fm.m_sgn * fb);
      fa = c;
      fb = fm.m_sgn * c;
    }
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    for (BlockId b = 0; b < dom.nblocks(); ++b) {
      const Box<2> bx = dom.block_box(b);
      for (int d = 0; d < 2; ++d) {
        if (!dom.is_periodic_self(b, d, 0)) continue;
        Box<2> loFaces = bx;
        loFaces.m_hi[d] = loFaces.m_lo[d];
        GridArray<2>& F = m_flux[static_cast<size_t>(b)][static_cast<size_t>(d)];
        for (BoxIter<2> it(loFaces); it.ok(); ++it) {
          IndexVec<2> hiF = *it;
          hiF[d] = bx.hi()[d] + 1;
          F(hiF) = F(*it);
        }
      }
    }
  }

  void stage(const std::vector<GridArray<2>>& u, double c,
             const std::vector<GridArray<2>>& k) {
    const MultiBlockDomain<2>& dom = m_geom.m_domain;
    for (size_t b = 0; b < u.size(); ++b)
      for (BoxIter<2> it(dom.block_box(static_cast<BlockId>(b))); it.ok(); ++it)
        m_ut[b](*it) = u[b](*it) + c * k[b](*it);
  }

  void ensure_scratch() {
    if (!m_k1.empty()) return;
    m_k1 = zero_state();
    m_k2 = zero_state();
    m_k3 = zero_state();
    m_k4 = zero_state();
    m_ut = zero_state();
  }

  BlockGeometry m_geom;
  VelocityField m_vel;
  MultiblockFill m_fill;
  std::vector<MetricCache<2>> m_metrics;
  std::vector<GridArray<2>> m_phi; // primitive averages, two ghost layers
  std::vector<GridArray<2>> m_pt;  // deconvolved point values
  std::vector<std::array<GridArray<2>, 2>> m_W;
  std::vector<std::array<GridArray<2>, 2>> m_face;
  std::vector<std::array<GridArray<2>, 2>> m_flux;
  std::vector<GridArray<2>> m_k1, m_k2, m_k3, m_k4, m_ut;
  std::vector<FluxMatch> m_matches;
};

} // namespace hommb

#endif
