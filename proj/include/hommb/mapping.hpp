#ifndef HOMMB_MAPPING_HPP
#define HOMMB_MAPPING_HPP

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "hommb/errors.hpp"
#include "hommb/grid_array.hpp"
#include "hommb/highorder.hpp"

namespace hommb {

inline constexpr double pi_const = 3.14159265358979323846;

/// Row r holds dX_r/dxi_c for c = 0..D-1.
template <int D>
using SmallMat = std::array<RealVec<D>, static_cast<size_t>(D)>;

inline double det_mat(const SmallMat<2>& a) {
  return a[0][0] * a[1][1] - a[0][1] * a[1][0];
}

inline double det_mat(const SmallMat<3>& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

/// A smooth map from computational coordinates xi in [0,1]^D to physical
/// space. eval must stay meaningful a few cells past the unit cube (metric
/// stencils and ghost geometry reach outside). Analytic gradients and
/// inverses are optional accelerators; everything works without them.
template <int D>
class MappingSpec {
public:
  virtual ~MappingSpec() = default;

  virtual RealVec<D> eval(const RealVec<D>& xi) const = 0;

  virtual bool has_gradient() const { return false; }
  virtual SmallMat<D> gradient(const RealVec<D>&) const {
    HOMMB_REQUIRE(false, "mapping provides no analytic gradient");
    return SmallMat<D>{};
  }

  virtual bool has_inverse() const { return false; }
  virtual RealVec<D> invert(const RealVec<D>&) const {
    HOMMB_REQUIRE(false, "mapping provides no inverse");
    return RealVec<D>{};
  }

  /// Free-form smoothness / validity note for reports.
  virtual std::string note() const { return std::string(); }
};

/// Plain second-order centered differences of eval.
template <int D>
inline SmallMat<D> fd_gradient2(const MappingSpec<D>& m, const RealVec<D>& xi,
                                double delta) {
  SmallMat<D> g{};
  for (int c = 0; c < D; ++c) {
    RealVec<D> xp = xi, xm = xi;
    xp[c] += delta;
    xm[c] -= delta;
    const RealVec<D> fp = m.eval(xp), fm = m.eval(xm);
    for (int r = 0; r < D; ++r) g[static_cast<size_t>(r)][c] = (fp[r] - fm[r]) / (2.0 * delta);
  }
  return g;
}

/// Sixth-order centered differences of eval; the workhorse behind metric
/// terms when no analytic gradient is available.
template <int D>
inline SmallMat<D> fd_gradient6(const MappingSpec<D>& m, const RealVec<D>& xi,
                                double delta) {
  static const double w[3] = {45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};
  SmallMat<D> g{};
  for (int c = 0; c < D; ++c) {
    RealVec<D> acc{};
    for (int k = 1; k <= 3; ++k) {
      RealVec<D> xp = xi, xm = xi;
      xp[c] += k * delta;
      xm[c] -= k * delta;
      const RealVec<D> fp = m.eval(xp), fm = m.eval(xm);
      for (int r = 0; r < D; ++r) acc[r] += w[k - 1] * (fp[r] - fm[r]);
    }
    for (int r = 0; r < D; ++r) g[static_cast<size_t>(r)][c] = acc[r] / delta;
  }
  return g;
}

template <int D>
inline SmallMat<D> mapping_gradient(const MappingSpec<D>& m,
                                    const RealVec<D>& xi, double delta) {
  return m.has_gradient() ? m.gradient(xi) : fd_gradient6(m, xi, delta);
}

/// Metric data for one block (or sub-box of one) at a given resolution.
///
/// m_N[d] lives on the faces normal to axis d and carries D*D components in
/// row-major order; row d (the one the flux divergence consumes) is built
/// from differences of node coordinates along the face, which makes the
/// divergence of N . c telescope to zero for any constant vector c. The
/// remaining rows are evaluated at face midpoints and corrected to face
/// averages with an in-face second difference.
///
/// Jpoint holds point Jacobians at cell centers, Javg fourth-order cell
/// averages, and Jdeconv the deconvolution of Javg. Reconstruction divides
/// by Jdeconv rather than Jpoint so that constant fields come back exactly.
template <int D>
struct MetricCache {
  Box<D> m_box;                   // cell box the cache covers
  IndexVec<D> m_res;              // cells per axis across the whole block
  RealVec<D> m_h;                 // computational spacings 1/res
  GridArray<D> m_nodes;           // node coordinates, D components
  std::array<GridArray<D>, static_cast<size_t>(D)> m_N;
  GridArray<D> m_Jpoint;
  GridArray<D> m_Javg;
  GridArray<D> m_Jdeconv;

  RealVec<D> node_coord(const IndexVec<D>& node) const {
    RealVec<D> x;
    for (int d = 0; d < D; ++d) x[d] = m_nodes(node, d);
    return x;
  }

  RealVec<D> xi_of_node(const IndexVec<D>& node) const {
    RealVec<D> xi;
    for (int d = 0; d < D; ++d) xi[d] = node[d] * m_h[d];
    return xi;
  }

  RealVec<D> xi_of_center(const IndexVec<D>& cell) const {
    RealVec<D> xi;
    for (int d = 0; d < D; ++d) xi[d] = (cell[d] + 0.5) * m_h[d];
    return xi;
  }

  double cell_measure() const {
    double v = 1.0;
    for (int d = 0; d < D; ++d) v *= m_h[d];
    return v;
  }

  /// Sum of Javg times the cell measure: the mapped volume of m_box.
  double volume() const {
    double v = 0.0;
    for (BoxIter<D> it(m_box); it.ok(); ++it) v += m_Javg(*it);
    return v * cell_measure();
  }
};

namespace detail {

// midpoint values of the off-normal metric rows on one face array, then an
// in-face second-difference correction to reach face averages
template <int D>
inline void fill_offnormal_rows(const MappingSpec<D>& m, MetricCache<D>& mc,
                                int axis, const Box<D>& faceBox, double delta);

inline void adjugate_rows(const SmallMat<2>& a, SmallMat<2>& adj) {
  adj[0][0] = a[1][1];
  adj[0][1] = -a[0][1];
  adj[1][0] = -a[1][0];
  adj[1][1] = a[0][0];
}

template <>
inline void fill_offnormal_rows<2>(const MappingSpec<2>& m, MetricCache<2>& mc,
                                   int axis, const Box<2>& faceBox,
                                   double delta) {
  const int tang = 1 - axis;
  GridArray<2>& N = mc.m_N[static_cast<size_t>(axis)];
  GridArray<2> mid(faceBox, 0, Centering::face(axis), 2);
  for (BoxIter<2> it(N.storage_box()); it.ok(); ++it) {
    RealVec<2> xi = mc.xi_of_node(*it);
    xi[tang] += 0.5 * mc.m_h[tang];
    SmallMat<2> adj;
    adjugate_rows(mapping_gradient(m, xi, delta), adj);
    const int row = 1 - axis; // the row not built from node differences
    mid(*it, 0) = adj[static_cast<size_t>(row)][0];
    mid(*it, 1) = adj[static_cast<size_t>(row)][1];
  }
  const Box<2> avail = mid.storage_box();
  for (BoxIter<2> it(avail); it.ok(); ++it) {
    const int row = 1 - axis;
    for (int s = 0; s < 2; ++s) {
      const double corr = detail::second_diff_bounded<2>(
          mid.data(), mid.offset(*it, s), mid.stride(tang),
          (*it)[tang] - avail.lo()[tang], avail.extent(tang));
      N(*it, row * 2 + s) = mid(*it, s) + corr / 24.0;
    }
  }
}

} // namespace detail

/// Build the metric cache for blockBox of a block discretized with res cells
/// per axis (so computational spacing is 1/res per axis). Throws
/// NumericalContractError if the Jacobian is not positive at a cell center
/// of blockBox.
template <int D>
inline MetricCache<D> compute_metrics(const MappingSpec<D>& m,
                                      const Box<D>& blockBox,
                                      const IndexVec<D>& res) {
  static_assert(D == 2, "metric construction is implemented for 2D");
  for (int d = 0; d < D; ++d)
    HOMMB_REQUIRE(res[d] >= 4, "compute_metrics wants at least 4 cells per axis");
  MetricCache<D> mc;
  mc.m_box = blockBox;
  mc.m_res = res;
  double hmin = 1.0;
  for (int d = 0; d < D; ++d) {
    mc.m_h[d] = 1.0 / res[d];
    hmin = std::min(hmin, mc.m_h[d]);
  }
  const double delta = 0.5 * hmin;

  // node coordinates over the grown box (one extra ring of faces)
  const Box<D> grown = grow(blockBox, 1);
  const Box<D> nodeBox(grown.lo(), grown.hi() + IndexVec<D>::uniform(1));
  mc.m_nodes = GridArray<D>(nodeBox, 0, Centering::cell(), D);
  for (BoxIter<D> it(nodeBox); it.ok(); ++it) {
    const RealVec<D> x = m.eval(mc.xi_of_node(*it));
    for (int d = 0; d < D; ++d) mc.m_nodes(*it, d) = x[d];
  }

  // face-averaged metric rows; row d on axis-d faces comes from exact
  // tangential node differences (2D adjugate structure)
  for (int d = 0; d < D; ++d) {
    const int tang = 1 - d;
    mc.m_N[static_cast<size_t>(d)] =
        GridArray<D>(grown, 0, Centering::face(d), D * D);
    GridArray<D>& N = mc.m_N[static_cast<size_t>(d)];
    for (BoxIter<D> it(N.storage_box()); it.ok(); ++it) {
      const IndexVec<D> a = *it;
      const IndexVec<D> b = a + IndexVec<D>::unit(tang);
      const double dX0 = mc.m_nodes(b, 0) - mc.m_nodes(a, 0);
      const double dX1 = mc.m_nodes(b, 1) - mc.m_nodes(a, 1);
      if (d == 0) {
        N(a, 0 * 2 + 0) = dX1 / mc.m_h[1];  // dX1/dxi1
        N(a, 0 * 2 + 1) = -dX0 / mc.m_h[1]; // -dX0/dxi1
      } else {
        N(a, 1 * 2 + 0) = -dX1 / mc.m_h[0]; // -dX1/dxi0
        N(a, 1 * 2 + 1) = dX0 / mc.m_h[0];  // dX0/dxi0
      }
    }
    detail::fill_offnormal_rows<D>(m, mc, d, grown, delta);
  }

  // point Jacobians at valid cell centers, then averaged / deconvolved
  // counterparts with one-sided edge treatment (no ghost values needed)
  mc.m_Jpoint = GridArray<D>(blockBox, 0, Centering::cell(), 1);
  for (BoxIter<D> it(blockBox); it.ok(); ++it) {
    const double j = det_mat(mapping_gradient(m, mc.xi_of_center(*it), delta));
    if (!(j > 0.0))
      throw NumericalContractError("Jacobian not positive at a cell center");
    mc.m_Jpoint(*it) = j;
  }
  mc.m_Javg = GridArray<D>(blockBox, 0, Centering::cell(), 1);
  convolve_cell_bounded(mc.m_Jpoint, mc.m_Javg, blockBox, blockBox);
  mc.m_Jdeconv = GridArray<D>(blockBox, 0, Centering::cell(), 1);
  deconvolve_cell_bounded(mc.m_Javg, mc.m_Jdeconv, blockBox, blockBox);
  return mc;
}

template <int D>
inline MetricCache<D> compute_metrics(const MappingSpec<D>& m,
                                      const Box<D>& blockBox, int res) {
  return compute_metrics(m, blockBox, IndexVec<D>::uniform(res));
}

// ---------------------------------------------------------------------------
// concrete mappings

template <int D>
class IdentityMapping : public MappingSpec<D> {
public:
  RealVec<D> eval(const RealVec<D>& xi) const override { return xi; }
  bool has_gradient() const override { return true; }
  SmallMat<D> gradient(const RealVec<D>&) const override {
    SmallMat<D> g{};
    for (int d = 0; d < D; ++d) g[static_cast<size_t>(d)][d] = 1.0;
    return g;
  }
  bool has_inverse() const override { return true; }
  RealVec<D> invert(const RealVec<D>& x) const override { return x; }
  std::string note() const override { return "identity"; }
};

template <int D>
class AffineMapping : public MappingSpec<D> {
public:
  AffineMapping(const SmallMat<D>& a, const RealVec<D>& b) : m_a(a), m_b(b) {
    HOMMB_REQUIRE(det_mat(a) > 0.0, "affine mapping must be orientation preserving");
  }
  RealVec<D> eval(const RealVec<D>& xi) const override {
    RealVec<D> x = m_b;
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) x[r] += m_a[static_cast<size_t>(r)][c] * xi[c];
    return x;
  }
  bool has_gradient() const override { return true; }
  SmallMat<D> gradient(const RealVec<D>&) const override { return m_a; }
  std::string note() const override { return "affine"; }

private:
  SmallMat<D> m_a;
  RealVec<D> m_b;
};

/// Annular sector: xi0 sweeps radius r0..r1, xi1 sweeps angle th0..th1.
class PolarAnnulusMapping : public MappingSpec<2> {
public:
  PolarAnnulusMapping(double r0, double r1, double th0, double th1)
    : m_r0(r0), m_r1(r1), m_th0(th0), m_th1(th1) {
    if (!(r0 > 0.0) || !(r1 > r0))
      throw ValidationError("polar_annulus needs 0 < r0 < r1");
  }
  RealVec<2> eval(const RealVec<2>& xi) const override {
    const double r = m_r0 + xi[0] * (m_r1 - m_r0);
    const double th = m_th0 + xi[1] * (m_th1 - m_th0);
    return RealVec<2>{r * std::cos(th), r * std::sin(th)};
  }
  bool has_gradient() const override { return true; }
  SmallMat<2> gradient(const RealVec<2>& xi) const override {
    const double r = m_r0 + xi[0] * (m_r1 - m_r0);
    const double th = m_th0 + xi[1] * (m_th1 - m_th0);
    const double dr = m_r1 - m_r0, dth = m_th1 - m_th0;
    SmallMat<2> g;
    g[0] = RealVec<2>{dr * std::cos(th), -r * dth * std::sin(th)};
    g[1] = RealVec<2>{dr * std::sin(th), r * dth * std::cos(th)};
    return g;
  }
  bool has_inverse() const override { return true; }
  RealVec<2> invert(const RealVec<2>& x) const override {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    double th = std::atan2(x[1], x[0]);
    // pick the 2 pi shift closest to the sector's angular window
    const double center = 0.5 * (m_th0 + m_th1);
    th += 2.0 * pi_const * std::round((center - th) / (2.0 * pi_const));
    return RealVec<2>{(r - m_r0) / (m_r1 - m_r0), (th - m_th0) / (m_th1 - m_th0)};
  }
  std::string note() const override { return "polar annulus, smooth"; }

private:
  double m_r0, m_r1, m_th0, m_th1;
};

inline std::shared_ptr<const MappingSpec<2>> polar_annulus(double r0, double r1,
                                                           double th0,
                                                           double th1) {
  return std::make_shared<PolarAnnulusMapping>(r0, r1, th0, th1);
}

/// Full polar disc: xi0 sweeps radius 0..R, xi1 sweeps the full circle. The
/// axis r = 0 is the textbook coordinate singularity; this map exists to
/// measure the damage (cell widths collapsing like h^2), not to run solvers.
class PolarDiscMapping : public MappingSpec<2> {
public:
  explicit PolarDiscMapping(double radius) : m_r(radius) {
    if (!(radius > 0.0)) throw ValidationError("polar_disc needs a positive radius");
  }
  RealVec<2> eval(const RealVec<2>& xi) const override {
    const double r = xi[0] * m_r;
    const double th = 2.0 * pi_const * xi[1];
    return RealVec<2>{r * std::cos(th), r * std::sin(th)};
  }
  bool has_gradient() const override { return true; }
  SmallMat<2> gradient(const RealVec<2>& xi) const override {
    const double r = xi[0] * m_r;
    const double th = 2.0 * pi_const * xi[1];
    SmallMat<2> g;
    g[0] = RealVec<2>{m_r * std::cos(th), -r * 2.0 * pi_const * std::sin(th)};
    g[1] = RealVec<2>{m_r * std::sin(th), r * 2.0 * pi_const * std::cos(th)};
    return g;
  }
  std::string note() const override { return "polar disc, singular at r = 0"; }

private:
  double m_r;
};

inline std::shared_ptr<const MappingSpec<2>> polar_disc(double radius) {
  return std::make_shared<PolarDiscMapping>(radius);
}

// ---------------------------------------------------------------------------
// mesh quality

struct GridQuality {
  double m_minJ = 0.0;
  double m_maxJ = 0.0;
  double m_minWidth = 0.0;      // min over cells/axes of opposite-face-midpoint distance
  double m_maxAnisotropy = 0.0; // max over cells of widest/narrowest axis width
};

template <int D>
inline GridQuality grid_quality(const MetricCache<D>& mc) {
  static_assert(D == 2, "grid_quality is implemented for 2D");
  GridQuality q;
  q.m_minJ = std::numeric_limits<double>::max();
  q.m_maxJ = -q.m_minJ;
  q.m_minWidth = std::numeric_limits<double>::max();
  q.m_maxAnisotropy = 0.0;
  for (BoxIter<2> it(mc.m_box); it.ok(); ++it) {
    const double j = mc.m_Jpoint(*it);
    q.m_minJ = std::min(q.m_minJ, j);
    q.m_maxJ = std::max(q.m_maxJ, j);
    double w[2];
    for (int d = 0; d < 2; ++d) {
      // midpoints of the two faces normal to axis d
      const int tang = 1 - d;
      const IndexVec<2> n00 = *it;
      const IndexVec<2> n01 = *it + IndexVec<2>::unit(tang);
      const IndexVec<2> n10 = *it + IndexVec<2>::unit(d);
      const IndexVec<2> n11 = n10 + IndexVec<2>::unit(tang);
      double dist2 = 0.0;
      for (int c = 0; c < 2; ++c) {
        const double lo = 0.5 * (mc.m_nodes(n00, c) + mc.m_nodes(n01, c));
        const double hi = 0.5 * (mc.m_nodes(n10, c) + mc.m_nodes(n11, c));
        dist2 += (hi - lo) * (hi - lo);
      }
      w[d] = std::sqrt(dist2);
      q.m_minWidth = std::min(q.m_minWidth, w[d]);
    }
    q.m_maxAnisotropy =
        std::max(q.m_maxAnisotropy, std::max(w[0], w[1]) / std::min(w[0], w[1]));
  }
  return q;
}

} // namespace hommb

#endif
