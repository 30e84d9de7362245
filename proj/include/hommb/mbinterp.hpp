#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hommb/box.hpp"
#include "hommb/errors.hpp"
#include "hommb/geometry.hpp"
#include "hommb/grid_array.hpp"
#include "hommb/index.hpp"
#include "hommb/mapping.hpp"
#include "hommb/multiblock.hpp"
#include "hommb/quadrature.hpp"
#include "hommb/smalldense.hpp"
#include "hommb/stencil.hpp"

namespace hommb {

/// Slab of ghost cells outside one inter-block face that is filled by
/// interpolation from donor blocks. The slab is nGhost deep and extends
/// nGhost cells past the face range toward every transverse side that is
/// itself an interpolation seam, so seam-seam corner cells (including the
/// diagonal ones) get geometric values too. Corner cells claimed by two
/// regions are written twice in region order; both values interpolate the
/// same field, the fixed order keeps runs deterministic.
template <int D>
struct GhostRegion {
  BlockId m_block = 0;
  int m_axis = 0;
  int m_side = 0;
  Box<D> m_box;
};

namespace detail {

inline bool interp_seam(const MultiBlockDomain<2>& dom, BlockId b, int axis,
                        int side) {
  const FaceConnection<2>& fc = dom.face(b, axis, side);
  if (fc.m_kind == FaceKind::BlockMulti) return true;
  return fc.m_kind == FaceKind::Block && !dom.is_periodic_self(b, axis, side);
}

} // namespace detail

inline std::vector<GhostRegion<2>> build_ghost_regions(
    const MultiBlockDomain<2>& dom, int nGhost) {
  HOMMB_REQUIRE(nGhost >= 1, "ghost regions need nGhost >= 1");
  std::vector<GhostRegion<2>> regions;
  for (BlockId b = 0; b < dom.nblocks(); ++b) {
    for (int axis = 0; axis < 2; ++axis) {
      for (int side = 0; side < 2; ++side) {
        if (!detail::interp_seam(dom, b, axis, side)) continue;
        Box<2> slab = adjacent_cells(dom.block_box(b), axis, side, nGhost);
        const int o = 1 - axis;
        for (int t = 0; t < 2; ++t)
          if (detail::interp_seam(dom, b, o, t))
            slab = grow_side(slab, o, t, nGhost);
        regions.push_back(GhostRegion<2>{b, axis, side, slab});
      }
    }
  }
  return regions;
}

/// Interpolation weights for one ghost cell. Every source cell lies in the
/// valid region of the single donor block.
struct InterpStencil {
  BlockId m_dstBlock = 0;
  IndexVec<2> m_dstCell{};
  BlockId m_donor = 0;
  std::vector<IndexVec<2>> m_cells;
  std::vector<double> m_weights;
};

namespace detail {

struct BlockBBox {
  RealVec<2> m_lo{};
  RealVec<2> m_hi{};
  double m_diag = 0.0;
};

inline BlockBBox sample_bbox(const MappingSpec<2>& map) {
  BlockBBox bb;
  bb.m_lo = RealVec<2>::uniform(1e300);
  bb.m_hi = RealVec<2>::uniform(-1e300);
  const int m = 12;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= m; ++j) {
      const RealVec<2> x =
          map.eval(RealVec<2>{static_cast<double>(i) / m, static_cast<double>(j) / m});
      for (int d = 0; d < 2; ++d) {
        bb.m_lo[d] = std::min(bb.m_lo[d], x[d]);
        bb.m_hi[d] = std::max(bb.m_hi[d], x[d]);
      }
    }
  }
  const double dx = bb.m_hi[0] - bb.m_lo[0], dy = bb.m_hi[1] - bb.m_lo[1];
  bb.m_diag = std::sqrt(dx * dx + dy * dy);
  // pad for edge bulge between lattice samples and for ghost geometry that
  // reaches a little past the unit square
  const double pad = 0.35 * bb.m_diag + 1e-12;
  for (int d = 0; d < 2; ++d) {
    bb.m_lo[d] -= pad;
    bb.m_hi[d] += pad;
  }
  return bb;
}

inline bool bbox_contains(const BlockBBox& bb, const RealVec<2>& x) {
  for (int d = 0; d < 2; ++d)
    if (x[d] < bb.m_lo[d] || x[d] > bb.m_hi[d]) return false;
  return true;
}

// Damped Newton inversion of a block mapping. Iterates are clamped to a
// modest margin around the unit square: every mapping in the project stays
// evaluable there, and a preimage outside that margin means "not this
// block" anyway. Returns false instead of throwing so donor search can move
// on to the next candidate.
inline bool invert_block_mapping(const MappingSpec<2>& map, const RealVec<2>& X,
                                 double scale, bool haveSeed,
                                 const RealVec<2>& seed, RealVec<2>& xi) {
  if (map.has_inverse()) {
    xi = map.invert(X);
    const RealVec<2> r = map.eval(xi);
    return std::abs(r[0] - X[0]) + std::abs(r[1] - X[1]) <= 1e-11 * scale;
  }
  const double clampLo = -0.2, clampHi = 1.2;
  RealVec<2> cur{};
  double res = 1e300;
  auto residual = [&](const RealVec<2>& p) {
    const RealVec<2> y = map.eval(p);
    return std::abs(y[0] - X[0]) + std::abs(y[1] - X[1]);
  };
  if (haveSeed) {
    cur = seed;
    cur[0] = std::clamp(cur[0], clampLo, clampHi);
    cur[1] = std::clamp(cur[1], clampLo, clampHi);
    res = residual(cur);
  } else {
    const int m = 6;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        const RealVec<2> p{static_cast<double>(i) / m, static_cast<double>(j) / m};
        const double r = residual(p);
        if (r < res) {
          res = r;
          cur = p;
        }
      }
    }
  }
  const double tol = 1e-13 * scale;
  for (int it = 0; it < 60 && res > tol; ++it) {
    const SmallMat<2> g = mapping_gradient(map, cur, 1e-3);
    const double det = det_mat(g);
    if (std::abs(det) < 1e-30) return false;
    const RealVec<2> y = map.eval(cur);
    const double rx = y[0] - X[0], ry = y[1] - X[1];
    const double sx = (g[1][1] * rx - g[0][1] * ry) / det;
    const double sy = (-g[1][0] * rx + g[0][0] * ry) / det;
    double lambda = 1.0;
    bool moved = false;
    for (int cut = 0; cut < 12; ++cut) {
      RealVec<2> trial{std::clamp(cur[0] - lambda * sx, clampLo, clampHi),
                       std::clamp(cur[1] - lambda * sy, clampLo, clampHi)};
      const double rt = residual(trial);
      if (rt < res) {
        cur = trial;
        res = rt;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) break;
  }
  xi = cur;
  return res <= 1e-11 * scale;
}

} // namespace detail

/// Geometric ghost fill across non-conforming (and conforming) inter-block
/// seams. For each ghost cell of each region the donor block is located by
/// inverting candidate mappings at the ghost cell center (bounding-box
/// prefilter, lowest block id wins ties), and a least-squares fit of degree 4
/// in the donor's index coordinates is built over nearby donor cells:
///
///   rows    cell averages of the 15 monomials through degree 4 over donor
///           cells, closed form, weighted by inverse squared distance;
///   target  the average of the same monomials over the ghost cell, by a
///           5x5 Gauss rule mapped through both blocks.
///
/// Degree 4 instead of 3 buys one extra order of smooth-field accuracy from
/// the same 5x5 neighborhoods, which keeps the observed ghost error solidly
/// fourth order on curved seams at moderate resolution. The fit reproduces
/// any quartic in donor index coordinates, so constants are preserved to
/// roundoff and the weights of every stencil sum to one; that sum is checked
/// to 1e-12 at build time. A ghost cell that lands exactly on a donor cell
/// (center and corners within 1e-9 of the index lattice) degenerates to a
/// weight-one copy of that cell.
class MbInterp {
public:
  MbInterp(const BlockGeometry& geom, int nGhost)
    : m_nGhost(nGhost), m_regions(build_ghost_regions(geom.m_domain, nGhost)) {
    HOMMB_REQUIRE(geom.m_maps.size() ==
                      static_cast<size_t>(geom.m_domain.nblocks()),
                  "one mapping per block");
    const MultiBlockDomain<2>& dom = geom.m_domain;
    std::vector<detail::BlockBBox> bbox;
    for (BlockId b = 0; b < dom.nblocks(); ++b)
      bbox.push_back(detail::sample_bbox(*geom.m_maps[static_cast<size_t>(b)]));

    const GaussRule gr = gauss_rule(5);
    for (const GhostRegion<2>& reg : m_regions) {
      const Box<2> bbx = dom.block_box(reg.m_block);
      const MappingSpec<2>& bmap = *geom.m_maps[static_cast<size_t>(reg.m_block)];
      // seed cache: donor coordinates found for the previous cell of this
      // region make excellent Newton starts for the next one
      std::vector<RealVec<2>> lastXi(static_cast<size_t>(dom.nblocks()));
      std::vector<char> haveLast(static_cast<size_t>(dom.nblocks()), 0);

      for (BoxIter<2> it(reg.m_box); it.ok(); ++it) {
        const IndexVec<2> cell = *it;
        RealVec<2> xiB{};
        for (int d = 0; d < 2; ++d)
          xiB[d] = (cell[d] - bbx.lo()[d] + 0.5) / bbx.extent(d);
        const RealVec<2> X = bmap.eval(xiB);

        BlockId donor = -1;
        RealVec<2> xiD{};
        for (BlockId nb = 0; nb < dom.nblocks(); ++nb) {
          if (nb == reg.m_block) continue;
          const detail::BlockBBox& nbb = bbox[static_cast<size_t>(nb)];
          if (!detail::bbox_contains(nbb, X)) continue;
          RealVec<2> cand{};
          if (!detail::invert_block_mapping(*geom.m_maps[static_cast<size_t>(nb)],
                                            X, nbb.m_diag, haveLast[static_cast<size_t>(nb)] != 0,
                                            lastXi[static_cast<size_t>(nb)], cand))
            continue;
          lastXi[static_cast<size_t>(nb)] = cand;
          haveLast[static_cast<size_t>(nb)] = 1;
          if (cand[0] < -1e-8 || cand[0] > 1.0 + 1e-8 || cand[1] < -1e-8 ||
              cand[1] > 1.0 + 1e-8)
            continue;
          donor = nb;
          xiD = cand;
          break;
        }
        if (donor < 0)
          throw NumericalContractError(
              "multiblock ghost cell has no donor block");

        build_one(geom, bbox, gr, reg.m_block, cell, xiB, donor, xiD);
      }
    }
  }

  int nghost() const { return m_nGhost; }
  const std::vector<GhostRegion<2>>& regions() const { return m_regions; }
  const std::vector<InterpStencil>& stencils() const { return m_stencils; }

  /// Overwrite every registered ghost cell from donor valid data. Sources
  /// are valid cells only, so the update order never matters.
  void apply(std::vector<GridArray<2>>& data) const {
    const int ncomp = data.empty() ? 0 : data.front().ncomp();
    for (const InterpStencil& s : m_stencils) {
      const GridArray<2>& src = data[static_cast<size_t>(s.m_donor)];
      GridArray<2>& dst = data[static_cast<size_t>(s.m_dstBlock)];
      for (int c = 0; c < ncomp; ++c) {
        double acc = 0.0;
        for (size_t k = 0; k < s.m_cells.size(); ++k)
          acc += s.m_weights[k] * src(s.m_cells[k], c);
        dst(s.m_dstCell, c) = acc;
      }
    }
  }

private:
  void build_one(const BlockGeometry& geom,
                 const std::vector<detail::BlockBBox>& bbox, const GaussRule& gr,
                 BlockId b, const IndexVec<2>& cell, const RealVec<2>& xiB,
                 BlockId donor, const RealVec<2>& xiD) {
    const MultiBlockDomain<2>& dom = geom.m_domain;
    const MappingSpec<2>& bmap = *geom.m_maps[static_cast<size_t>(b)];
    const MappingSpec<2>& dmap = *geom.m_maps[static_cast<size_t>(donor)];
    const Box<2> bbx = dom.block_box(b);
    const Box<2> dbx = dom.block_box(donor);
    const double diag = bbox[static_cast<size_t>(donor)].m_diag;

    IndexVec<2> c0{};
    for (int d = 0; d < 2; ++d) {
      const int rel = static_cast<int>(std::floor(xiD[d] * dbx.extent(d)));
      c0[d] = std::clamp(dbx.lo()[d] + rel, dbx.lo()[d], dbx.hi()[d]);
    }

    InterpStencil st;
    st.m_dstBlock = b;
    st.m_dstCell = cell;
    st.m_donor = donor;

    if (coincident(bmap, dmap, bbx, dbx, diag, cell, xiD, c0)) {
      st.m_cells.push_back(c0);
      st.m_weights.push_back(1.0);
      m_stencils.push_back(std::move(st));
      return;
    }

    // Donor neighborhood: radius 2 around c0, then each axis widened
    // independently (one-sided where the donor box clips) back to five
    // positions. Fewer than five distinct positions along an axis would make
    // the quartic column along it linearly dependent; widening per axis
    // instead of per radius keeps the box at 5x5 so the fit footprint does
    // not balloon along donor edges.
    Box<2> cb = intersect(grow(Box<2>(c0, c0), 2), dbx);
    for (int d = 0; d < 2; ++d) {
      int need = 5 - cb.extent(d);
      while (need > 0 &&
             (cb.m_lo[d] > dbx.lo()[d] || cb.m_hi[d] < dbx.hi()[d])) {
        if (cb.m_lo[d] > dbx.lo()[d]) {
          --cb.m_lo[d];
          --need;
        }
        if (need > 0 && cb.m_hi[d] < dbx.hi()[d]) {
          ++cb.m_hi[d];
          --need;
        }
      }
    }
    if (cb.cells() < 21 || cb.extent(0) < 5 || cb.extent(1) < 5)
      throw NumericalContractError("ghost interpolation stencil starved");

    // target row: ghost-cell averages of the cubic monomials in donor index
    // coordinates, 4x4 Gauss points traced through both mappings
    std::vector<double> t(NMONO, 0.0);
    for (int gi = 0; gi < gr.m_n; ++gi) {
      for (int gj = 0; gj < gr.m_n; ++gj) {
        RealVec<2> xig{};
        xig[0] = xiB[0] + gr.m_x[static_cast<size_t>(gi)] / bbx.extent(0);
        xig[1] = xiB[1] + gr.m_x[static_cast<size_t>(gj)] / bbx.extent(1);
        const RealVec<2> Xg = bmap.eval(xig);
        RealVec<2> xg{};
        if (!detail::invert_block_mapping(dmap, Xg, diag, true, xiD, xg))
          throw NumericalContractError(
              "ghost quadrature point inversion failed");
        double u[2];
        for (int d = 0; d < 2; ++d)
          u[d] = xg[d] * dbx.extent(d) - (c0[d] - dbx.lo()[d] + 0.5);
        const double wg =
            gr.m_w[static_cast<size_t>(gi)] * gr.m_w[static_cast<size_t>(gj)];
        for (int j = 0; j < NMONO; ++j)
          t[static_cast<size_t>(j)] +=
              wg * ipow(u[0], MONO[j][0]) * ipow(u[1], MONO[j][1]);
      }
    }

    const int m = static_cast<int>(cb.cells());
    detail::DenseMat A(m, NMONO);
    std::vector<double> sw(static_cast<size_t>(m));
    int r = 0;
    for (BoxIter<2> ct(cb); ct.ok(); ++ct, ++r) {
      const IndexVec<2> dc = *ct - c0;
      const double s = 1.0 / (1.0 + dc[0] * dc[0] + dc[1] * dc[1]);
      sw[static_cast<size_t>(r)] = s;
      for (int j = 0; j < NMONO; ++j)
        A(r, j) = s * stencil::cell_average_moment(MONO[j][0], dc[0]) *
                  stencil::cell_average_moment(MONO[j][1], dc[1]);
      st.m_cells.push_back(*ct);
    }

    // ghost value = t . a with a the weighted least-squares fit, so the
    // per-cell weights are S Q1 R^-T t
    detail::HouseholderQR qr(std::move(A));
    const std::vector<double> y = qr.solve_rt(t);
    std::vector<double> w(static_cast<size_t>(m), 0.0);
    std::copy(y.begin(), y.end(), w.begin());
    qr.apply_q(w);
    double sum = 0.0;
    st.m_weights.resize(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
      st.m_weights[static_cast<size_t>(k)] = sw[static_cast<size_t>(k)] * w[static_cast<size_t>(k)];
      sum += st.m_weights[static_cast<size_t>(k)];
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw NumericalContractError(
          "ghost interpolation weights do not sum to one");
    m_stencils.push_back(std::move(st));
  }

  // true when the ghost cell coincides with donor cell c0: center and all
  // four corners sit on the donor index lattice to 1e-9
  bool coincident(const MappingSpec<2>& bmap, const MappingSpec<2>& dmap,
                  const Box<2>& bbx, const Box<2>& dbx, double diag,
                  const IndexVec<2>& cell, const RealVec<2>& xiDCenter,
                  const IndexVec<2>& c0) const {
    const double tol = 1e-9;
    for (int d = 0; d < 2; ++d) {
      const double u = xiDCenter[d] * dbx.extent(d) - (c0[d] - dbx.lo()[d] + 0.5);
      if (std::abs(u) > tol) return false;
    }
    for (int ci = 0; ci <= 1; ++ci) {
      for (int cj = 0; cj <= 1; ++cj) {
        RealVec<2> xin{};
        xin[0] = static_cast<double>(cell[0] - bbx.lo()[0] + ci) / bbx.extent(0);
        xin[1] = static_cast<double>(cell[1] - bbx.lo()[1] + cj) / bbx.extent(1);
        const RealVec<2> Xn = bmap.eval(xin);
        RealVec<2> xd{};
        if (!detail::invert_block_mapping(dmap, Xn, diag, true, xiDCenter, xd))
          return false;
        for (int d = 0; d < 2; ++d) {
          const double u =
              xd[d] * dbx.extent(d) - (c0[d] - dbx.lo()[d] +
                                       (d == 0 ? ci : cj));
          if (std::abs(u) > tol) return false;
        }
      }
    }
    return true;
  }

  static double ipow(double x, int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= x;
    return p;
  }

  static constexpr int NMONO = 15;
  static constexpr int MONO[NMONO][2] = {
      {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1},
      {1, 2}, {0, 3}, {4, 0}, {3, 1}, {2, 2}, {1, 3}, {0, 4}};

  int m_nGhost = 0;
  std::vector<GhostRegion<2>> m_regions;
  std::vector<InterpStencil> m_stencils;
};

/// One-stop ghost fill for per-block data on a mapped multiblock domain:
///
///   1. periodic wraps, valid transverse range;
///   2. seam interpolation (MbInterp);
///   3. physical-boundary extrapolation, face slabs;
///   4. physical-boundary extrapolation into corners, with sources taken
///      from the ghosts steps 1-3 produced;
///   5. periodic wraps again over the full grown range, which stamps the
///      wrap image of the freshly extrapolated ghosts into the corners.
///
/// Corner ownership: a corner between a physical face and any interpolated
/// seam belongs to the physical face (extrapolated along its axis); between
/// two physical faces to the lower axis; corners touching a periodic axis to
/// the wrap. Every ghost cell of grow(valid, nGhost) is written by exactly
/// one pass except the idempotent wrap re-copy.
class MultiblockFill {
public:
  explicit MultiblockFill(const BlockGeometry& geom, int nGhost = 2)
    : m_nblocks(geom.m_domain.nblocks()), m_nGhost(nGhost),
      m_interp(geom, nGhost) {
    const MultiBlockDomain<2>& dom = geom.m_domain;
    for (BlockId b = 0; b < dom.nblocks(); ++b) {
      const Box<2> bx = dom.block_box(b);
      for (int axis = 0; axis < 2; ++axis) {
        for (int side = 0; side < 2; ++side) {
          if (dom.is_periodic_self(b, axis, side)) {
            const int ext = bx.extent(axis);
            const IndexVec<2> shift = (side == 0 ? ext : -ext) * IndexVec<2>::unit(axis);
            const Box<2> slab = adjacent_cells(bx, axis, side, nGhost);
            m_wrapA.push_back(WrapOp{b, slab, shift});
            m_wrapB.push_back(WrapOp{b, grow_side(grow_side(slab, 1 - axis, 0, nGhost),
                                                  1 - axis, 1, nGhost),
                                     shift});
            continue;
          }
          if (dom.face(b, axis, side).m_kind != FaceKind::PhysicalBoundary)
            continue;
          for (int dist = 1; dist <= nGhost; ++dist) {
            Box<2> layer = adjacent_cells(bx, axis, side, dist);
            if (side == 0)
              layer.m_hi[axis] = layer.m_lo[axis];
            else
              layer.m_lo[axis] = layer.m_hi[axis];
            m_slabs.push_back(
                ExtrapOp{b, layer, stencil::extrapolation_kernel<2>(axis, side, dist)});
            const int o = 1 - axis;
            for (int t = 0; t < 2; ++t) {
              const FaceKind ok = dom.face(b, o, t).m_kind;
              bool extend = false;
              if (ok != FaceKind::PhysicalBoundary)
                extend = !dom.is_periodic_self(b, o, t); // wraps own their corners
              else
                extend = axis < o;
              if (!extend) continue;
              Box<2> corner = layer;
              if (t == 0) {
                corner.m_lo[o] = bx.lo()[o] - nGhost;
                corner.m_hi[o] = bx.lo()[o] - 1;
              } else {
                corner.m_lo[o] = bx.hi()[o] + 1;
                corner.m_hi[o] = bx.hi()[o] + nGhost;
              }
              m_corners.push_back(
                  ExtrapOp{b, corner, stencil::extrapolation_kernel<2>(axis, side, dist)});
            }
          }
        }
      }
    }
  }

  int nghost() const { return m_nGhost; }
  const MbInterp& interp() const { return m_interp; }

  void fill(std::vector<GridArray<2>>& data) const {
    HOMMB_REQUIRE(static_cast<int>(data.size()) == m_nblocks,
                  "one array per block");
    for (const GridArray<2>& a : data) {
      HOMMB_REQUIRE(a.centering().is_cell() &&
                        a.ghost() == IndexVec<2>::uniform(m_nGhost),
                    "fill wants cell data with matching ghost width");
    }
    run_wraps(m_wrapA, data);
    m_interp.apply(data);
    run_extrap(m_slabs, data);
    run_extrap(m_corners, data);
    run_wraps(m_wrapB, data);
  }

private:
  struct WrapOp {
    BlockId m_block = 0;
    Box<2> m_dst;
    IndexVec<2> m_shift{};
  };
  struct ExtrapOp {
    BlockId m_block = 0;
    Box<2> m_box;
    StencilKernel<2> m_kernel;
  };

  static void run_wraps(const std::vector<WrapOp>& ops,
                        std::vector<GridArray<2>>& data) {
    for (const WrapOp& op : ops) {
      GridArray<2>& a = data[static_cast<size_t>(op.m_block)];
      for (int c = 0; c < a.ncomp(); ++c)
        for (BoxIter<2> it(op.m_dst); it.ok(); ++it)
          a(*it, c) = a(*it + op.m_shift, c);
    }
  }

  static void run_extrap(const std::vector<ExtrapOp>& ops,
                         std::vector<GridArray<2>>& data) {
    for (const ExtrapOp& op : ops) {
      GridArray<2>& a = data[static_cast<size_t>(op.m_block)];
      for (int c = 0; c < a.ncomp(); ++c)
        for (BoxIter<2> it(op.m_box); it.ok(); ++it)
          a(*it, c) = op.m_kernel.apply(a, *it, c);
    }
  }

  int m_nblocks = 0;
  int m_nGhost = 0;
  MbInterp m_interp;
  std::vector<WrapOp> m_wrapA;
  std::vector<WrapOp> m_wrapB;
  std::vector<ExtrapOp> m_slabs;
  std::vector<ExtrapOp> m_corners;
};

} // namespace hommb
