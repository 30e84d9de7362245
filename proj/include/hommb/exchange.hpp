#pragma once

#include "hommb/layout.hpp"

namespace hommb {

/// Precomputed ghost-fill copy plan for cell-centered data: intra-block patch
/// overlap copies plus periodic self-wrap images (including corner images
/// through several periodic axes at once). Ghost cells facing inter-block
/// seams or physical boundaries are not touched here.
template <int D>
class ExchangePlan {
public:
  ExchangePlan() = default;

  ExchangePlan(const DisjointLayout<D>& layout, const IndexVec<D>& ghost)
    : m_ghost(ghost) {
    const MultiBlockDomain<D>& dom = layout.domain();
    for (int p = 0; p < layout.npatches(); ++p) {
      const Patch<D>& dst = layout.patch(p);
      const Box<D> grown = grow(dst.m_box, ghost);

      // direct overlap with sibling patches of the same block
      for (int q : layout.block_patches(dst.m_block)) {
        if (q == p) continue;
        const Box<D> r = intersect(grown, layout.patch(q).m_box);
        if (!r.empty()) m_ops.push_back(Op{q, p, r, IndexVec<D>::zero()});
      }

      // periodic wrap images: shift by +/- extent over every nonempty subset
      // of this block's periodic axes
      std::vector<int> paxes;
      for (int a = 0; a < D; ++a)
        if (dom.is_periodic_self(dst.m_block, a, 0) &&
            dom.is_periodic_self(dst.m_block, a, 1))
          paxes.push_back(a);
      const int ncombo = static_cast<int>(std::pow(3.0, static_cast<double>(paxes.size())));
      for (int combo = 1; combo < ncombo; ++combo) {
        IndexVec<D> off = IndexVec<D>::zero();
        int c = combo;
        for (int a : paxes) {
          const int choice = c % 3;
          c /= 3;
          if (choice == 1) off[a] = dom.block_box(dst.m_block).extent(a);
          if (choice == 2) off[a] = -dom.block_box(dst.m_block).extent(a);
        }
        for (int q : layout.block_patches(dst.m_block)) {
          const Box<D> r = intersect(shift(grown, off), layout.patch(q).m_box);
          if (!r.empty())
            m_ops.push_back(Op{q, p, shift(r, -off), off});
        }
      }
    }
  }

  const IndexVec<D>& ghost() const { return m_ghost; }

  /// Copy phase; reads only valid source cells, writes only ghost regions.
  void apply(PatchField<D>& f) const {
    HOMMB_REQUIRE(f.centering().is_cell(), "exchange handles cell-centered data");
    HOMMB_REQUIRE(f.ghost() == m_ghost, "field ghost width differs from plan");
    for (const Op& op : m_ops) {
      const GridArray<D>& src = f[op.m_src];
      GridArray<D>& dst = f[op.m_dst];
      for (int c = 0; c < f.ncomp(); ++c)
        for (BoxIter<D> it(op.m_dstRegion); it.ok(); ++it)
          dst(*it, c) = src(*it + op.m_offset, c);
    }
  }

  int nops() const { return static_cast<int>(m_ops.size()); }

private:
  struct Op {
    int m_src = 0;
    int m_dst = 0;
    Box<D> m_dstRegion;   // ghost cells of dst being written
    IndexVec<D> m_offset; // source index = dst index + offset
  };

  IndexVec<D> m_ghost{};
  std::vector<Op> m_ops;
};

} // namespace hommb
