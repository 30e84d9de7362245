#ifndef HOMMB_CONVERGENCE_HPP
#define HOMMB_CONVERGENCE_HPP

#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "hommb/advect.hpp"
#include "hommb/csv.hpp"

namespace hommb {

/// Error norms split by region. L1 is volume weighted on the conserved
/// field; the max norms are scaled by <J> so they read in solution units.
struct ErrorNorms {
  double m_l1Interior = 0.0;
  double m_linfInterior = 0.0;
  double m_linfBoundary = 0.0;
};

/// Compare two states of the same operator.
///
/// Interior cells sit at least `band` cells from every block face; the band
/// must grow with resolution (callers use n/8) so it covers a fixed physical
/// margin. A fixed cell count would creep toward the walls under refinement
/// and the L1 order would absorb the steep near-wall error ramp.
/// Boundary cells sit within `wallBand` cells of a physical (non-seam) face;
/// that band stays a fixed cell count because it probes the wall closure.
inline ErrorNorms error_norms(const AdvectOp& op, const std::vector<GridArray<2>>& u,
                              const std::vector<GridArray<2>>& uref, int band,
                              int wallBand = 2) {
  const MultiBlockDomain<2>& dom = op.geometry().m_domain;
  ErrorNorms out;
  for (BlockId b = 0; b < dom.nblocks(); ++b) {
    const size_t sb = static_cast<size_t>(b);
    const Box<2> bx = dom.block_box(b);
    const MetricCache<2>& mc = op.metrics(b);
    const double meas = mc.cell_measure();
    for (BoxIter<2> it(bx); it.ok(); ++it) {
      const double err = std::abs(u[sb](*it) - uref[sb](*it));
      bool interior = true;
      bool nearWall = false;
      for (int d = 0; d < 2; ++d) {
        const int toLo = (*it)[d] - bx.lo()[d];
        const int toHi = bx.hi()[d] - (*it)[d];
        if (std::min(toLo, toHi) < band) interior = false;
        const int side = (toLo < toHi) ? 0 : 1;
        if (std::min(toLo, toHi) < wallBand &&
            dom.face(b, d, side).m_kind == FaceKind::PhysicalBoundary)
          nearWall = true;
      }
      const double errPhi = err / mc.m_Javg(*it);
      if (interior) {
        out.m_l1Interior += err * meas;
        out.m_linfInterior = std::max(out.m_linfInterior, errPhi);
      }
      if (nearWall) out.m_linfBoundary = std::max(out.m_linfBoundary, errPhi);
    }
  }
  return out;
}

struct ConvergenceRow {
  long m_n = 0;
  ErrorNorms m_norms;
  // observed orders against the previous row; NaN on the first row
  double m_orderL1 = std::numeric_limits<double>::quiet_NaN();
  double m_orderLinfBoundary = std::numeric_limits<double>::quiet_NaN();
};

/// Accumulates one row per resolution and derives observed orders from
/// successive rows: order = log(e_coarse / e_fine) / log(n_fine / n_coarse).
class ConvergenceReport {
public:
  void add(long n, const ErrorNorms& e) {
    ConvergenceRow r;
    r.m_n = n;
    r.m_norms = e;
    if (!m_rows.empty()) {
      const ConvergenceRow& p = m_rows.back();
      HOMMB_REQUIRE(n > p.m_n, "resolutions must increase");
      const double lr = std::log(static_cast<double>(n) / static_cast<double>(p.m_n));
      r.m_orderL1 = std::log(p.m_norms.m_l1Interior / e.m_l1Interior) / lr;
      r.m_orderLinfBoundary =
          std::log(p.m_norms.m_linfBoundary / e.m_linfBoundary) / lr;
    }
    m_rows.push_back(r);
  }

  const std::vector<ConvergenceRow>& rows() const { return m_rows; }

  void write_csv(std::ostream& out) const {
    CsvTable t({"N", "L1_interior", "Linf_interior", "Linf_boundary", "order_L1",
                "order_Linf_boundary"});
    for (const ConvergenceRow& r : m_rows) {
      t.add_row({CsvTable::num(r.m_n), CsvTable::num(r.m_norms.m_l1Interior),
                 CsvTable::num(r.m_norms.m_linfInterior),
                 CsvTable::num(r.m_norms.m_linfBoundary),
                 std::isnan(r.m_orderL1) ? "" : CsvTable::num(r.m_orderL1),
                 std::isnan(r.m_orderLinfBoundary)
                     ? ""
                     : CsvTable::num(r.m_orderLinfBoundary)});
    }
    t.write(out);
  }

private:
  std::vector<ConvergenceRow> m_rows;
};

} // namespace hommb

#endif
