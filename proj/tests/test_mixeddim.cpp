#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "hommb/mixeddim.hpp"

using namespace hommb;

namespace {

double cellval(const IndexVec<4>& i) {
  return 0.5 + 0.013 * i[0] + 0.37 * i[1] - 0.11 * i[2] + 0.052 * i[3] +
         0.001 * i[0] * i[3];
}

MultiBlockDomain<4> domain4(int n) {
  MultiBlockDomain<4> dom;
  dom.add_block(Box<4>(IndexVec<4>::zero(), IndexVec<4>::uniform(n - 1)));
  dom.validate();
  return dom;
}

PatchField<4> filled_field(const DisjointLayout<4>& layout) {
  PatchField<4> f(layout, 0, Centering::cell(), 1, 0.0);
  for (int p = 0; p < f.npatches(); ++p)
    for (BoxIter<4> it(layout.patch(p).m_box); it.ok(); ++it)
      f[p](*it) = cellval(*it);
  return f;
}

// the four decompositions the acceptance sweep pins: 1, 2, 4, 8 patches
std::vector<IndexVec<4>> patch_sweeps(int n) {
  return {IndexVec<4>{n, n, n, n}, IndexVec<4>{n / 2, n, n, n},
          IndexVec<4>{n / 2, n / 2, n, n}, IndexVec<4>{n / 2, n / 2, n / 2, n}};
}

} // namespace

TEST_CASE("embed and project invert each other") {
  SliceSpec<4, 2> spec;
  spec.m_axes = {1, 3};
  spec.m_fixed = {5, -2};
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> coord(-10, 10);
  for (int t = 0; t < 100; ++t) {
    const IndexVec<2> j{coord(rng), coord(rng)};
    const IndexVec<4> i = spec.embed(j);
    CHECK(i[1] == 5);
    CHECK(i[3] == -2);
    CHECK(spec.project(i) == j);
  }
  CHECK(spec.retained() == std::array<int, 2>{0, 2});
}

TEST_CASE("slice reads out the pinned plane") {
  const int n = 6;
  Box<4> b(IndexVec<4>::zero(), IndexVec<4>::uniform(n - 1));
  GridArray<4> u(b, 0, Centering::cell(), 1);
  for (BoxIter<4> it(b); it.ok(); ++it) u(*it) = 1.0;
  SliceSpec<4, 2> spec;
  spec.m_axes = {2, 3};
  spec.m_fixed = {3, 4};
  GridArray<2> s = slice_array(u, spec);
  for (BoxIter<2> it(s.valid_box()); it.ok(); ++it) CHECK(s(*it) == 1.0);

  // f(i) = i2 sliced at i2 = 3 reads back 3 everywhere
  for (BoxIter<4> it(b); it.ok(); ++it) u(*it) = (*it)[2];
  s = slice_array(u, spec);
  CHECK(s.valid_box() == Box<2>(IndexVec<2>{0, 0}, IndexVec<2>{n - 1, n - 1}));
  for (BoxIter<2> it(s.valid_box()); it.ok(); ++it) CHECK(s(*it) == 3.0);

  SliceSpec<4, 2> bad = spec;
  bad.m_fixed = {n, 0};
  CHECK_THROWS_AS(slice_array(u, bad), ValidationError);
}

TEST_CASE("slice handles face centerings") {
  Box<2> b(IndexVec<2>{0, 0}, IndexVec<2>{7, 7});
  GridArray<2> u(b, 0, Centering::face(1), 1);
  for (BoxIter<2> it(u.storage_box()); it.ok(); ++it)
    u(*it) = 10.0 * (*it)[0] + (*it)[1];

  // retained face axis keeps its face role under the new numbering
  SliceSpec<2, 1> dropX;
  dropX.m_axes = {0};
  dropX.m_fixed = {3};
  GridArray<1> sx = slice_array(u, dropX);
  CHECK(sx.centering() == Centering::face(0));
  CHECK(sx.storage_box() == Box<1>(IndexVec<1>{0}, IndexVec<1>{8}));
  for (BoxIter<1> it(sx.storage_box()); it.ok(); ++it)
    CHECK(sx(*it) == 30.0 + (*it)[0]);

  // slicing along the face axis takes a face index, up to hi + 1
  SliceSpec<2, 1> dropY;
  dropY.m_axes = {1};
  dropY.m_fixed = {8};
  GridArray<1> sy = slice_array(u, dropY);
  CHECK(sy.centering() == Centering::cell());
  for (BoxIter<1> it(sy.valid_box()); it.ok(); ++it)
    CHECK(sy(*it) == 10.0 * (*it)[0] + 8.0);
  dropY.m_fixed = {9};
  CHECK_THROWS_AS(slice_array(u, dropY), ValidationError);
}

TEST_CASE("inject round trips and is supported on the plane") {
  Box<4> b(IndexVec<4>::zero(), IndexVec<4>::uniform(5));
  SliceSpec<4, 2> spec;
  spec.m_axes = {1, 2};
  spec.m_fixed = {2, 5};
  Box<2> lb = spec.project_box(b);
  GridArray<2> u(lb, 0, Centering::cell(), 1);
  double total = 0.0;
  for (BoxIter<2> it(lb); it.ok(); ++it) {
    u(*it) = std::sin(1.0 + (*it)[0]) + 0.3 * (*it)[1];
    total += u(*it);
  }
  GridArray<4> big = inject_array(u, spec, b);
  GridArray<2> back = slice_array(big, spec);
  for (BoxIter<2> it(lb); it.ok(); ++it) CHECK(back(*it) == u(*it));

  double bigTotal = 0.0;
  for (BoxIter<4> it(b); it.ok(); ++it) {
    if ((*it)[1] != 2 || (*it)[2] != 5) CHECK(big(*it) == 0.0);
    bigTotal += big(*it);
  }
  CHECK(bigTotal == Catch::Approx(total).epsilon(1e-14));

  GridArray<2> wrong(grow(lb, 1), 0, Centering::cell(), 1, 0.0);
  CHECK_THROWS_AS(inject_array(wrong, spec, b), ValidationError);
}

TEST_CASE("spread is constant along removed axes") {
  Box<4> b(IndexVec<4>::zero(), IndexVec<4>::uniform(5));
  SliceSpec<4, 2> spec;
  spec.m_axes = {2, 3};
  spec.m_fixed = {0, 0};
  Box<2> lb = spec.project_box(b);
  GridArray<2> u(lb, 0, Centering::cell(), 1);
  for (BoxIter<2> it(lb); it.ok(); ++it)
    u(*it) = std::cos(0.9 * (*it)[0] - 0.2 * (*it)[1]);
  GridArray<4> big = spread_array(u, spec, b);
  for (BoxIter<4> it(b); it.ok(); ++it)
    CHECK(big(*it) == u(spec.project(*it)));

  // slicing the spread at any fixed indices returns u exactly
  for (int f2 : {0, 3, 5})
    for (int f3 : {1, 4}) {
      SliceSpec<4, 2> at = spec;
      at.m_fixed = {f2, f3};
      GridArray<2> back = slice_array(big, at);
      for (BoxIter<2> it(lb); it.ok(); ++it) CHECK(back(*it) == u(*it));
    }

  GridArray<4> cbig = spread_array(
      [&] {
        GridArray<2> c(lb, 0, Centering::cell(), 1, 2.25);
        return c;
      }(),
      spec, b);
  for (BoxIter<4> it(b); it.ok(); ++it) CHECK(cbig(*it) == 2.25);
}

TEST_CASE("reduce_integrate sums cell averages exactly") {
  // unit measure: 8x8 velocity cells, h = 1/8, phi = 1 -> exactly 1.0
  Box<4> b(IndexVec<4>::zero(),
           IndexVec<4>{3, 3, 7, 7});
  GridArray<4> phi(b, 0, Centering::cell(), 1, 1.0);
  const std::array<int, 2> axes{2, 3};
  GridArray<2> r = reduce_integrate_array(phi, axes, (1.0 / 8) * (1.0 / 8));
  for (BoxIter<2> it(r.valid_box()); it.ok(); ++it) CHECK(r(*it) == 1.0);

  // separable field: bitwise match with a plain nested-loop sum
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> val(0.5, 1.5);
  for (BoxIter<4> it(b); it.ok(); ++it)
    phi(*it) = val(rng);
  const double h2 = 0.17 * 0.08;
  r = reduce_integrate_array(phi, axes, h2);
  for (int j1 = 0; j1 <= 3; ++j1)
    for (int j0 = 0; j0 <= 3; ++j0) {
      double acc = 0.0;
      for (int i3 = 0; i3 <= 7; ++i3)
        for (int i2 = 0; i2 <= 7; ++i2)
          acc += phi(IndexVec<4>{j0, j1, i2, i3});
      CHECK(r(IndexVec<2>{j0, j1}) == acc * h2);
    }
}

TEST_CASE("layout-level ops are bitwise decomposition independent") {
  const int n = 8;
  MultiBlockDomain<4> dom = domain4(n);
  SliceSpec<4, 2> spec;
  spec.m_axes = {2, 3};
  spec.m_fixed = {3, 4};
  const std::array<int, 2> axes{2, 3};

  std::vector<GridArray<2>> slices, reduces;
  std::vector<GridArray<4>> spreads, injects;
  int patchCounts[4] = {1, 2, 4, 8};
  int sweepIdx = 0;
  for (const IndexVec<4>& mp : patch_sweeps(n)) {
    DisjointLayout<4> layout = decompose(dom, mp, 3);
    REQUIRE(layout.npatches() == patchCounts[sweepIdx++]);
    PatchField<4> f = filled_field(layout);

    slices.push_back(std::move(slice(f, spec)[0]));
    reduces.push_back(std::move(reduce_integrate(f, axes, 0.31)[0]));

    // lower-dimensional payload spread and injected back over this layout
    GridArray<2> low(spec.project_box(dom.block_box(0)), 0, Centering::cell(), 1);
    for (BoxIter<2> it(low.valid_box()); it.ok(); ++it)
      low(*it) = std::exp(0.05 * (*it)[0]) - 0.4 * (*it)[1];
    std::vector<GridArray<2>> perBlock;
    perBlock.push_back(low);
    PatchField<4> outS(layout, 0, Centering::cell(), 1, 0.0);
    spread(perBlock, spec, outS);
    spreads.push_back(outS.assemble(0));
    PatchField<4> outI(layout, 0, Centering::cell(), 1, 0.0);
    inject(perBlock, spec, outI);
    injects.push_back(outI.assemble(0));
  }
  for (size_t k = 1; k < slices.size(); ++k) {
    for (BoxIter<2> it(slices[0].valid_box()); it.ok(); ++it) {
      CHECK(slices[k](*it) == slices[0](*it));
      CHECK(reduces[k](*it) == reduces[0](*it));
    }
    for (BoxIter<4> it(spreads[0].valid_box()); it.ok(); ++it) {
      CHECK(spreads[k](*it) == spreads[0](*it));
      CHECK(injects[k](*it) == injects[0](*it));
    }
  }
}

TEST_CASE("phase step leaves the moment alone for a zero source") {
  const int n = 8;
  PhaseState st;
  Box<4> b4(IndexVec<4>::zero(), IndexVec<4>::uniform(n - 1));
  st.m_phi = GridArray<4>(b4, 0, Centering::cell(), 1);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> val(0.5, 1.5);
  for (BoxIter<4> it(b4); it.ok(); ++it) st.m_phi(*it) = val(rng);
  st.m_h = RealVec<4>{1.0 / n, 1.0 / n, 2.0 / n, 2.0 / n};
  st.m_dt = 0.37;
  const std::array<int, 2> axes{2, 3};
  st.m_phix = reduce_integrate_array(st.m_phi, axes, st.m_h[2] * st.m_h[3]);
  st.m_sx = GridArray<2>(st.m_phix.valid_box(), 0, Centering::cell(), 1, 0.0);

  PhaseState next = phase_demo_step(st, [](double, double) { return 0.0; });
  for (BoxIter<2> it(st.m_phix.valid_box()); it.ok(); ++it) {
    CHECK(next.m_phix(*it) == st.m_phix(*it));
    CHECK(next.m_sx(*it) == 0.0);
  }
}

TEST_CASE("constant source adds dt times the velocity-domain measure") {
  const int n = 16;
  PhaseState st;
  Box<4> b4(IndexVec<4>::zero(), IndexVec<4>::uniform(n - 1));
  st.m_phi = GridArray<4>(b4, 0, Centering::cell(), 1, 1.0);
  st.m_h = RealVec<4>{1.0 / n, 1.0 / n, 1.0 / n, 1.0 / n}; // |Omega_vel| = 1
  st.m_dt = 0.5;
  const std::array<int, 2> axes{2, 3};
  st.m_phix = reduce_integrate_array(st.m_phi, axes, st.m_h[2] * st.m_h[3]);
  st.m_sx = GridArray<2>(st.m_phix.valid_box(), 0, Centering::cell(), 1, 0.0);

  const double c = 0.75;
  PhaseState next = phase_demo_step(st, [=](double, double) { return c; });
  for (BoxIter<2> it(st.m_phix.valid_box()); it.ok(); ++it)
    CHECK(next.m_phix(*it) == st.m_phix(*it) + 0.5 * c); // dt*c*|Omega_vel|
}

TEST_CASE("phase step matches the brute-force 4D oracle") {
  const int n = 16;
  Box<4> b4(IndexVec<4>::zero(), IndexVec<4>::uniform(n - 1));
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> val(0.5, 1.5), coef(-1.0, 1.0);
  const std::array<int, 2> axes{2, 3};

  for (int trial = 0; trial < 50; ++trial) {
    PhaseState st;
    st.m_phi = GridArray<4>(b4, 0, Centering::cell(), 1);
    for (BoxIter<4> it(b4); it.ok(); ++it) st.m_phi(*it) = val(rng);
    st.m_h = RealVec<4>{val(rng) / n, val(rng) / n, val(rng) / n, val(rng) / n};
    st.m_dt = val(rng);
    st.m_phix = reduce_integrate_array(st.m_phi, axes, st.m_h[2] * st.m_h[3]);
    st.m_sx = GridArray<2>(st.m_phix.valid_box(), 0, Centering::cell(), 1, 0.0);
    const double a = coef(rng), bc = coef(rng), cc = coef(rng);
    auto f = [=](double u, double v) {
      return a + bc * std::sin(u + 0.3) * std::cos(v) + cc * u * v;
    };

    PhaseState next = phase_demo_step(st, f);

    // independent implementation: one flat array, plain nested loops
    std::vector<double> flat(static_cast<size_t>(n) * n * n * n);
    for (int i3 = 0; i3 < n; ++i3)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i1 = 0; i1 < n; ++i1)
          for (int i0 = 0; i0 < n; ++i0)
            flat[static_cast<size_t>(((i3 * n + i2) * n + i1) * n + i0)] =
                st.m_phi(IndexVec<4>{i0, i1, i2, i3});
    const double meas = st.m_h[2] * st.m_h[3];
    for (int i1 = 0; i1 < n; ++i1)
      for (int i0 = 0; i0 < n; ++i0) {
        double sx = 0.0, px = 0.0;
        for (int i3 = 0; i3 < n; ++i3)
          for (int i2 = 0; i2 < n; ++i2) {
            sx += f((i2 + 0.5) * st.m_h[2], (i3 + 0.5) * st.m_h[3]);
            px += flat[static_cast<size_t>(((i3 * n + i2) * n + i1) * n + i0)];
          }
        const double expect = px * meas + st.m_dt * sx * meas;
        const double got = next.m_phix(IndexVec<2>{i0, i1});
        CHECK(std::abs(got - expect) <= 1e-14 * (1.0 + std::abs(expect)));
      }
  }
}
