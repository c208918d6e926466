#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"

using namespace qflag;

namespace {

// Membership in cone(rays) through its simplicial subcones.
bool in_ray_cone(const IntMatrix& rays, const IntVec& x) {
  const int n = static_cast<int>(x.size());
  std::vector<Rational> rhs;
  for (auto v : x) rhs.push_back(Rational(static_cast<long>(v)));
  bool found = false;
  detail::for_each_subset(static_cast<int>(rays.size()), n, [&](const std::vector<int>& idx) {
    if (found) return;
    IntMatrix b(n, IntVec(n));
    for (int c = 0; c < n; ++c) {
      for (int r = 0; r < n; ++r) b[r][c] = rays[idx[c]][r];
    }
    std::vector<Rational> lam;
    if (!solve(b, rhs, lam)) return;
    found = std::all_of(lam.begin(), lam.end(), [](const Rational& l) { return l >= 0; });
  });
  return found;
}

void for_box(int n, int b, const std::function<void(const IntVec&)>& visit) {
  IntVec x(n, -b);
  while (true) {
    visit(x);
    int k = 0;
    while (k < n && x[k] == b) x[k++] = -b;
    if (k == n) return;
    ++x[k];
  }
}

ConeH random_cone(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> coef(-3, 3), rows(n, n + 3);
  while (true) {
    ConeH c{{}, n};
    const int m = rows(rng);
    for (int k = 0; k < m; ++k) {
      IntVec h(n);
      for (auto& v : h) v = coef(rng);
      c.inequalities.push_back(h);
    }
    try {
      cone_rays(c);
      return c;
    } catch (const Error&) {
    }
  }
}

IntVec positive_functional(const ConeH& c) {
  IntVec w(c.dim, 0);
  for (const auto& h : c.inequalities) w = add(w, h);
  return w;
}

}  // namespace

TEST(Cones, RaysOfHalfPlaneExample) {
  const auto v = cone_rays(ConeH{{{1, 1}, {0, 1}}, 2});
  EXPECT_EQ(v.rays, (IntMatrix{{-1, 1}, {1, 0}}));
}

TEST(Cones, Errors) {
  EXPECT_THROW(cone_rays(ConeH{{{1, 0}}, 2}), Error);
  try {
    cone_rays(ConeH{{{1, 0}, {-1, 0}, {0, 1}}, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFullDimensional);
  }
  try {
    cone_rays(ConeH{{{1, 0}}, 2});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPointed);
  }
  const ConeH quadrant{{{1, 0}, {0, 1}}, 2};
  EXPECT_THROW(enumerate_lattice_slice(quadrant, {1, 0}, 3), Error);
  const auto hb = hilbert_basis(quadrant);
  EXPECT_THROW(decompose_over_hilbert_basis({-1, 0}, hb), Error);
}

TEST(Cones, RandomConesMatchRayDescription) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 2;
    const ConeH c = random_cone(rng, n);
    const auto v = cone_rays(c);
    for (const auto& r : v.rays) {
      EXPECT_TRUE(contains(c, r));
      EXPECT_EQ(content(r), 1);
      IntMatrix tight;
      for (const auto& h : c.inequalities) {
        if (dot(h, r) == 0) tight.push_back(h);
      }
      EXPECT_EQ(matrix_rank(tight), n - 1);
    }
    for_box(n, 3, [&](const IntVec& x) { EXPECT_EQ(contains(c, x), in_ray_cone(v.rays, x)); });
  }
}

TEST(Cones, DualityRoundTrip) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const ConeH c = random_cone(rng, 3);
    const ConeH back = cone_facets(cone_rays(c));
    for_box(3, 3, [&](const IntVec& x) { EXPECT_EQ(contains(c, x), contains(back, x)); });
  }
}

TEST(Cones, HilbertBasisKnownCone) {
  // rays (1,0) and (1,2)
  const ConeH c{{{0, 1}, {2, -1}}, 2};
  const auto hb = hilbert_basis(c);
  EXPECT_EQ(hb.elements, (IntMatrix{{1, 0}, {1, 1}, {1, 2}}));
}

TEST(Cones, HilbertBasisMatchesIrreducibilityScan) {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 2;
    const ConeH c = random_cone(rng, n);
    const auto rays = cone_rays(c).rays;
    const IntVec w = positive_functional(c);
    std::vector<std::int64_t> heights;
    std::int64_t big = 1;
    for (const auto& r : rays) {
      heights.push_back(dot(w, r));
      for (auto x : r) big = std::max<std::int64_t>(big, x < 0 ? -x : x);
    }
    std::sort(heights.rbegin(), heights.rend());
    std::int64_t top = 0;
    for (int k = 0; k < n && k < static_cast<int>(heights.size()); ++k) top += heights[k];
    if (top * big > 40) continue;
    std::vector<IntVec> slice;
    for_box(n, static_cast<int>(top * big), [&](const IntVec& x) {
      if (!is_zero(x) && contains(c, x) && dot(w, x) <= top) slice.push_back(x);
    });
    std::set<IntVec> members(slice.begin(), slice.end()), irreducible;
    for (const auto& x : slice) {
      bool split = false;
      for (const auto& y : slice) {
        if (dot(w, y) < dot(w, x) && members.count(sub(x, y))) {
          split = true;
          break;
        }
      }
      if (!split) irreducible.insert(x);
    }
    const auto hb = hilbert_basis(c);
    EXPECT_EQ(std::set<IntVec>(hb.elements.begin(), hb.elements.end()), irreducible) << "trial " << trial;
  }
}

TEST(Cones, SliceMatchesBoxScan) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const ConeH c = random_cone(rng, n);
    const IntVec w = positive_functional(c);
    const auto got = enumerate_lattice_slice(c, w, 4);
    IntMatrix want;
    for_box(n, 12, [&](const IntVec& x) {
      if (contains(c, x) && dot(w, x) <= 4) want.push_back(x);
    });
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want);
  }
}

TEST(Cones, DecompositionCountsMatchExhaustiveSearch) {
  const ConeH c{{{0, 1}, {2, -1}}, 2};
  const auto hb = hilbert_basis(c);
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; b <= 2 * a; ++b) {
      const IntVec x{a, b};
      int count = 0;
      for (int m0 = 0; m0 <= a; ++m0) {
        for (int m1 = 0; m1 <= a; ++m1) {
          for (int m2 = 0; m2 <= a; ++m2) {
            if (m0 + m1 + m2 == a && m1 + 2 * m2 == b) ++count;
          }
        }
      }
      const auto parts = decompose_over_hilbert_basis(x, hb);
      EXPECT_EQ(static_cast<int>(parts.size()), count) << a << "," << b;
      for (const auto& p : parts) {
        IntVec sum(2, 0);
        for (int k : p) sum = add(sum, hb.elements[k]);
        EXPECT_EQ(sum, x);
        EXPECT_TRUE(std::is_sorted(p.begin(), p.end()));
      }
    }
  }
}

TEST(Cones, NefConeOfProductAndGrassmannian) {
  const Quiver p1p3({{0, 2, 4}, {0, 0, 0}, {0, 0, 0}}, {1, 1, 1});
  EXPECT_EQ(nef_cone(p1p3).inequalities, (IntMatrix{{1, 0}, {0, 1}}));
  EXPECT_TRUE(is_fano(p1p3));
  EXPECT_TRUE(is_fano(grassmannian(4, 2)));
  // chain 0 -> 1 -> 2: every path to 2 passes 1
  const Quiver chain({{0, 2, 0}, {0, 0, 2}, {0, 0, 0}}, {1, 1, 1});
  EXPECT_EQ(through_sets(chain), (std::vector<std::vector<int>>{{1, 2}, {2}}));
  EXPECT_EQ(nef_cone(chain).inequalities, (IntMatrix{{1, 1}, {0, 1}}));
}

TEST(Cones, HigherRankVertexIsAlone) {
  const Quiver q({{0, 3, 0}, {0, 0, 3}, {0, 0, 0}}, {1, 2, 1});
  EXPECT_EQ(through_sets(q), (std::vector<std::vector<int>>{{1}, {2}}));
  EXPECT_EQ(nef_cone(q).inequalities, (IntMatrix{{2, 0}, {0, 1}}));
}

TEST(Cones, NefConeMatchesToricGitChambers) {
  int checked = 0;
  for (const auto& [raw, q] : enumerate_quivers(4)) {
    if (!q.is_toric() || q.size() > 5) continue;
    const oracle::ToricGitNef git(q);
    const auto cone = nef_cone(q);
    for_box(q.picard_rank(), 2, [&](const IntVec& x) {
      EXPECT_EQ(contains(cone, x), git.contains(x)) << "quiver with " << q.size() << " vertices";
    });
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Cones, MoriConeIsDualToNef) {
  const Quiver chain({{0, 2, 0}, {0, 0, 2}, {0, 0, 0}}, {1, 1, 1});
  const auto mori = mori_cone(chain);
  const auto rays = cone_rays(nef_cone(chain)).rays;
  for (const auto& curve : cone_rays(mori).rays) {
    for (const auto& r : rays) EXPECT_GE(dot(curve, r), 0);
  }
}
