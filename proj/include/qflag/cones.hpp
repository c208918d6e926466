#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "qflag/arith.hpp"
#include "qflag/error.hpp"
#include "qflag/quiver.hpp"

namespace qflag {

/// Cone given by inequalities h . x >= 0, one row per h.
struct ConeH {
  IntMatrix inequalities;
  int dim = 0;
};

/// Cone given by primitive generating rays.
struct ConeV {
  IntMatrix rays;
  int dim = 0;
};

struct HilbertBasis {
  IntMatrix elements;
  ConeH cone;
};

inline bool contains(const ConeH& c, const IntVec& x) {
  for (const auto& h : c.inequalities) {
    if (dot(h, x) < 0) return false;
  }
  return true;
}

inline bool contains_strictly(const ConeH& c, const IntVec& x) {
  for (const auto& h : c.inequalities) {
    if (dot(h, x) <= 0) return false;
  }
  return true;
}

/// T_i for i = 1..rho (entry i-1), as sorted vertex lists.
inline std::vector<std::vector<int>> through_sets(const Quiver& q) {
  const int n = q.size();
  std::vector<std::vector<int>> sets;
  for (int i = 1; i < n; ++i) {
    std::vector<int> t{i};
    if (q.rank(i) == 1) {
      // Paths can always go around a vertex of rank > 1, but never around i.
      std::vector<char> reach(n, 0);
      reach[0] = 1;
      for (int v = 0; v < n; ++v) {
        if (!reach[v] || v == i) continue;
        for (int j = v + 1; j < n; ++j) {
          if (q.arrows(v, j) > 0) reach[j] = 1;
        }
      }
      for (int j = i + 1; j < n; ++j) {
        if (!reach[j]) t.push_back(j);
      }
    }
    sets.push_back(std::move(t));
  }
  return sets;
}

/// One inequality sum_{j in T_i} r_j a_j >= 0 per non-source vertex.
inline ConeH nef_cone(const Quiver& q) {
  ConeH c;
  c.dim = q.picard_rank();
  for (const auto& t : through_sets(q)) {
    IntVec row(c.dim, 0);
    for (int j : t) row[j - 1] = q.rank(j);
    c.inequalities.push_back(std::move(row));
  }
  return c;
}

inline bool is_nef(const Quiver& q, const DivisorClass& a) { return contains(nef_cone(q), a); }

/// Every listed functional is nonzero and valid on the nef cone, so interior
/// points are exactly those satisfying all of them strictly.
inline bool is_ample(const Quiver& q, const DivisorClass& a) { return contains_strictly(nef_cone(q), a); }

inline bool is_fano(const Quiver& q) { return is_ample(q, anticanonical(q)); }

namespace detail {

inline IntMatrix clean_rows(const IntMatrix& rows) {
  std::set<IntVec> seen;
  IntMatrix out;
  for (const auto& r : rows) {
    if (is_zero(r)) continue;
    IntVec p = primitive(r);
    if (seen.insert(p).second) out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<int> tight_rows(const IntMatrix& rows, std::size_t upto, const IntVec& x) {
  std::vector<int> t;
  for (std::size_t i = 0; i < upto; ++i) {
    if (dot(rows[i], x) == 0) t.push_back(static_cast<int>(i));
  }
  return t;
}

}  // namespace detail

/// Double description: extreme rays of {x : H x >= 0}.
inline ConeV cone_rays(const ConeH& c) {
  const int n = c.dim;
  IntMatrix rows = detail::clean_rows(c.inequalities);
  if (n == 0) return {{}, 0};
  if (matrix_rank(rows) < n) throw Error(ErrorCode::NotPointed, "inequalities have rank below the ambient dimension");

  // Put n independent rows first.
  IntMatrix basis, rest;
  for (const auto& r : rows) {
    IntMatrix trial = basis;
    trial.push_back(r);
    if (static_cast<int>(basis.size()) < n && matrix_rank(trial) == static_cast<int>(trial.size())) {
      basis = std::move(trial);
    } else {
      rest.push_back(r);
    }
  }
  IntMatrix ordered = basis;
  ordered.insert(ordered.end(), rest.begin(), rest.end());

  IntMatrix rays;
  for (int k = 0; k < n; ++k) {
    std::vector<Rational> e(n, Rational(0)), x;
    e[k] = 1;
    solve(basis, e, x);
    rays.push_back(primitive_from_rational(x));
  }

  for (std::size_t h = n; h < ordered.size(); ++h) {
    const IntVec& row = ordered[h];
    IntMatrix pos, neg, zero;
    for (const auto& r : rays) {
      const auto v = dot(row, r);
      (v > 0 ? pos : v < 0 ? neg : zero).push_back(r);
    }
    IntMatrix next = pos;
    next.insert(next.end(), zero.begin(), zero.end());
    for (const auto& p : pos) {
      const auto tp = detail::tight_rows(ordered, h, p);
      for (const auto& m : neg) {
        const auto tm = detail::tight_rows(ordered, h, m);
        IntMatrix tight;
        for (int idx : tp) {
          if (std::binary_search(tm.begin(), tm.end(), idx)) tight.push_back(ordered[idx]);
        }
        if (matrix_rank(tight) != n - 2) continue;
        IntVec combo = sub(scale(m, dot(row, p)), scale(p, dot(row, m)));
        next.push_back(primitive(combo));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    rays = std::move(next);
  }
  std::sort(rays.begin(), rays.end());
  if (matrix_rank(rays) < n) throw Error(ErrorCode::NotFullDimensional, "cone has empty interior");
  return {rays, n};
}

/// Facet normals of a full-dimensional pointed V-cone.
inline ConeH cone_facets(const ConeV& v) {
  ConeV dual = cone_rays(ConeH{v.rays, v.dim});
  return {dual.rays, v.dim};
}

/// Dual cone in the curve lattice: the Mori cone when c is a nef cone.
inline ConeH dual_cone(const ConeH& c) { return {cone_rays(c).rays, c.dim}; }

inline ConeH mori_cone(const Quiver& q) { return dual_cone(nef_cone(q)); }

namespace detail {

// All n-subsets of {0..m-1} in lex order.
inline void for_each_subset(int m, int n, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (n > m) return;
  while (true) {
    visit(idx);
    int k = n - 1;
    while (k >= 0 && idx[k] == m - n + k) --k;
    if (k < 0) return;
    ++idx[k];
    for (int j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Lattice points of the half-open parallelepiped spanned by the columns of
// g: the coset representatives G frac(G^{-1} x) of Z^n / G Z^n.
inline IntMatrix parallelepiped_points(const IntMatrix& gens) {
  const std::size_t n = gens.size();
  IntMatrix gt(n, IntVec(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) gt[i][j] = gens[j][i];
  }
  auto reduce = [&](const IntVec& x) {
    std::vector<Rational> b(n), lambda;
    for (std::size_t i = 0; i < n; ++i) b[i] = Rational(static_cast<long>(x[i]));
    solve(gt, b, lambda);
    std::vector<Rational> y(n, Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
      Integer fl;
      mpz_fdiv_q(fl.get_mpz_t(), lambda[j].get_num_mpz_t(), lambda[j].get_den_mpz_t());
      Rational frac = lambda[j] - Rational(fl);
      for (std::size_t i = 0; i < n; ++i) y[i] += frac * Rational(static_cast<long>(gens[j][i]));
    }
    IntVec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i].get_num().get_si();
    return out;
  };
  std::set<IntVec> seen{IntVec(n, 0)};
  std::vector<IntVec> frontier{IntVec(n, 0)};
  while (!frontier.empty()) {
    IntVec x = frontier.back();
    frontier.pop_back();
    for (std::size_t i = 0; i < n; ++i) {
      IntVec y = x;
      ++y[i];
      IntVec r = reduce(y);
      if (seen.insert(r).second) frontier.push_back(r);
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace detail

/// Minimal generating set of the lattice monoid of a pointed cone.
inline HilbertBasis hilbert_basis(const ConeH& c) {
  const ConeV v = cone_rays(c);
  const int n = c.dim;
  std::set<IntVec> candidates(v.rays.begin(), v.rays.end());
  detail::for_each_subset(static_cast<int>(v.rays.size()), n, [&](const std::vector<int>& idx) {
    IntMatrix gens;
    for (int k : idx) gens.push_back(v.rays[k]);
    if (matrix_rank(gens) < n) return;
    for (auto& p : detail::parallelepiped_points(gens)) {
      if (!is_zero(p)) candidates.insert(p);
    }
  });
  HilbertBasis hb;
  hb.cone = c;
  for (const auto& x : candidates) {
    bool irreducible = true;
    for (const auto& y : candidates) {
      if (y == x) continue;
      if (contains(c, sub(x, y))) {
        irreducible = false;
        break;
      }
    }
    if (irreducible) hb.elements.push_back(x);
  }
  return hb;
}

/// All lattice points v of c with omega . v <= bound, in lex order.
inline IntMatrix enumerate_lattice_slice(const ConeH& c, const IntVec& omega, std::int64_t bound) {
  const int n = c.dim;
  if (bound < 0) return {};
  const ConeV v = cone_rays(c);
  std::vector<Rational> lo(n, Rational(0)), hi(n, Rational(0));
  for (const auto& r : v.rays) {
    const auto w = dot(omega, r);
    if (w <= 0) {
      throw Error(ErrorCode::UnboundedSlice, "functional is not positive on ray (" + join(r) + ")");
    }
    for (int k = 0; k < n; ++k) {
      Rational vertex = Rational(static_cast<long>(bound)) * Rational(static_cast<long>(r[k])) / Rational(static_cast<long>(w));
      if (vertex < lo[k]) lo[k] = vertex;
      if (vertex > hi[k]) hi[k] = vertex;
    }
  }
  IntVec lower(n), upper(n);
  for (int k = 0; k < n; ++k) {
    Integer f, g;
    mpz_cdiv_q(f.get_mpz_t(), lo[k].get_num_mpz_t(), lo[k].get_den_mpz_t());
    mpz_fdiv_q(g.get_mpz_t(), hi[k].get_num_mpz_t(), hi[k].get_den_mpz_t());
    lower[k] = f.get_si();
    upper[k] = g.get_si();
  }

  // Suffix extremes for pruning: best attainable contribution of coords >= k.
  const auto& rows = c.inequalities;
  std::vector<IntVec> row_max(rows.size(), IntVec(n + 1, 0));
  IntVec omega_min(n + 1, 0);
  for (int k = n - 1; k >= 0; --k) {
    for (std::size_t h = 0; h < rows.size(); ++h) {
      row_max[h][k] = row_max[h][k + 1] + std::max(rows[h][k] * lower[k], rows[h][k] * upper[k]);
    }
    omega_min[k] = omega_min[k + 1] + std::min(omega[k] * lower[k], omega[k] * upper[k]);
  }

  IntMatrix out;
  IntVec x(n, 0);
  std::vector<std::int64_t> partial(rows.size(), 0);
  std::function<void(int, std::int64_t)> dfs = [&](int k, std::int64_t wsum) {
    if (wsum + omega_min[k] > bound) return;
    for (std::size_t h = 0; h < rows.size(); ++h) {
      if (partial[h] + row_max[h][k] < 0) return;
    }
    if (k == n) {
      out.push_back(x);
      return;
    }
    for (std::int64_t t = lower[k]; t <= upper[k]; ++t) {
      x[k] = t;
      for (std::size_t h = 0; h < rows.size(); ++h) partial[h] += rows[h][k] * t;
      dfs(k + 1, wsum + omega[k] * t);
      for (std::size_t h = 0; h < rows.size(); ++h) partial[h] -= rows[h][k] * t;
    }
    x[k] = 0;
  };
  dfs(0, 0);
  return out;
}

/// Every multiset of basis elements summing to x, as non-decreasing index
/// lists into hb.elements.
inline std::vector<std::vector<int>> decompose_over_hilbert_basis(const IntVec& x, const HilbertBasis& hb) {
  if (!contains(hb.cone, x)) throw Error(ErrorCode::NotInCone, "(" + join(x) + ") is not in the cone");
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  std::function<void(const IntVec&, int)> rec = [&](const IntVec& rem, int start) {
    if (is_zero(rem)) {
      out.push_back(current);
      return;
    }
    for (int k = start; k < static_cast<int>(hb.elements.size()); ++k) {
      IntVec next = sub(rem, hb.elements[k]);
      if (!contains(hb.cone, next)) continue;
      current.push_back(k);
      rec(next, k);
      current.pop_back();
    }
  };
  rec(x, 0);
  return out;
}

}  // namespace qflag
