#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qflag/arith.hpp"
#include "qflag/error.hpp"
#include "qflag/quiver.hpp"
#include "qflag/schur.hpp"

namespace qflag {

/// Dense coefficient vector over the tower monomial basis.
using CohClass = std::vector<Rational>;

/// Cohomology of a toric quiver flag variety presented as an iterated
/// projective bundle: one variable per non-source vertex, relation
/// prod_{a: t(a)=v} (xi_v - xi_{s(a)}) = 0 for each v, xi_source = 0.
class TowerRing {
 public:
  explicit TowerRing(const Quiver& qab) : quiver_(qab) {
    if (!qab.is_toric()) throw Error(ErrorCode::NotAbelian, "tower ring needs all ranks equal to 1");
    const int n = qab.picard_rank();
    size_ = 1;
    for (int v = 1; v <= n; ++v) {
      degrees_.push_back(qab.incoming_rank(v));
      strides_.push_back(size_);
      size_ *= static_cast<std::size_t>(degrees_.back());
      top_degree_ += degrees_.back() - 1;
    }
    maps_.resize(n);
    for (int v = 0; v < n; ++v) build_map(v);
  }

  int variables() const { return static_cast<int>(degrees_.size()); }
  std::size_t basis_size() const { return size_; }
  int top_degree() const { return top_degree_; }
  /// s_v: the exponent bound of variable v.
  const std::vector<int>& relation_degrees() const { return degrees_; }
  const Quiver& quiver() const { return quiver_; }

  std::vector<int> exponents(std::size_t index) const {
    std::vector<int> e(degrees_.size());
    for (std::size_t v = 0; v < degrees_.size(); ++v) {
      e[v] = static_cast<int>(index % degrees_[v]);
      index /= degrees_[v];
    }
    return e;
  }

  std::size_t index(const std::vector<int>& e) const {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < degrees_.size(); ++v) idx += e[v] * strides_[v];
    return idx;
  }

  CohClass zero() const { return CohClass(size_, Rational(0)); }

  CohClass one() const {
    CohClass c = zero();
    c[0] = 1;
    return c;
  }

  CohClass times_variable(const CohClass& c, int v) const {
    CohClass out = zero();
    for (std::size_t m = 0; m < size_; ++m) {
      if (c[m] == 0) continue;
      for (const auto& [idx, coef] : maps_[v][m]) out[idx] += c[m] * coef;
    }
    return out;
  }

  /// c times sum_v form[v] xi_v.
  CohClass times_linear(const CohClass& c, const IntVec& form) const {
    CohClass out = zero();
    for (int v = 0; v < variables(); ++v) {
      if (form[v] == 0) continue;
      const Rational f(static_cast<long>(form[v]));
      for (std::size_t m = 0; m < size_; ++m) {
        if (c[m] == 0) continue;
        const Rational cm = c[m] * f;
        for (const auto& [idx, coef] : maps_[v][m]) out[idx] += cm * coef;
      }
    }
    return out;
  }

  CohClass monomial(const std::vector<int>& e) const {
    CohClass c = one();
    for (int v = 0; v < variables(); ++v) {
      for (int k = 0; k < e[v]; ++k) c = times_variable(c, v);
    }
    return c;
  }

  CohClass multiply(const CohClass& a, const CohClass& b) const {
    CohClass out = zero();
    for (std::size_t m = 0; m < size_; ++m) {
      if (b[m] == 0) continue;
      CohClass t = a;
      const auto e = exponents(m);
      for (int v = 0; v < variables(); ++v) {
        for (int k = 0; k < e[v]; ++k) t = times_variable(t, v);
      }
      for (std::size_t i = 0; i < size_; ++i) {
        if (t[i] != 0) out[i] += b[m] * t[i];
      }
    }
    return out;
  }

  /// Coefficient of the top monomial prod xi_v^{s_v - 1}.
  Rational integrate(const CohClass& c) const { return c[size_ - 1]; }

  /// Image under the automorphism exchanging xi_a and xi_b (s_a = s_b).
  CohClass swap_variables(const CohClass& c, int a, int b) const {
    CohClass out = zero();
    for (std::size_t m = 0; m < size_; ++m) {
      if (c[m] == 0) continue;
      auto e = exponents(m);
      std::swap(e[a], e[b]);
      out[index(e)] = c[m];
    }
    return out;
  }

 private:
  using Sparse = std::vector<std::pair<std::size_t, Rational>>;

  static Sparse to_sparse(const CohClass& c) {
    Sparse s;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] != 0) s.emplace_back(i, c[i]);
    }
    return s;
  }

  // Multiplication by xi_v on every basis monomial; reduces xi_v^{s_v}
  // through the relation, whose lower coefficients only involve variables
  // already handled.
  void build_map(int v) {
    const int vertex = v + 1;
    const int s = degrees_[v];
    std::vector<CohClass> poly{one()};  // coefficients in xi_v, low to high
    for (int u = 0; u < vertex; ++u) {
      for (int a = 0; a < quiver_.arrows(u, vertex); ++a) {
        std::vector<CohClass> next(poly.size() + 1, zero());
        for (std::size_t k = 0; k < poly.size(); ++k) {
          for (std::size_t i = 0; i < size_; ++i) next[k + 1][i] += poly[k][i];
          if (u == 0) continue;
          CohClass t = times_variable(poly[k], u - 1);
          for (std::size_t i = 0; i < size_; ++i) next[k][i] -= t[i];
        }
        poly = std::move(next);
      }
    }

    maps_[v].resize(size_);
    for (std::size_t m = 0; m < size_; ++m) {
      auto e = exponents(m);
      if (e[v] + 1 < s) {
        maps_[v][m] = {{m + strides_[v], Rational(1)}};
        continue;
      }
      CohClass out = zero();
      for (int k = 0; k < s; ++k) {
        if (std::all_of(poly[k].begin(), poly[k].end(), [](const Rational& x) { return x == 0; })) continue;
        e[v] = k;
        const std::size_t base = index(e);
        for (std::size_t t = 0; t < size_; ++t) {
          if (poly[k][t] == 0) continue;
          // poly[k] only involves variables below v.
          CohClass prod = zero();
          prod[base] = 1;
          const auto f = exponents(t);
          for (int u = 0; u < v; ++u) {
            for (int r = 0; r < f[u]; ++r) prod = times_variable(prod, u);
          }
          for (std::size_t i = 0; i < size_; ++i) {
            if (prod[i] != 0) out[i] -= poly[k][t] * prod[i];
          }
        }
      }
      maps_[v][m] = to_sparse(out);
    }
  }

  Quiver quiver_;
  std::vector<int> degrees_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
  int top_degree_ = 0;
  std::vector<std::vector<Sparse>> maps_;
};

inline TowerRing tower_ring(const Quiver& qab) { return TowerRing(qab); }

/// Weyl class prod_i prod_{j != k} (xi_ik - xi_ij).
inline CohClass weyl_class(const Quiver& q, const Abelianization& ab, const TowerRing& ring) {
  CohClass e = ring.one();
  for (int i = 1; i < q.size(); ++i) {
    for (int j = 0; j < q.rank(i); ++j) {
      for (int k = 0; k < q.rank(i); ++k) {
        if (j == k) continue;
        IntVec form(ring.variables(), 0);
        form[ab.first[i] + k - 1] += 1;
        form[ab.first[i] + j - 1] -= 1;
        e = ring.times_linear(e, form);
      }
    }
  }
  return e;
}

/// Everything needed to integrate lifted classes over M(Q, r).
class MartinContext {
 public:
  explicit MartinContext(const Quiver& q)
      : quiver_(q), ab_(abelianize(q)), ring_(ab_.quiver), weyl_(weyl_class(q, ab_, ring_)), order_(1) {
    for (int i = 1; i < q.size(); ++i) order_ *= factorial(q.rank(i));
  }

  const Quiver& quiver() const { return quiver_; }
  const Abelianization& abelianization() const { return ab_; }
  const TowerRing& ring() const { return ring_; }
  const CohClass& weyl() const { return weyl_; }
  const Rational& weyl_order() const { return order_; }

  bool is_symmetric(const CohClass& lifted) const {
    for (int i = 1; i < quiver_.size(); ++i) {
      for (int j = 0; j + 1 < quiver_.rank(i); ++j) {
        const int a = ab_.first[i] + j - 1;
        if (ring_.swap_variables(lifted, a, a + 1) != lifted) return false;
      }
    }
    return true;
  }

  /// (1/|W|) integral over M^ab of lifted times e.
  Rational integrate(const CohClass& lifted) const {
    if (!is_symmetric(lifted)) throw Error(ErrorCode::NotSymmetric, "lifted class is not Weyl invariant");
    return ring_.integrate(ring_.multiply(lifted, weyl_)) / order_;
  }

 private:
  Quiver quiver_;
  Abelianization ab_;
  TowerRing ring_;
  CohClass weyl_;
  Rational order_;
};

inline Rational martin_integrate(const Quiver& q, const CohClass& lifted) { return MartinContext(q).integrate(lifted); }

/// Signed Chern-root data of T_X = T_M - E on the Abelianization.
struct RootData {
  std::vector<IntVec> positive;  // arrow classes xi_t - xi_s
  std::vector<IntVec> negative;  // block classes xi_ik - xi_ij, including j = k
  std::vector<IntVec> bundle;
  IntVec anticanonical_lift;
};

inline RootData root_data(const Quiver& q, const BundleSpec& e) {
  const Abelianization ab = abelianize(q);
  const Quiver& qa = ab.quiver;
  const int vars = ab.variables();
  RootData rd;
  for (int u = 0; u < qa.size(); ++u) {
    for (int v = u + 1; v < qa.size(); ++v) {
      for (int k = 0; k < qa.arrows(u, v); ++k) {
        IntVec d(vars, 0);
        d[v - 1] += 1;
        if (u > 0) d[u - 1] -= 1;
        rd.positive.push_back(std::move(d));
      }
    }
  }
  for (int i = 1; i < q.size(); ++i) {
    for (int j = 0; j < q.rank(i); ++j) {
      for (int k = 0; k < q.rank(i); ++k) {
        IntVec d(vars, 0);
        d[ab.first[i] + k - 1] += 1;
        d[ab.first[i] + j - 1] -= 1;
        rd.negative.push_back(std::move(d));
      }
    }
  }
  rd.bundle = bundle_roots(e, q);
  rd.anticanonical_lift = IntVec(vars, 0);
  for (const auto& d : rd.positive) rd.anticanonical_lift = add(rd.anticanonical_lift, d);
  for (const auto& d : rd.negative) rd.anticanonical_lift = sub(rd.anticanonical_lift, d);
  for (const auto& d : rd.bundle) rd.anticanonical_lift = sub(rd.anticanonical_lift, d);
  return rd;
}

/// Power series coefficients f_0..f_n of one-root characteristic classes.
namespace series {

inline std::vector<Rational> chern(int n, bool inverse) {
  std::vector<Rational> f(n + 1, Rational(0));
  f[0] = 1;
  if (inverse) {
    for (int k = 1; k <= n; ++k) f[k] = (k % 2 ? -1 : 1);
  } else if (n >= 1) {
    f[1] = 1;
  }
  return f;
}

inline std::vector<Rational> invert(const std::vector<Rational>& g) {
  const std::size_t n = g.size();
  std::vector<Rational> f(n, Rational(0));
  f[0] = 1 / g[0];
  for (std::size_t k = 1; k < n; ++k) {
    Rational s = 0;
    for (std::size_t j = 1; j <= k; ++j) s += g[j] * f[k - j];
    f[k] = -s / g[0];
  }
  return f;
}

/// x / (1 - e^{-x}), or its reciprocal.
inline std::vector<Rational> todd(int n, bool inverse) {
  std::vector<Rational> g(n + 1);
  for (int k = 0; k <= n; ++k) g[k] = Rational(k % 2 ? -1 : 1) / factorial(k + 1);
  return inverse ? g : invert(g);
}

inline std::vector<Rational> exponential(int n, std::int64_t scale) {
  std::vector<Rational> f(n + 1);
  Rational p = 1;
  for (int k = 0; k <= n; ++k) {
    f[k] = p / factorial(k);
    p *= static_cast<long>(scale);
  }
  return f;
}

}  // namespace series

/// c times f(x) for the linear form x, by Horner's rule.
inline CohClass apply_series(const TowerRing& ring, const CohClass& c, const std::vector<Rational>& f, const IntVec& x) {
  if (is_zero(x)) {
    CohClass out = c;
    for (auto& v : out) v *= f[0];
    return out;
  }
  CohClass acc = c;
  const std::size_t n = f.size() - 1;
  for (auto& v : acc) v *= f[n];
  for (std::size_t k = n; k-- > 0;) {
    acc = ring.times_linear(acc, x);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (c[i] != 0) acc[i] += f[k] * c[i];
    }
  }
  return acc;
}

enum class SeriesKind { Chern, Todd, Character };

/// Multiplicative class of T_M - E: arrow roots enter with exponent +1,
/// block and bundle roots with -1. Character is exp(k c_1) of the lifted
/// anticanonical class.
inline CohClass series_from_roots(const TowerRing& ring, const RootData& rd, SeriesKind kind, int cutoff,
                                  std::int64_t k = 1) {
  CohClass c = ring.one();
  if (kind == SeriesKind::Character) return apply_series(ring, c, series::exponential(cutoff, k), rd.anticanonical_lift);
  const auto pos = kind == SeriesKind::Chern ? series::chern(cutoff, false) : series::todd(cutoff, false);
  const auto neg = kind == SeriesKind::Chern ? series::chern(cutoff, true) : series::todd(cutoff, true);
  for (const auto& x : rd.positive) c = apply_series(ring, c, pos, x);
  for (const auto& x : rd.negative) {
    if (!is_zero(x)) c = apply_series(ring, c, neg, x);
  }
  for (const auto& x : rd.bundle) c = apply_series(ring, c, neg, x);
  return c;
}

struct ZeroLocusInvariants {
  int dimension = 0;
  Rational degree;
  Rational euler;
  Rational chi_O;
  /// chi(-K), chi(-2K).
  std::vector<Rational> hilbert;
};

inline ZeroLocusInvariants zero_locus_invariants(const Quiver& q, const BundleSpec& e,
                                                 std::optional<int> target_dim = std::nullopt) {
  check_bundle(e, q);
  const int dim_m = q.dimension();
  const auto rank = bundle_rank(e, q);
  if (rank > dim_m) throw Error(ErrorCode::WrongRank, "bundle rank exceeds the ambient dimension");
  const int dim_x = dim_m - static_cast<int>(rank);
  if (target_dim && *target_dim != dim_x) {
    throw Error(ErrorCode::WrongRank, "bundle rank " + std::to_string(rank) + " gives dimension " +
                                          std::to_string(dim_x) + ", expected " + std::to_string(*target_dim));
  }
  const MartinContext ctx(q);
  const TowerRing& ring = ctx.ring();
  const RootData rd = root_data(q, e);
  const int cutoff = ring.top_degree();

  CohClass euler_class = ring.one();
  for (const auto& d : rd.bundle) euler_class = ring.times_linear(euler_class, d);

  ZeroLocusInvariants inv;
  inv.dimension = dim_x;
  CohClass power = euler_class;
  for (int k = 0; k < dim_x; ++k) power = ring.times_linear(power, rd.anticanonical_lift);
  inv.degree = ctx.integrate(power);
  inv.euler = ctx.integrate(ring.multiply(euler_class, series_from_roots(ring, rd, SeriesKind::Chern, cutoff)));
  const CohClass td = ring.multiply(euler_class, series_from_roots(ring, rd, SeriesKind::Todd, cutoff));
  inv.chi_O = ctx.integrate(td);
  for (int k = 1; k <= 2; ++k) {
    inv.hilbert.push_back(ctx.integrate(apply_series(ring, td, series::exponential(cutoff, k), rd.anticanonical_lift)));
  }
  if (!is_integer(inv.chi_O)) {
    throw Error(ErrorCode::NonIntegerCharacteristic, "chi(O) = " + to_string(inv.chi_O));
  }
  for (const auto& h : inv.hilbert) {
    if (!is_integer(h)) throw Error(ErrorCode::NonIntegerCharacteristic, "Hilbert coefficient " + to_string(h));
  }
  return inv;
}

}  // namespace qflag
