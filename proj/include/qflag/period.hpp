#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qflag/arith.hpp"
#include "qflag/cohomology.hpp"
#include "qflag/cones.hpp"
#include "qflag/error.hpp"
#include "qflag/quiver.hpp"
#include "qflag/schur.hpp"

namespace qflag {

/// Polynomial in eps, low degree first.
using UnivariatePolynomial = std::vector<Rational>;

inline UnivariatePolynomial poly_multiply(const UnivariatePolynomial& a, const UnivariatePolynomial& b) {
  UnivariatePolynomial c(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

/// Rational function in eps kept fully factored over linear factors:
/// constant * prod (1 + c eps)^{e_c} * eps^{e_0}. Factors that cancel are
/// removed, so the representation is reduced.
class UnivariateRationalFunction {
 public:
  UnivariateRationalFunction() : constant_(1) {}
  explicit UnivariateRationalFunction(Rational c) : constant_(std::move(c)) {}

  bool is_zero() const { return constant_ == 0; }
  const Rational& constant() const { return constant_; }

  /// Multiplies by (a + b eps)^power.
  void multiply_linear(const Rational& a, const Rational& b, int power = 1) {
    if (power == 0 || constant_ == 0) return;
    if (a == 0 && b == 0) {
      if (power < 0) throw Error(ErrorCode::DegenerateSpecialization, "division by an identically zero factor");
      constant_ = 0;
      factors_.clear();
      return;
    }
    Key key;
    Rational lead;
    if (a != 0) {
      key = {Rational(1), b / a};
      lead = a;
    } else {
      key = {Rational(0), Rational(1)};
      lead = b;
    }
    if (key.first == 1 && key.second == 0) {
      // plain constant
    } else {
      int& e = factors_[key];
      e += power;
      if (e == 0) factors_.erase(key);
    }
    for (int k = 0; k < std::abs(power); ++k) {
      if (power > 0) constant_ *= lead;
      else constant_ /= lead;
    }
  }

  void multiply_constant(const Rational& c) {
    constant_ *= c;
    if (c == 0) factors_.clear();
  }

  /// Exponent of eps itself.
  int valuation() const {
    auto it = factors_.find({Rational(0), Rational(1)});
    return it == factors_.end() ? 0 : it->second;
  }

  UnivariatePolynomial numerator() const { return expand(true); }
  UnivariatePolynomial denominator() const { return expand(false); }

  Rational value_at_zero() const {
    const int v = valuation();
    if (v < 0) throw Error(ErrorCode::PoleAtZero, "pole of order " + std::to_string(-v) + " at eps = 0");
    return v > 0 ? Rational(0) : constant_;
  }

  /// Laurent coefficients of eps^lo .. eps^hi.
  std::vector<Rational> laurent(int lo, int hi) const {
    std::vector<Rational> out(hi - lo + 1, Rational(0));
    if (constant_ == 0) return out;
    const int v = valuation();
    if (v < lo) throw Error(ErrorCode::PoleAtZero, "pole order exceeds the expected bound");
    if (v > hi) return out;
    const int prec = hi - v;
    std::vector<Rational> unit(prec + 1, Rational(0));
    unit[0] = constant_;
    for (const auto& [key, e] : factors_) {
      if (key.first == 0) continue;
      // (1 + c eps)^e truncated.
      std::vector<Rational> f(prec + 1, Rational(0));
      Rational binom = 1, cpow = 1;
      for (int k = 0; k <= prec; ++k) {
        f[k] = binom * cpow;
        binom = binom * Rational(e - k) / Rational(k + 1);
        cpow *= key.second;
      }
      std::vector<Rational> next(prec + 1, Rational(0));
      for (int i = 0; i <= prec; ++i) {
        if (unit[i] == 0) continue;
        for (int j = 0; i + j <= prec; ++j) next[i + j] += unit[i] * f[j];
      }
      unit = std::move(next);
    }
    for (int k = 0; k <= prec; ++k) out[v - lo + k] = unit[k];
    return out;
  }

 private:
  using Key = std::pair<Rational, Rational>;

  UnivariatePolynomial expand(bool num) const {
    UnivariatePolynomial p{num ? constant_ : Rational(1)};
    for (const auto& [key, e] : factors_) {
      if ((e > 0) != num) continue;
      const UnivariatePolynomial lin{key.first, key.second};
      for (int k = 0; k < std::abs(e); ++k) p = poly_multiply(p, lin);
    }
    return p;
  }

  Rational constant_;
  std::map<Key, int> factors_;
};

/// (-1)^{sum_i d_i (r_i - 1)} for a curve class on M_Q.
inline int fiber_sign(const Quiver& q, const CurveClass& d) {
  std::int64_t e = 0;
  for (int i = 1; i < q.size(); ++i) e += d[i - 1] * (q.rank(i) - 1);
  return e % 2 == 0 ? 1 : -1;
}

/// p(d~)_i = sum_j d~_ij.
inline CurveClass project_curve(const Quiver& q, const Abelianization& ab, const CurveClass& dab) {
  CurveClass d(q.picard_rank(), 0);
  for (int i = 1; i < q.size(); ++i) {
    for (int j = 0; j < q.rank(i); ++j) d[i - 1] += dab[ab.first[i] + j - 1];
  }
  return d;
}

struct PeriodOptions {
  /// Use the ordered-pair product exactly as written instead of the
  /// normalized j < k form. Debug only.
  bool literal_signs = false;
};

/// Precomputed Abelianized data for summing I-function terms.
class PeriodContext {
 public:
  PeriodContext(const Quiver& q, const BundleSpec& e)
      : quiver_(q), ab_(abelianize(q)), roots_(root_data(q, e)) {
    check_bundle(e, q);
    for (int i = 1; i < q.size(); ++i) pole_order_ += q.rank(i) * (q.rank(i) - 1) / 2;
  }

  const Quiver& quiver() const { return quiver_; }
  const Abelianization& abelianization() const { return ab_; }
  const RootData& roots() const { return roots_; }
  int pole_order() const { return pole_order_; }

  void check_specialization(const IntVec& w) const {
    if (static_cast<int>(w.size()) != ab_.variables()) {
      throw Error(ErrorCode::InvalidInput, "specialization vector has wrong length");
    }
    for (int i = 1; i < quiver_.size(); ++i) {
      for (int j = 0; j < quiver_.rank(i); ++j) {
        for (int k = j + 1; k < quiver_.rank(i); ++k) {
          if (w[ab_.first[i] + j - 1] == w[ab_.first[i] + k - 1]) {
            throw Error(ErrorCode::DegenerateSpecialization, "equal entries within block " + std::to_string(i));
          }
        }
      }
    }
  }

  UnivariateRationalFunction term_value(const CurveClass& d, const IntVec& w, const PeriodOptions& opt = {}) const {
    check_specialization(w);
    UnivariateRationalFunction f(Rational(fiber_sign(quiver_, project_curve(quiver_, ab_, d))));
    int literal = 0;
    for (int i = 1; i < quiver_.size(); ++i) {
      for (int j = 0; j < quiver_.rank(i); ++j) {
        for (int k = j + 1; k < quiver_.rank(i); ++k) {
          const int vj = ab_.first[i] + j - 1, vk = ab_.first[i] + k - 1;
          const std::int64_t ell = d[vj] - d[vk];
          const Rational x(static_cast<long>(w[vj] - w[vk]));
          f.multiply_linear(Rational(static_cast<long>(ell)), x, 1);
          f.multiply_linear(Rational(0), x, -1);
          literal += static_cast<int>(ell);
        }
      }
    }
    if (opt.literal_signs && literal % 2 != 0) f.multiply_constant(Rational(-1));
    for (const auto& da : roots_.positive) {
      const std::int64_t ell = dot(d, da);
      const Rational slope(static_cast<long>(dot(da, w)));
      if (ell >= 0) {
        for (std::int64_t m = 1; m <= ell; ++m) f.multiply_linear(Rational(static_cast<long>(m)), slope, -1);
      } else {
        for (std::int64_t m = ell + 1; m <= 0; ++m) f.multiply_linear(Rational(static_cast<long>(m)), slope, 1);
      }
      if (f.is_zero()) return f;
    }
    for (const auto& delta : roots_.bundle) {
      const std::int64_t ell = dot(d, delta);
      if (ell < 0) {
        throw Error(ErrorCode::NegativeBundlePairing, "bundle root (" + join(delta) + ") pairs negatively with (" + join(d) + ")");
      }
      const Rational slope(static_cast<long>(dot(delta, w)));
      for (std::int64_t m = 1; m <= ell; ++m) f.multiply_linear(Rational(static_cast<long>(m)), slope, 1);
    }
    return f;
  }

  /// c_0..c_N: the eps^0 coefficient of the degree-k fibre sums.
  std::vector<Rational> raw_period(int order, const IntVec& w, const PeriodOptions& opt = {}) const {
    if (order < 0) throw Error(ErrorCode::InvalidInput, "order must be non-negative");
    check_specialization(w);
    const ConeH mori = mori_cone(ab_.quiver);
    IntMatrix points;
    try {
      points = enumerate_lattice_slice(mori, roots_.anticanonical_lift, order);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::UnboundedSlice) throw;
      throw Error(ErrorCode::UnboundedEnumeration, "lifted -K_X is not positive on the Mori cone: " + std::string(err.what()));
    }
    const int p = pole_order_;
    std::vector<std::vector<Rational>> sums(order + 1, std::vector<Rational>(p + 1, Rational(0)));
    for (const auto& d : points) {
      const auto k = dot(roots_.anticanonical_lift, d);
      const auto terms = term_value(d, w, opt).laurent(-p, 0);
      for (int i = 0; i <= p; ++i) sums[k][i] += terms[i];
    }
    std::vector<Rational> c(order + 1);
    for (int k = 0; k <= order; ++k) {
      for (int i = 0; i < p; ++i) {
        if (sums[k][i] != 0) {
          throw Error(ErrorCode::PoleAtZero, "degree " + std::to_string(k) + " fibre sum has a pole of order " +
                                                 std::to_string(p - i) + " at eps = 0");
        }
      }
      c[k] = sums[k][p];
    }
    return c;
  }

  /// Distinct within blocks, and nonzero.
  IntVec default_specialization(int variant = 0) const {
    IntVec w(ab_.variables());
    for (int v = 0; v < ab_.variables(); ++v) w[v] = variant == 0 ? v + 1 : (v + 1) * (v + 1) * 3 + 4;
    return w;
  }

 private:
  Quiver quiver_;
  Abelianization ab_;
  RootData roots_;
  int pole_order_ = 0;
};

inline UnivariateRationalFunction term_value(const Quiver& q, const BundleSpec& e, const CurveClass& d,
                                             const IntVec& w, const PeriodOptions& opt = {}) {
  return PeriodContext(q, e).term_value(d, w, opt);
}

inline std::vector<Rational> raw_period(const Quiver& q, const BundleSpec& e, int order) {
  const PeriodContext ctx(q, e);
  return ctx.raw_period(order, ctx.default_specialization());
}

struct PeriodSequence {
  std::vector<Rational> alpha;
};

/// G(t) = e^{-c_1 t} P(t), alpha_k = k! [t^k] G.
inline PeriodSequence regularize(const std::vector<Rational>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  const Rational gamma = n >= 1 ? c[1] : Rational(0);
  PeriodSequence out;
  for (int k = 0; k <= n; ++k) {
    Rational g = 0, p = 1;
    for (int j = 0; j <= k; ++j) {
      g += p / factorial(j) * c[k - j];
      p *= -gamma;
    }
    out.alpha.push_back(g * factorial(k));
  }
  return out;
}

inline PeriodSequence period_sequence(const Quiver& q, const BundleSpec& e, int order) {
  return regularize(raw_period(q, e, order));
}

/// Recomputes with a second specialization and demands equality.
inline bool cross_check_specialization(const Quiver& q, const BundleSpec& e, int order) {
  const PeriodContext ctx(q, e);
  const auto a = ctx.raw_period(order, ctx.default_specialization(0));
  const auto b = ctx.raw_period(order, ctx.default_specialization(1));
  if (a != b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] != b[k]) {
        throw Error(ErrorCode::SpecializationMismatch,
                    "c_" + std::to_string(k) + ": " + to_string(a[k]) + " vs " + to_string(b[k]));
      }
    }
  }
  return true;
}

}  // namespace qflag
