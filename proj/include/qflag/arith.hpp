#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qflag/error.hpp"

namespace qflag {

using Rational = mpq_class;
using Integer = mpz_class;
using IntVec = std::vector<std::int64_t>;
using IntMatrix = std::vector<IntVec>;

/// Integer exponent vector on the divisor lattice (det W_i basis or its
/// Abelianized refinement).
using DivisorClass = IntVec;
/// Integer vector in the dual (curve) lattice.
using CurveClass = IntVec;

inline std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) {
    throw Error(ErrorCode::InvalidInput, "integer overflow in lattice arithmetic");
  }
  return static_cast<std::int64_t>(v);
}

inline std::int64_t dot(const IntVec& a, const IntVec& b) {
  __int128 s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<__int128>(a[i]) * b[i];
  return checked(s);
}

inline IntVec add(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked(static_cast<__int128>(a[i]) + b[i]);
  return r;
}

inline IntVec sub(const IntVec& a, const IntVec& b) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked(static_cast<__int128>(a[i]) - b[i]);
  return r;
}

inline IntVec scale(const IntVec& a, std::int64_t k) {
  IntVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = checked(static_cast<__int128>(a[i]) * k);
  return r;
}

inline bool is_zero(const IntVec& a) {
  return std::all_of(a.begin(), a.end(), [](std::int64_t x) { return x == 0; });
}

inline std::int64_t content(const IntVec& a) {
  std::int64_t g = 0;
  for (auto x : a) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

/// Divides out the gcd of the entries; the zero vector is returned unchanged.
inline IntVec primitive(IntVec a) {
  const std::int64_t g = content(a);
  if (g > 1) {
    for (auto& x : a) x /= g;
  }
  return a;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

inline Rational factorial(unsigned n) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(f);
}

/// p/q in lowest terms.
inline Rational ratio(long p, long q) {
  if (q == 0) throw Error(ErrorCode::InvalidInput, "zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

/// Rationals serialize as "p/q", integers as "p".
inline std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline Rational parse_rational(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0 || q.get_den() == 0) throw Error(ErrorCode::InvalidInput, "malformed rational '" + s + "'");
  q.canonicalize();
  return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Rank of an integer matrix (rows are vectors), by exact rational elimination.
inline int matrix_rank(const IntMatrix& rows) {
  if (rows.empty()) return 0;
  const std::size_t n = rows.front().size();
  std::vector<std::vector<Rational>> m;
  m.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<Rational> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = Rational(static_cast<long>(r[j]));
    m.push_back(std::move(v));
  }
  int rank = 0;
  for (std::size_t col = 0; col < n && rank < static_cast<int>(m.size()); ++col) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][col] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < m.size(); ++r) {
      if (m[r][col] == 0) continue;
      Rational f = m[r][col] / m[rank][col];
      for (std::size_t j = col; j < n; ++j) m[r][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

/// Solves the square system A x = b exactly; returns false when A is singular.
inline bool solve(const IntMatrix& a, const std::vector<Rational>& b, std::vector<Rational>& x) {
  const std::size_t n = a.size();
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = Rational(static_cast<long>(a[i][j]));
    m[i][n] = b[i];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return false;
    std::swap(m[piv], m[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      Rational f = m[r][col] / m[col][col];
      for (std::size_t j = col; j <= n; ++j) m[r][j] -= f * m[col][j];
    }
  }
  x.assign(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
  return true;
}

/// Clears denominators of a rational vector and returns the primitive integer
/// vector pointing the same way.
inline IntVec primitive_from_rational(const std::vector<Rational>& v) {
  Integer l = 1;
  for (const auto& q : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  std::vector<Integer> ints;
  Integer g = 0;
  for (const auto& q : v) {
    Integer z = q.get_num() * (l / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.get_mpz_t());
    ints.push_back(z);
  }
  IntVec out;
  for (auto& z : ints) {
    if (g != 0) z /= g;
    if (!z.fits_slong_p()) throw Error(ErrorCode::InvalidInput, "lattice vector entry too large");
    out.push_back(z.get_si());
  }
  return out;
}

inline std::string join(const IntVec& v, const char* sep = ",") {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
  return os.str();
}

}  // namespace qflag
