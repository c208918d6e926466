#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qflag/arith.hpp"
#include "qflag/cones.hpp"
#include "qflag/error.hpp"
#include "qflag/quiver.hpp"

namespace qflag {

/// Weakly decreasing integer vector of length r_i; entries may be negative.
using Partition = std::vector<int>;

/// One Schur-power summand: a generalized partition for each non-source
/// vertex, entry i-1 for vertex i.
struct BundleSummand {
  std::vector<Partition> partitions;

  friend bool operator==(const BundleSummand&, const BundleSummand&) = default;
  friend auto operator<=>(const BundleSummand&, const BundleSummand&) = default;
};

/// Direct sum of summands; order carries no meaning.
struct BundleSpec {
  std::vector<BundleSummand> summands;

  bool empty() const { return summands.empty(); }
  friend bool operator==(const BundleSpec&, const BundleSpec&) = default;
};

inline bool is_partition(const Partition& p) { return std::is_sorted(p.rbegin(), p.rend()); }

/// beta = alpha + a (1,...,1) with a = min(beta).
inline int partition_shift(const Partition& beta) { return beta.empty() ? 0 : beta.back(); }

inline Partition partition_shape(const Partition& beta) {
  Partition alpha = beta;
  const int a = partition_shift(beta);
  for (int& x : alpha) x -= a;
  return alpha;
}

inline int partition_size(const Partition& p) {
  int s = 0;
  for (int x : p) s += x;
  return s;
}

/// Content vectors of the semistandard tableaux of shape alpha with entries
/// in 1..r, in the order the tableaux are generated.
inline std::vector<IntVec> ssyt_weights(const Partition& alpha, int r) {
  Partition shape;
  for (int x : alpha) {
    if (x < 0) throw Error(ErrorCode::InvalidInput, "shape has a negative part");
    if (x > 0) shape.push_back(x);
  }
  if (!is_partition(shape)) throw Error(ErrorCode::InvalidInput, "shape is not weakly decreasing");
  if (static_cast<int>(shape.size()) > r) {
    throw Error(ErrorCode::TooManyRows, std::to_string(shape.size()) + " rows but only " + std::to_string(r) + " letters");
  }
  std::vector<IntVec> out;
  std::vector<std::vector<int>> tab;
  for (int len : shape) tab.emplace_back(len, 0);
  IntVec content(r, 0);
  std::function<void(std::size_t, int)> fill = [&](std::size_t row, int col) {
    if (row == shape.size()) {
      out.push_back(content);
      return;
    }
    if (col == shape[row]) {
      fill(row + 1, 0);
      return;
    }
    int lo = 1;
    if (col > 0) lo = std::max(lo, tab[row][col - 1]);
    if (row > 0) lo = std::max(lo, tab[row - 1][col] + 1);
    for (int v = lo; v <= r; ++v) {
      tab[row][col] = v;
      ++content[v - 1];
      fill(row, col + 1);
      --content[v - 1];
    }
  };
  fill(0, 0);
  return out;
}

/// Number of semistandard tableaux, i.e. dim S^alpha C^r.
inline std::int64_t schur_rank(const Partition& alpha, int r) {
  return static_cast<std::int64_t>(ssyt_weights(alpha, r).size());
}

inline void check_summand(const BundleSummand& s, const Quiver& q) {
  if (static_cast<int>(s.partitions.size()) != q.picard_rank()) {
    throw Error(ErrorCode::InvalidInput, "summand has " + std::to_string(s.partitions.size()) +
                                             " partitions for " + std::to_string(q.picard_rank()) + " vertices");
  }
  for (int i = 1; i < q.size(); ++i) {
    const auto& p = s.partitions[i - 1];
    if (static_cast<int>(p.size()) != q.rank(i)) {
      throw Error(ErrorCode::InvalidInput, "partition at vertex " + std::to_string(i) + " has length " +
                                               std::to_string(p.size()) + ", expected " + std::to_string(q.rank(i)));
    }
    if (!is_partition(p)) throw Error(ErrorCode::InvalidInput, "partition at vertex " + std::to_string(i) + " is not weakly decreasing");
  }
}

inline void check_bundle(const BundleSpec& e, const Quiver& q) {
  for (const auto& s : e.summands) check_summand(s, q);
}

inline std::int64_t summand_rank(const BundleSummand& s, const Quiver& q) {
  std::int64_t rk = 1;
  for (int i = 1; i < q.size(); ++i) rk *= schur_rank(partition_shape(s.partitions[i - 1]), q.rank(i));
  return rk;
}

inline std::int64_t bundle_rank(const BundleSpec& e, const Quiver& q) {
  std::int64_t rk = 0;
  for (const auto& s : e.summands) rk += summand_rank(s, q);
  return rk;
}

/// Chern roots on the Abelianization, as vectors over the non-source
/// abelian vertices (variable v-1 for abelian vertex v).
inline std::vector<IntVec> summand_roots(const BundleSummand& s, const Quiver& q) {
  check_summand(s, q);
  const Abelianization ab = abelianize(q);
  const int vars = ab.variables();
  std::vector<IntVec> roots{IntVec(vars, 0)};
  for (int i = 1; i < q.size(); ++i) {
    const auto& beta = s.partitions[i - 1];
    const int a = partition_shift(beta);
    const auto weights = ssyt_weights(partition_shape(beta), q.rank(i));
    std::vector<IntVec> next;
    next.reserve(roots.size() * weights.size());
    for (const auto& root : roots) {
      for (const auto& c : weights) {
        IntVec r = root;
        for (int j = 0; j < q.rank(i); ++j) r[ab.first[i] + j - 1] += c[j] + a;
        next.push_back(std::move(r));
      }
    }
    roots = std::move(next);
  }
  return roots;
}

inline std::vector<IntVec> bundle_roots(const BundleSpec& e, const Quiver& q) {
  std::vector<IntVec> out;
  for (const auto& s : e.summands) {
    auto r = summand_roots(s, q);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

/// Collapses a Weyl-symmetric abelian class to the det W_i basis.
inline DivisorClass collapse_blocks(const IntVec& lifted, const Quiver& q) {
  const Abelianization ab = abelianize(q);
  DivisorClass d(q.picard_rank(), 0);
  for (int i = 1; i < q.size(); ++i) {
    const auto c = lifted[ab.first[i] - 1];
    for (int j = 1; j < q.rank(i); ++j) {
      if (lifted[ab.first[i] + j - 1] != c) {
        throw Error(ErrorCode::AsymmetricRoots, "coefficients differ within block " + std::to_string(i));
      }
    }
    d[i - 1] = c;
  }
  return d;
}

/// Diagonal embedding a_i -> (a_i,...,a_i) of Pic(M_Q) into Pic(M_{Q^ab}).
inline IntVec lift_divisor(const DivisorClass& a, const Quiver& q) {
  const Abelianization ab = abelianize(q);
  IntVec out(ab.variables(), 0);
  for (int i = 1; i < q.size(); ++i) {
    for (int j = 0; j < q.rank(i); ++j) out[ab.first[i] + j - 1] = a[i - 1];
  }
  return out;
}

inline DivisorClass first_chern(const BundleSpec& e, const Quiver& q) {
  const int vars = abelianize(q).variables();
  IntVec total(vars, 0);
  for (const auto& root : bundle_roots(e, q)) total = add(total, root);
  return collapse_blocks(total, q);
}

/// c_1 from ranks alone: the SSYT contents of S^alpha C^r sum to
/// |alpha| rank / r in every coordinate.
inline DivisorClass summand_first_chern(const BundleSummand& s, const Quiver& q) {
  std::vector<std::int64_t> ranks;
  std::int64_t total = 1;
  for (int i = 1; i < q.size(); ++i) {
    ranks.push_back(schur_rank(partition_shape(s.partitions[i - 1]), q.rank(i)));
    total *= ranks.back();
  }
  DivisorClass c(q.picard_rank(), 0);
  for (int i = 1; i < q.size(); ++i) {
    const auto& beta = s.partitions[i - 1];
    const std::int64_t others = total / ranks[i - 1];
    c[i - 1] = others * (partition_size(partition_shape(beta)) * ranks[i - 1] / q.rank(i)) +
               total * partition_shift(beta);
  }
  return c;
}

inline bool roots_all_nef(const BundleSpec& e, const Quiver& q) {
  const ConeH nef = nef_cone(abelianize(q).quiver);
  for (const auto& r : bundle_roots(e, q)) {
    if (!contains(nef, r)) return false;
  }
  return true;
}

inline bool is_trivial_summand(const BundleSummand& s) {
  for (const auto& p : s.partitions) {
    for (int x : p) {
      if (x != 0) return false;
    }
  }
  return true;
}

/// Canonical (A, r, P): the quiver in normal form and the sorted summand
/// list, lex-minimal over the automorphisms of the presentation.
struct BundleNormalForm {
  RawQuiver quiver;
  std::vector<BundleSummand> summands;

  friend bool operator==(const BundleNormalForm&, const BundleNormalForm&) = default;
  friend auto operator<=>(const BundleNormalForm&, const BundleNormalForm&) = default;
};

/// Reindexes internal per-vertex partitions to presentation positions.
inline std::vector<BundleSummand> present_bundle(const BundleSpec& e, const std::vector<int>& order) {
  std::vector<BundleSummand> out;
  for (const auto& s : e.summands) {
    BundleSummand t;
    for (std::size_t p = 1; p < order.size(); ++p) t.partitions.push_back(s.partitions[order[p] - 1]);
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline BundleNormalForm bundle_normal_form(const Quiver& q, const BundleSpec& e) {
  check_bundle(e, q);
  const NormalForm nf = normal_form(q);
  BundleNormalForm best{nf.presentation, {}};
  bool first = true;
  for (const auto& order : nf.minimizers) {
    auto p = present_bundle(e, order);
    if (first || p < best.summands) {
      best.summands = std::move(p);
      first = false;
    }
  }
  return best;
}

/// Converts a bundle written against a raw presentation (one partition per
/// non-source vertex, in presentation order) to internal vertex order.
inline BundleSpec bundle_to_internal(const std::vector<BundleSummand>& raw, const std::vector<int>& relabel) {
  const int n = static_cast<int>(relabel.size());
  const int source = relabel[0];
  std::vector<int> position(n, -1);  // raw vertex -> index in raw partition list
  for (int v = 0, k = 0; v < n; ++v) {
    if (v != source) position[v] = k++;
  }
  BundleSpec e;
  for (const auto& s : raw) {
    if (static_cast<int>(s.partitions.size()) != n - 1) {
      throw Error(ErrorCode::InvalidInput, "summand has " + std::to_string(s.partitions.size()) +
                                               " partitions, expected " + std::to_string(n - 1));
    }
    BundleSummand t;
    for (int x = 1; x < n; ++x) t.partitions.push_back(s.partitions[position[relabel[x]]]);
    e.summands.push_back(std::move(t));
  }
  return e;
}

/// Inverse of bundle_to_internal.
inline std::vector<BundleSummand> bundle_to_raw(const BundleSpec& e, const std::vector<int>& relabel) {
  const int n = static_cast<int>(relabel.size());
  const int source = relabel[0];
  std::vector<int> position(n, -1);
  for (int v = 0, k = 0; v < n; ++v) {
    if (v != source) position[v] = k++;
  }
  std::vector<BundleSummand> out;
  for (const auto& s : e.summands) {
    BundleSummand t;
    t.partitions.resize(n - 1);
    for (int x = 1; x < n; ++x) t.partitions[position[relabel[x]]] = s.partitions[x - 1];
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace qflag
