// Independent reference computations shared by the unit tests and the
// acceptance binary. None of these reuse the library's own algorithms.
#pragma once

#include <functional>
#include <random>
#include <set>

#include "qflag/qflag.hpp"

namespace oracle {

using namespace qflag;

/// Nef membership for a toric quiver flag variety: the intersection, over
/// every set of rho linearly independent arrow weights D_a = e_t - e_s whose
/// cone contains (1,...,1), of those simplicial cones.
class ToricGitNef {
 public:
  explicit ToricGitNef(const Quiver& q) : rho_(q.picard_rank()) {
    std::set<IntVec> weights;
    for (int s = 0; s < q.size(); ++s) {
      for (int t = s + 1; t < q.size(); ++t) {
        if (q.arrows(s, t) == 0) continue;
        IntVec d(rho_, 0);
        d[t - 1] = 1;
        if (s > 0) d[s - 1] = -1;
        weights.insert(d);
      }
    }
    const IntMatrix w(weights.begin(), weights.end());
    const std::vector<Rational> ones(rho_, Rational(1));
    std::vector<int> pick;
    std::function<void(int)> rec = [&](int start) {
      if (static_cast<int>(pick.size()) == rho_) {
        IntMatrix b(rho_, IntVec(rho_, 0));  // columns are the chosen weights
        for (int c = 0; c < rho_; ++c) {
          for (int r = 0; r < rho_; ++r) b[r][c] = w[pick[c]][r];
        }
        std::vector<Rational> x;
        if (!solve(b, ones, x)) return;
        for (const auto& v : x) {
          if (v < 0) return;
        }
        cones_.push_back(b);
        return;
      }
      for (int k = start; k < static_cast<int>(w.size()); ++k) {
        pick.push_back(k);
        rec(k + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }

  bool contains(const IntVec& c) const {
    std::vector<Rational> rhs;
    for (auto v : c) rhs.push_back(Rational(static_cast<long>(v)));
    for (const auto& b : cones_) {
      std::vector<Rational> x;
      solve(b, rhs, x);
      for (const auto& v : x) {
        if (v < 0) return false;
      }
    }
    return true;
  }

  std::size_t chambers() const { return cones_.size(); }

  /// Per-coordinate bounds on every class L with L and k - L nef, from the
  /// first chamber: L = B x with 0 <= x <= B^-1 k.
  std::pair<IntVec, IntVec> box(const IntVec& k) const {
    const auto& b = cones_.front();
    std::vector<Rational> rhs, x;
    for (auto v : k) rhs.push_back(Rational(static_cast<long>(v)));
    solve(b, rhs, x);
    IntVec lo(rho_, 0), hi(rho_, 0);
    for (int i = 0; i < rho_; ++i) {
      Rational l = 0, h = 0;
      for (int j = 0; j < rho_; ++j) (b[i][j] < 0 ? l : h) += b[i][j] * x[j];
      lo[i] = floor_div(l.get_num().get_si(), l.get_den().get_si());
      hi[i] = ceil_div(h.get_num().get_si(), h.get_den().get_si());
    }
    return {lo, hi};
  }

 private:
  int rho_;
  std::vector<IntMatrix> cones_;
};

/// Unregularized period coefficients of a toric quiver flag variety from the
/// hypergeometric closed form: sum over d with d_0 = 0 of
/// t^{sum l_a} / prod l_a!, l_a = d_t(a) - d_s(a), all l_a >= 0.
inline std::vector<Rational> toric_period(const Quiver& q, int order) {
  const int n = q.size();
  std::vector<Rational> c(order + 1, Rational(0));
  std::vector<int> d(n, 0);
  std::function<void(int)> rec = [&](int v) {
    if (v == n) {
      int total = 0;
      Rational term = 1;
      for (int s = 0; s < n; ++s) {
        for (int t = s + 1; t < n; ++t) {
          const int l = d[t] - d[s];
          if (q.arrows(s, t) == 0) continue;
          if (l < 0) return;
          total += l * q.arrows(s, t);
          for (int k = 0; k < q.arrows(s, t); ++k) term /= factorial(l);
        }
      }
      if (total <= order) c[total] += term;
      return;
    }
    for (int x = 0; x <= order; ++x) {
      d[v] = x;
      rec(v + 1);
    }
  };
  rec(1);
  return c;
}

/// Number of semistandard tableaux by the Weyl dimension formula.
inline Rational weyl_dimension(const Partition& alpha, int r) {
  Partition a = alpha;
  a.resize(r, 0);
  Rational num = 1;
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) num *= ratio(a[i] - a[j] + j - i, j - i);
  }
  return num;
}

/// Random valid quiver in internal order with n vertices.
inline Quiver random_quiver(std::mt19937& rng, int n, int max_rank, int max_arrows = 2) {
  std::uniform_int_distribution<int> arrows(0, max_arrows), rank(1, max_rank);
  while (true) {
    std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
    std::vector<int> ranks(n, 1);
    for (int j = 1; j < n; ++j) {
      ranks[j] = rank(rng);
      for (int i = 0; i < j; ++i) adj[i][j] = arrows(rng);
    }
    try {
      return Quiver(adj, ranks);
    } catch (const Error&) {
    }
  }
}

/// A (quiver, bundle) pair in raw form; vertex 0 is the source and bundle
/// partitions are listed for raw vertices 1..n-1.
struct RawPair {
  RawQuiver quiver;
  std::vector<BundleSummand> summands;
};

inline RawPair raw_pair(const Quiver& q, const BundleSpec& e) { return {q.raw(), e.summands}; }

inline std::pair<Quiver, BundleSpec> load(const RawPair& p) { return load_pair(p.quiver, p.summands); }

/// Adds one arrow s -> t and the summand it cuts back out (W_t, or
/// W_s^* x W_t for a rank-one s).
inline std::optional<RawPair> add_arrow(const RawPair& p, std::mt19937& rng) {
  const int n = static_cast<int>(p.quiver.dim_vector.size());
  std::vector<std::pair<int, int>> options;
  for (int s = 0; s < n; ++s) {
    for (int t = 1; t < n; ++t) {
      if (s == t || p.quiver.dim_vector[s] != 1) continue;
      if (p.quiver.adjacency[s][t] == 0 && s != 0) continue;  // keep the path order
      options.emplace_back(s, t);
    }
  }
  if (options.empty()) return std::nullopt;
  auto [s, t] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
  RawPair out = p;
  ++out.quiver.adjacency[s][t];
  BundleSummand w;
  for (int v = 1; v < n; ++v) w.partitions.push_back(Partition(p.quiver.dim_vector[v], 0));
  w.partitions[t - 1][0] = 1;
  if (s > 0) w.partitions[s - 1][0] = -1;
  out.summands.push_back(std::move(w));
  return out;
}

/// Splits one arrow k -> j (rank-one k) through a new rank-one vertex v with
/// W_v = W_k, moving part of k's weight onto v.
inline std::optional<RawPair> insert_vertex(const RawPair& p, std::mt19937& rng) {
  const int n = static_cast<int>(p.quiver.dim_vector.size());
  std::vector<std::pair<int, int>> options;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      if (p.quiver.adjacency[k][j] > 0 && p.quiver.dim_vector[k] == 1) options.emplace_back(k, j);
    }
  }
  if (options.empty()) return std::nullopt;
  auto [k, j] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
  RawPair out;
  out.quiver.adjacency.assign(n + 1, std::vector<int>(n + 1, 0));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) out.quiver.adjacency[a][b] = p.quiver.adjacency[a][b];
  }
  out.quiver.dim_vector = p.quiver.dim_vector;
  out.quiver.dim_vector.push_back(1);
  --out.quiver.adjacency[k][j];
  out.quiver.adjacency[k][n] = 1;
  out.quiver.adjacency[n][j] = 1;
  for (auto s : p.summands) {
    int moved = 0;
    if (k > 0 && s.partitions[k - 1][0] != 0) moved = std::uniform_int_distribution<int>(0, 1)(rng) * s.partitions[k - 1][0];
    if (k > 0) s.partitions[k - 1][0] -= moved;
    s.partitions.push_back({moved});
    out.summands.push_back(std::move(s));
  }
  return out;
}

/// Reroutes every arrow source -> j of a leaf j fed only by the source
/// through a rank-one vertex i, twisting the bundle to match.
inline std::optional<RawPair> ungraft(const RawPair& p, std::mt19937& rng) {
  const int n = static_cast<int>(p.quiver.dim_vector.size());
  std::vector<std::pair<int, int>> options;
  for (int j = 1; j < n; ++j) {
    bool leaf = true;
    for (int v = 0; v < n; ++v) {
      if (p.quiver.adjacency[j][v] > 0 || (v > 0 && p.quiver.adjacency[v][j] > 0)) leaf = false;
    }
    if (!leaf) continue;
    for (int i = 1; i < n; ++i) {
      if (i != j && p.quiver.dim_vector[i] == 1) options.emplace_back(i, j);
    }
  }
  if (options.empty()) return std::nullopt;
  auto [i, j] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
  RawPair out = p;
  out.quiver.adjacency[i][j] = out.quiver.adjacency[0][j];
  out.quiver.adjacency[0][j] = 0;
  for (auto& s : out.summands) s.partitions[i - 1][0] -= partition_size(s.partitions[j - 1]);
  return out;
}

}  // namespace oracle
