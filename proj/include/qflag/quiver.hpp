#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "qflag/arith.hpp"
#include "qflag/error.hpp"

namespace qflag {

/// A quiver exactly as presented by a user or a table: adjacency matrix and
/// dimension vector in arbitrary vertex order. This is the JSON form.
struct RawQuiver {
  std::vector<std::vector<int>> adjacency;
  std::vector<int> dim_vector;

  friend bool operator==(const RawQuiver&, const RawQuiver&) = default;
  friend auto operator<=>(const RawQuiver&, const RawQuiver&) = default;
};

/// A validated quiver in internal order: vertices topologically sorted with
/// the unique source at index 0, so arrows i -> j only exist for i < j.
class Quiver {
 public:
  Quiver() : adjacency_{{0}}, ranks_{1} {}

  /// Requires topological order already; throws on any violated invariant.
  Quiver(std::vector<std::vector<int>> adjacency, std::vector<int> ranks)
      : adjacency_(std::move(adjacency)), ranks_(std::move(ranks)) {
    check();
  }

  int size() const { return static_cast<int>(ranks_.size()); }
  int picard_rank() const { return size() - 1; }
  int arrows(int i, int j) const { return adjacency_[i][j]; }
  int rank(int i) const { return ranks_[i]; }
  const std::vector<int>& ranks() const { return ranks_; }
  const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }

  bool is_toric() const {
    return std::all_of(ranks_.begin(), ranks_.end(), [](int r) { return r == 1; });
  }

  int arrow_count() const {
    int total = 0;
    for (const auto& row : adjacency_) total += std::accumulate(row.begin(), row.end(), 0);
    return total;
  }

  /// s_i: total rank of the sources of arrows into i.
  int incoming_rank(int i) const {
    int s = 0;
    for (int k = 0; k < size(); ++k) s += adjacency_[k][i] * ranks_[k];
    return s;
  }

  /// s'_i: total rank of the targets of arrows out of i.
  int outgoing_rank(int i) const {
    int s = 0;
    for (int k = 0; k < size(); ++k) s += adjacency_[i][k] * ranks_[k];
    return s;
  }

  int dimension() const {
    int d = 0;
    for (int i = 1; i < size(); ++i) d += ranks_[i] * (incoming_rank(i) - ranks_[i]);
    return d;
  }

  RawQuiver raw() const { return {adjacency_, ranks_}; }

  friend bool operator==(const Quiver& a, const Quiver& b) {
    return a.adjacency_ == b.adjacency_ && a.ranks_ == b.ranks_;
  }

 private:
  void check() const {
    const int n = size();
    if (n == 0) throw Error(ErrorCode::InvalidInput, "quiver has no vertices");
    if (static_cast<int>(adjacency_.size()) != n) {
      throw Error(ErrorCode::InvalidInput, "adjacency matrix size does not match dimension vector");
    }
    for (const auto& row : adjacency_) {
      if (static_cast<int>(row.size()) != n) throw Error(ErrorCode::InvalidInput, "adjacency matrix not square");
      for (int x : row) {
        if (x < 0) throw Error(ErrorCode::InvalidInput, "negative arrow multiplicity");
      }
    }
    for (int r : ranks_) {
      if (r <= 0) throw Error(ErrorCode::InvalidInput, "dimension vector entries must be positive");
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        if (adjacency_[i][j] != 0) {
          throw Error(ErrorCode::InvalidInput, "internal quiver order must be topological");
        }
      }
    }
    if (ranks_[0] != 1) throw Error(ErrorCode::SourceRankNotOne, "source vertex has rank " + std::to_string(ranks_[0]));
    for (int i = 1; i < n; ++i) {
      if (incoming_rank(i) == 0) {
        throw Error(ErrorCode::MultipleSources, "vertex " + std::to_string(i) + " has no incoming arrows");
      }
      if (incoming_rank(i) < ranks_[i]) {
        throw Error(ErrorCode::NoStablePoints,
                    "vertex " + std::to_string(i) + " has s_i < r_i so no surjection exists");
      }
    }
  }

  std::vector<std::vector<int>> adjacency_;
  std::vector<int> ranks_;
};

/// Result of loading a raw quiver: the internal quiver plus the relabeling,
/// relabel[internal] = raw index.
struct LabeledQuiver {
  Quiver quiver;
  std::vector<int> relabel;
};

/// Sorts a raw quiver topologically (Kahn, smallest raw index first) and
/// validates it.
inline LabeledQuiver load_quiver(const RawQuiver& raw) {
  const int n = static_cast<int>(raw.dim_vector.size());
  if (n == 0) throw Error(ErrorCode::InvalidInput, "quiver has no vertices");
  if (static_cast<int>(raw.adjacency.size()) != n) {
    throw Error(ErrorCode::InvalidInput, "adjacency matrix size does not match dimension vector");
  }
  for (const auto& row : raw.adjacency) {
    if (static_cast<int>(row.size()) != n) throw Error(ErrorCode::InvalidInput, "adjacency matrix not square");
    for (int x : row) {
      if (x < 0) throw Error(ErrorCode::InvalidInput, "negative arrow multiplicity");
    }
  }
  for (int r : raw.dim_vector) {
    if (r <= 0) throw Error(ErrorCode::InvalidInput, "dimension vector entries must be positive");
  }

  std::vector<int> indeg(n, 0), outdeg(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      indeg[j] += raw.adjacency[i][j];
      outdeg[i] += raw.adjacency[i][j];
    }
  }
  std::vector<int> sources;
  for (int i = 0; i < n; ++i) {
    if (indeg[i] == 0) sources.push_back(i);
  }

  std::vector<int> order;
  std::vector<int> remaining = indeg;
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int s : sources) ready.push(s);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int j = 0; j < n; ++j) {
      if (raw.adjacency[v][j] == 0) continue;
      remaining[j] -= raw.adjacency[v][j];
      if (remaining[j] == 0) ready.push(j);
    }
  }
  if (static_cast<int>(order.size()) != n) throw Error(ErrorCode::CyclicQuiver, "quiver contains a directed cycle");
  if (sources.size() > 1) {
    for (int s : sources) {
      if (outdeg[s] == 0) {
        throw Error(ErrorCode::UnreachableVertex, "vertex " + std::to_string(s) + " is not reachable from the source");
      }
    }
    throw Error(ErrorCode::MultipleSources, std::to_string(sources.size()) + " vertices have no incoming arrows");
  }
  if (raw.dim_vector[sources[0]] != 1) {
    throw Error(ErrorCode::SourceRankNotOne, "source vertex has rank " + std::to_string(raw.dim_vector[sources[0]]));
  }

  std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
  std::vector<int> ranks(n);
  for (int a = 0; a < n; ++a) {
    ranks[a] = raw.dim_vector[order[a]];
    for (int b = 0; b < n; ++b) adj[a][b] = raw.adjacency[order[a]][order[b]];
  }
  return {Quiver(std::move(adj), std::move(ranks)), order};
}

/// Vertex counts s~_i of paths from the source; s~_0 = 1.
inline std::vector<std::int64_t> path_counts(const Quiver& q) {
  std::vector<std::int64_t> paths(q.size(), 0);
  paths[0] = 1;
  for (int j = 1; j < q.size(); ++j) {
    for (int i = 0; i < j; ++i) paths[j] += paths[i] * q.arrows(i, j);
  }
  return paths;
}

/// -K in the det W_1..det W_rho basis: sum over arrows of
/// r_s(a) e_t(a) - r_t(a) e_s(a), with e_source dropped.
inline DivisorClass anticanonical(const Quiver& q) {
  DivisorClass k(q.picard_rank(), 0);
  for (int i = 0; i < q.size(); ++i) {
    for (int j = i + 1; j < q.size(); ++j) {
      const int m = q.arrows(i, j);
      if (m == 0) continue;
      k[j - 1] += static_cast<std::int64_t>(m) * q.rank(i);
      if (i > 0) k[i - 1] -= static_cast<std::int64_t>(m) * q.rank(j);
    }
  }
  return k;
}

struct VarietyData {
  Quiver quiver;
  std::vector<int> relabel;
  std::vector<int> incoming_ranks;
  std::vector<int> outgoing_ranks;
  int dimension = 0;
  int picard_rank = 0;
  std::vector<std::int64_t> path_counts;
  DivisorClass anticanonical;
};

inline VarietyData validate(const RawQuiver& raw) {
  LabeledQuiver lq = load_quiver(raw);
  const Quiver& q = lq.quiver;
  VarietyData d{q, lq.relabel, {}, {}, q.dimension(), q.picard_rank(), path_counts(q), anticanonical(q)};
  for (int i = 0; i < q.size(); ++i) {
    d.incoming_ranks.push_back(q.incoming_rank(i));
    d.outgoing_ranks.push_back(q.outgoing_rank(i));
  }
  return d;
}

/// Abelianized quiver: vertex v_{i,j} for each original vertex i and
/// 1 <= j <= r_i, laid out block by block in the original topological order.
struct Abelianization {
  Quiver quiver;
  std::vector<int> block;  // abelian vertex -> original vertex
  std::vector<int> first;  // original vertex -> index of its first abelian vertex

  /// Number of non-source abelian vertices, i.e. the Abelian Picard rank.
  int variables() const { return quiver.picard_rank(); }
};

inline Abelianization abelianize(const Quiver& q) {
  Abelianization ab;
  int total = 0;
  for (int i = 0; i < q.size(); ++i) {
    ab.first.push_back(total);
    for (int j = 0; j < q.rank(i); ++j) ab.block.push_back(i);
    total += q.rank(i);
  }
  std::vector<std::vector<int>> adj(total, std::vector<int>(total, 0));
  for (int u = 0; u < total; ++u) {
    for (int v = 0; v < total; ++v) adj[u][v] = q.arrows(ab.block[u], ab.block[v]);
  }
  ab.quiver = Quiver(std::move(adj), std::vector<int>(total, 1));
  return ab;
}

/// Definition-A.1 presentation: dimension vector weakly increasing and the
/// adjacency columns lexicographically minimal over rank-preserving
/// relabelings. order[p] is the internal vertex shown at position p.
struct NormalForm {
  RawQuiver presentation;
  std::vector<int> order;
  /// Every order achieving the minimum (the automorphisms of the
  /// presentation, composed with `order`).
  std::vector<std::vector<int>> minimizers;
};

namespace detail {

// Column-major comparison of the relabeled matrix against the best so far;
// returns -1/0/+1 and stops at the first differing entry.
inline int compare_columns(const Quiver& q, const std::vector<int>& order, const std::vector<int>& best) {
  const int n = q.size();
  for (int p = 0; p < n; ++p) {
    for (int x = 0; x < n; ++x) {
      const int a = q.arrows(order[x], order[p]);
      const int b = q.arrows(best[x], best[p]);
      if (a != b) return a < b ? -1 : 1;
    }
  }
  return 0;
}

// Visits every permutation that permutes each block of equal rank in place.
inline void for_each_block_permutation(std::vector<int>& order, const std::vector<std::pair<int, int>>& blocks,
                                       std::size_t b, const std::function<void(const std::vector<int>&)>& visit) {
  if (b == blocks.size()) {
    visit(order);
    return;
  }
  auto [lo, hi] = blocks[b];
  std::sort(order.begin() + lo, order.begin() + hi);
  do {
    for_each_block_permutation(order, blocks, b + 1, visit);
  } while (std::next_permutation(order.begin() + lo, order.begin() + hi));
}

}  // namespace detail

inline NormalForm normal_form(const Quiver& q) {
  const int n = q.size();
  // The source is the only vertex with a zero column, so it always leads.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin() + 1, order.end(), [&](int a, int b) { return q.rank(a) < q.rank(b); });

  std::vector<std::pair<int, int>> blocks;
  for (int lo = 1; lo < n;) {
    int hi = lo;
    while (hi < n && q.rank(order[hi]) == q.rank(order[lo])) ++hi;
    if (hi - lo > 1) blocks.emplace_back(lo, hi);
    lo = hi;
  }

  std::vector<int> best = order;
  std::vector<std::vector<int>> minimizers;
  detail::for_each_block_permutation(order, blocks, 0, [&](const std::vector<int>& cand) {
    const int c = minimizers.empty() ? 0 : detail::compare_columns(q, cand, best);
    if (minimizers.empty() || c < 0) {
      best = cand;
      minimizers.assign(1, cand);
    } else if (c == 0) {
      minimizers.push_back(cand);
    }
  });

  NormalForm nf;
  nf.order = best;
  nf.minimizers = std::move(minimizers);
  nf.presentation.adjacency.assign(n, std::vector<int>(n, 0));
  for (int x = 0; x < n; ++x) {
    nf.presentation.dim_vector.push_back(q.rank(best[x]));
    for (int y = 0; y < n; ++y) nf.presentation.adjacency[x][y] = q.arrows(best[x], best[y]);
  }
  return nf;
}

/// Removes vertex v, adding one arrow k -> j for every path k -> v -> j.
inline Quiver remove_vertex(const Quiver& q, int v) {
  const int n = q.size();
  std::vector<std::vector<int>> adj(n - 1, std::vector<int>(n - 1, 0));
  std::vector<int> ranks;
  auto idx = [v](int x) { return x < v ? x : x - 1; };
  for (int i = 0; i < n; ++i) {
    if (i == v) continue;
    ranks.push_back(q.rank(i));
    for (int j = 0; j < n; ++j) {
      if (j == v) continue;
      adj[idx(i)][idx(j)] = q.arrows(i, j) + q.arrows(i, v) * q.arrows(v, j);
    }
  }
  return Quiver(std::move(adj), std::move(ranks));
}

/// First non-source vertex with s_i = r_i, if any.
inline std::optional<int> trivial_vertex(const Quiver& q) {
  for (int i = 1; i < q.size(); ++i) {
    if (q.incoming_rank(i) == q.rank(i)) return i;
  }
  return std::nullopt;
}

/// Repeatedly contracts vertices that contribute a point to the tower.
inline Quiver contract_trivial(Quiver q) {
  while (auto v = trivial_vertex(q)) q = remove_vertex(q, *v);
  return q;
}

enum class GraftFailure { RankNotOne, NotInterior, NoPath, StaysConnected };

inline std::string_view to_string(GraftFailure f) {
  switch (f) {
    case GraftFailure::RankNotOne: return "r_i != 1";
    case GraftFailure::NotInterior: return "vertex is the source or the last vertex";
    case GraftFailure::NoPath: return "no path from i to some vertex of S";
    case GraftFailure::StaysConnected: return "removing the arrows from i to S leaves S attached";
  }
  return "unknown";
}

namespace detail {

inline bool has_path(const Quiver& q, int from, int to) {
  std::vector<char> seen(q.size(), 0);
  seen[from] = 1;
  for (int v = from; v < q.size(); ++v) {
    if (!seen[v]) continue;
    if (v == to) return true;
    for (int j = v + 1; j < q.size(); ++j) {
      if (q.arrows(v, j) > 0) seen[j] = 1;
    }
  }
  return false;
}

// Undirected component labels of the quiver with the arrows i -> S removed.
inline std::vector<int> components_without(const Quiver& q, int i, const std::vector<char>& in_s) {
  const int n = q.size();
  std::vector<int> comp(n, -1);
  int label = 0;
  for (int start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> stack{start};
    comp[start] = label;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        int m = q.arrows(v, w) + q.arrows(w, v);
        if (v == i && in_s[w]) m -= q.arrows(v, w);
        if (w == i && in_s[v]) m -= q.arrows(w, v);
        if (m > 0 && comp[w] < 0) {
          comp[w] = label;
          stack.push_back(w);
        }
      }
    }
    ++label;
  }
  return comp;
}

}  // namespace detail

/// Checks the grafting conditions; S must be the full vertex set cut off
/// from the source when the arrows i -> S are removed.
inline std::optional<GraftFailure> graft_failure(const Quiver& q, int i, const std::vector<int>& s) {
  if (i <= 0 || i >= q.size() - 1) return GraftFailure::NotInterior;
  if (q.rank(i) != 1) return GraftFailure::RankNotOne;
  std::vector<char> in_s(q.size(), 0);
  for (int j : s) {
    if (j <= 0 || j >= q.size() || j == i) return GraftFailure::NoPath;
    in_s[j] = 1;
  }
  for (int j : s) {
    if (!detail::has_path(q, i, j)) return GraftFailure::NoPath;
  }
  auto comp = detail::components_without(q, i, in_s);
  for (int v = 0; v < q.size(); ++v) {
    const bool detached = comp[v] != comp[0];
    if (detached != static_cast<bool>(in_s[v])) return GraftFailure::StaysConnected;
  }
  return std::nullopt;
}

/// Replaces each arrow i -> j (j in S) by an arrow source -> j.
inline Quiver graft(const Quiver& q, int i, const std::vector<int>& s) {
  if (auto f = graft_failure(q, i, s)) {
    throw Error(ErrorCode::NotGraftable, "vertex " + std::to_string(i) + ": " + std::string(to_string(*f)));
  }
  auto adj = q.adjacency();
  for (int j : s) {
    adj[0][j] += adj[i][j];
    adj[i][j] = 0;
  }
  return Quiver(std::move(adj), q.ranks());
}

/// Quiver of the Grassmannian of r-dimensional quotients of C^n.
inline Quiver grassmannian(int n, int r) { return Quiver({{0, n}, {0, 0}}, {1, r}); }

}  // namespace qflag
