#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qflag/arith.hpp"
#include "qflag/cohomology.hpp"
#include "qflag/cones.hpp"
#include "qflag/error.hpp"
#include "qflag/period.hpp"
#include "qflag/quiver.hpp"
#include "qflag/schur.hpp"

namespace qflag {

struct ClassificationRecord {
  int id = 0;
  RawQuiver quiver;  // normal form presentation
  int dimension = 0;
  int picard_rank = 0;
  DivisorClass anticanonical;  // presentation order
  IntMatrix nef_rays;          // presentation order
  bool fano = false;
};

/// Divisor or curve class reindexed from internal order to the positions
/// of a normal form presentation.
inline IntVec to_presentation(const IntVec& internal, const std::vector<int>& order) {
  IntVec out;
  for (std::size_t p = 1; p < order.size(); ++p) out.push_back(internal[order[p] - 1]);
  return out;
}

/// Column-major key used for the adjacency tie-break in the id ordering.
inline std::vector<int> column_key(const RawQuiver& q) {
  std::vector<int> key;
  const std::size_t n = q.dim_vector.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) key.push_back(q.adjacency[i][j]);
  }
  return key;
}

/// Orders by dimension, Picard rank, dimension vector, adjacency columns
/// and numbers from 1.
inline std::vector<ClassificationRecord> assign_ids(std::vector<ClassificationRecord> records) {
  std::sort(records.begin(), records.end(), [](const ClassificationRecord& a, const ClassificationRecord& b) {
    return std::make_tuple(a.dimension, a.picard_rank, a.quiver.dim_vector, column_key(a.quiver)) <
           std::make_tuple(b.dimension, b.picard_rank, b.quiver.dim_vector, column_key(b.quiver));
  });
  for (std::size_t k = 0; k < records.size(); ++k) records[k].id = static_cast<int>(k) + 1;
  return records;
}

inline ClassificationRecord make_record(const Quiver& q) {
  const NormalForm nf = normal_form(q);
  ClassificationRecord rec;
  rec.quiver = nf.presentation;
  rec.dimension = q.dimension();
  rec.picard_rank = q.picard_rank();
  rec.anticanonical = to_presentation(anticanonical(q), nf.order);
  for (const auto& r : cone_rays(nef_cone(q)).rays) rec.nef_rays.push_back(to_presentation(r, nf.order));
  std::sort(rec.nef_rays.begin(), rec.nef_rays.end());
  rec.fano = is_fano(q);
  return rec;
}

/// Every quiver flag variety of dimension 1..max_dim with s_i > r_i at
/// each vertex, one per normal form, keyed by presentation.
inline std::map<RawQuiver, Quiver> enumerate_quivers(int max_dim) {
  std::map<RawQuiver, Quiver> seen;
  std::vector<Quiver> frontier;
  auto insert = [&](const Quiver& q) {
    RawQuiver key = normal_form(q).presentation;
    if (seen.count(key)) return;
    seen.emplace(key, q);
    frontier.push_back(q);
  };
  for (int r = 1; r <= max_dim; ++r) {
    for (int n = r + 1; r * (n - r) <= max_dim; ++n) insert(grassmannian(n, r));
  }
  while (!frontier.empty()) {
    const Quiver q = frontier.back();
    frontier.pop_back();
    const int budget = max_dim - q.dimension();
    const int n = q.size();
    for (int r = 1; r <= budget; ++r) {
      for (int s = r + 1; r * (s - r) <= budget; ++s) {
        std::vector<int> mult(n, 0);
        std::function<void(int, int)> rec = [&](int k, int left) {
          if (k == n) {
            if (left != 0) return;
            auto adj = q.adjacency();
            for (auto& row : adj) row.push_back(0);
            adj.emplace_back(n + 1, 0);
            for (int i = 0; i < n; ++i) adj[i][n] = mult[i];
            auto ranks = q.ranks();
            ranks.push_back(r);
            insert(Quiver(std::move(adj), std::move(ranks)));
            return;
          }
          for (int m = 0; m * q.rank(k) <= left; ++m) {
            mult[k] = m;
            rec(k + 1, left - m * q.rank(k));
          }
          mult[k] = 0;
        };
        rec(0, s);
      }
    }
  }
  return seen;
}

/// Fano quiver flag varieties of dimension <= max_dim, with ids assigned.
inline std::vector<ClassificationRecord> classify_fano(int max_dim) {
  std::vector<ClassificationRecord> out;
  for (const auto& [key, q] : enumerate_quivers(max_dim)) {
    if (is_fano(q)) out.push_back(make_record(q));
  }
  return assign_ids(std::move(out));
}

/// Counts by Picard rank for each dimension: counts[d][rho].
inline std::map<int, std::map<int, int>> count_by_dimension(const std::vector<ClassificationRecord>& records) {
  std::map<int, std::map<int, int>> counts;
  for (const auto& r : records) ++counts[r.dimension][r.picard_rank];
  return counts;
}

struct IrreducibleSummands {
  std::vector<BundleSummand> irr1;  // rank >= 2
  std::vector<BundleSummand> irr2;  // line bundles
};

namespace detail {

/// Nef classes z with -K - z ample.
inline IntMatrix ample_slack(const Quiver& q) {
  const ConeH nef = nef_cone(q);
  const DivisorClass k = anticanonical(q);
  IntVec omega(nef.dim, 0);
  for (const auto& h : nef.inequalities) omega = add(omega, h);
  IntMatrix out;
  for (auto& z : enumerate_lattice_slice(nef, omega, dot(omega, k) - 1)) {
    if (contains_strictly(nef, sub(k, z))) out.push_back(std::move(z));
  }
  return out;
}

// Partitions of length r with last part zero, size <= bound.
inline std::vector<Partition> shapes(int r, int bound) {
  std::vector<Partition> out;
  Partition p(r, 0);
  std::function<void(int, int, int)> rec = [&](int k, int cap, int left) {
    if (k == r - 1) {
      out.push_back(p);
      return;
    }
    for (int x = 0; x <= std::min(cap, left); ++x) {
      p[k] = x;
      rec(k + 1, x, left - x);
    }
    p[k] = 0;
  };
  rec(0, bound, bound);
  std::sort(out.begin(), out.end());
  return out;
}

// Set partitions of {0..n-1} into exactly g nonempty blocks.
inline void for_each_set_partition(int n, int g, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> label(n, 0);
  std::function<void(int, int)> rec = [&](int k, int used) {
    if (n - k < g - used) return;
    if (k == n) {
      if (used == g) visit(label);
      return;
    }
    for (int b = 0; b <= std::min(used, g - 1); ++b) {
      label[k] = b;
      rec(k + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) {
    if (g == 0) visit(label);
    return;
  }
  rec(0, 0);
}

}  // namespace detail

/// Summands of the form (S^{alpha_1} W_1 x ... ) x L with L nef, rank <= c,
/// c_1 nef, -K - c_1 ample, and enough ample slack left to reach rank c.
inline IrreducibleSummands irreducible_summands(const Quiver& q, int c) {
  IrreducibleSummands out;
  if (c <= 0) return out;
  const ConeH nef = nef_cone(q);
  const DivisorClass k = anticanonical(q);
  const IntMatrix slack = detail::ample_slack(q);
  const std::set<IntVec> slack_set(slack.begin(), slack.end());
  const HilbertBasis hb = hilbert_basis(nef);
  const int rho = q.picard_rank();

  std::vector<std::vector<Partition>> choices(rho);
  for (int i = 1; i <= rho; ++i) {
    std::int64_t bound = 0;
    for (const auto& z : slack) bound = std::max(bound, z[i - 1]);
    for (auto& alpha : detail::shapes(q.rank(i), static_cast<int>(bound))) {
      if (schur_rank(alpha, q.rank(i)) <= c) choices[i - 1].push_back(std::move(alpha));
    }
  }

  BundleSummand shape;
  shape.partitions.resize(rho);
  std::function<void(int, std::int64_t)> rec = [&](int i, std::int64_t rank) {
    if (i == rho) {
      const DivisorClass s = summand_first_chern(shape, q);
      if (!slack_set.count(s)) return;
      const bool zero_shape = is_trivial_summand(shape);
      for (const auto& l : slack) {
        if (zero_shape && is_zero(l)) continue;
        const DivisorClass c1 = add(s, scale(l, rank));
        const DivisorClass rest = sub(k, c1);
        if (!contains_strictly(nef, rest)) continue;
        if (rank < c) {
          const bool completable = std::any_of(hb.elements.begin(), hb.elements.end(),
                                               [&](const IntVec& h) { return contains_strictly(nef, sub(rest, h)); });
          if (!completable) continue;
        }
        BundleSummand t = shape;
        for (int v = 0; v < rho; ++v) {
          for (int& x : t.partitions[v]) x += static_cast<int>(l[v]);
        }
        (rank >= 2 ? out.irr1 : out.irr2).push_back(std::move(t));
      }
      return;
    }
    for (const auto& alpha : choices[i]) {
      const std::int64_t r = rank * schur_rank(alpha, q.rank(i + 1));
      if (r > c) continue;
      shape.partitions[i] = alpha;
      rec(i + 1, r);
    }
  };
  rec(0, 1);
  std::sort(out.irr1.begin(), out.irr1.end());
  std::sort(out.irr2.begin(), out.irr2.end());
  return out;
}

/// Bundles of rank exactly c = dim - target_dim built from irreducible
/// summands with -K_X ample, one per bundle normal form.
inline std::vector<BundleSpec> search_bundles(const Quiver& q, int target_dim = 4) {
  const int c = q.dimension() - target_dim;
  if (c < 0) return {};
  if (c == 0) return {BundleSpec{}};
  const ConeH nef = nef_cone(q);
  const DivisorClass k = anticanonical(q);
  const IrreducibleSummands irr = irreducible_summands(q, c);
  const IntMatrix slack = detail::ample_slack(q);
  const HilbertBasis hb = hilbert_basis(nef);

  std::map<IntVec, std::vector<BundleSummand>> irr1_by_c1;
  for (const auto& s : irr.irr1) irr1_by_c1[summand_first_chern(s, q)].push_back(s);
  std::map<IntVec, BundleSummand> irr2_by_c1;
  for (const auto& s : irr.irr2) irr2_by_c1.emplace(summand_first_chern(s, q), s);

  std::map<BundleNormalForm, BundleSpec> found;
  auto emit = [&](std::vector<BundleSummand> summands) {
    BundleSpec e{std::move(summands)};
    std::sort(e.summands.begin(), e.summands.end());
    if (bundle_rank(e, q) != c) return;
    if (!contains_strictly(nef, sub(k, first_chern(e, q)))) return;
    found.emplace(bundle_normal_form(q, e), e);
  };

  auto group_sums = [&](const std::vector<int>& parts, const std::vector<int>& label, int g) {
    IntMatrix sums(g, IntVec(q.picard_rank(), 0));
    for (std::size_t p = 0; p < parts.size(); ++p) sums[label[p]] = add(sums[label[p]], hb.elements[parts[p]]);
    return sums;
  };

  for (const auto& x : slack) {
    // Stage one: higher-rank summands with total first Chern class x.
    std::set<std::vector<BundleSummand>> firsts;
    if (is_zero(x)) {
      firsts.insert(std::vector<BundleSummand>{});
    } else {
      for (const auto& parts : decompose_over_hilbert_basis(x, hb)) {
        for (int g = 1; g <= c / 2; ++g) {
          detail::for_each_set_partition(static_cast<int>(parts.size()), g, [&](const std::vector<int>& label) {
            const IntMatrix sums = group_sums(parts, label, g);
            std::vector<const std::vector<BundleSummand>*> options;
            for (const auto& s : sums) {
              auto it = irr1_by_c1.find(s);
              if (it == irr1_by_c1.end()) return;
              options.push_back(&it->second);
            }
            std::vector<BundleSummand> pick;
            std::function<void(std::size_t, std::int64_t)> choose = [&](std::size_t j, std::int64_t rank) {
              if (rank > c) return;
              if (j == options.size()) {
                auto sorted = pick;
                std::sort(sorted.begin(), sorted.end());
                firsts.insert(std::move(sorted));
                return;
              }
              for (const auto& s : *options[j]) {
                pick.push_back(s);
                choose(j + 1, rank + summand_rank(s, q));
                pick.pop_back();
              }
            };
            choose(0, 0);
          });
        }
      }
    }

    // Stage two: fill the remaining rank with nef line bundles.
    for (const auto& first : firsts) {
      std::int64_t used = 0;
      for (const auto& s : first) used += summand_rank(s, q);
      const int rest = c - static_cast<int>(used);
      if (rest == 0) {
        emit(first);
        continue;
      }
      for (const auto& y : slack) {
        if (is_zero(y) || !contains_strictly(nef, sub(sub(k, x), y))) continue;
        for (const auto& parts : decompose_over_hilbert_basis(y, hb)) {
          if (static_cast<int>(parts.size()) < rest) continue;
          detail::for_each_set_partition(static_cast<int>(parts.size()), rest, [&](const std::vector<int>& label) {
            std::vector<BundleSummand> all = first;
            for (const auto& s : group_sums(parts, label, rest)) {
              auto it = irr2_by_c1.find(s);
              if (it == irr2_by_c1.end()) return;
              all.push_back(it->second);
            }
            emit(std::move(all));
          });
        }
      }
    }
  }

  std::vector<BundleSpec> out;
  for (auto& [nf, e] : found) out.push_back(std::move(e));
  return out;
}

/// Sufficient emptiness test: a source-fed vertex with 2 r_i - 1 > s_i
/// carrying a Lambda^2 or Sym^2 summand.
inline bool is_known_empty(const Quiver& q, const BundleSpec& e) {
  check_bundle(e, q);
  for (int i = 1; i < q.size(); ++i) {
    bool source_fed = true;
    for (int k = 1; k < i; ++k) {
      if (q.arrows(k, i) > 0) source_fed = false;
    }
    if (!source_fed || 2 * q.rank(i) - 1 <= q.incoming_rank(i)) continue;
    Partition wedge(q.rank(i), 0), sym(q.rank(i), 0);
    sym[0] = 2;
    wedge[0] = 1;
    if (q.rank(i) >= 2) wedge[1] = 1;
    for (const auto& s : e.summands) {
      bool others_zero = true;
      for (int j = 1; j < q.size(); ++j) {
        if (j == i) continue;
        for (int x : s.partitions[j - 1]) others_zero = others_zero && x == 0;
      }
      if (!others_zero) continue;
      const auto& p = s.partitions[i - 1];
      if (p == sym || (q.rank(i) >= 2 && p == wedge)) return true;
    }
  }
  return false;
}

struct ZeroLocusRecord {
  int quiver_id = 0;
  BundleNormalForm model;
  int dimension = 0;
  int ambient_dimension = 0;
  int picard_rank = 0;
  Rational degree;
  Rational euler;
  Rational chi_O;
  std::vector<Rational> hilbert;
  std::vector<Rational> period;
};

struct Bucket {
  int id = 0;
  std::vector<Rational> key;
  std::vector<std::size_t> members;  // indices into the kept records
  bool collision = false;
  std::string report;
};

struct ScreenResult {
  std::vector<ZeroLocusRecord> kept;
  std::size_t discarded = 0;
  std::vector<Bucket> buckets;
};

/// Drops records with chi(O) != 1 and groups the rest by period sequence,
/// flagging buckets whose members disagree on degree, Euler number or
/// Hilbert coefficients.
inline ScreenResult screen_and_bucket(const std::vector<ZeroLocusRecord>& records) {
  ScreenResult res;
  std::map<std::vector<Rational>, std::size_t> index;
  for (const auto& r : records) {
    if (r.chi_O != 1) {
      ++res.discarded;
      continue;
    }
    const std::size_t pos = res.kept.size();
    res.kept.push_back(r);
    auto [it, fresh] = index.emplace(r.period, res.buckets.size());
    if (fresh) {
      Bucket b;
      b.id = static_cast<int>(res.buckets.size()) + 1;
      b.key = r.period;
      res.buckets.push_back(std::move(b));
    }
    Bucket& b = res.buckets[it->second];
    if (!b.members.empty()) {
      const auto& head = res.kept[b.members.front()];
      if (head.degree != r.degree || head.euler != r.euler || head.hilbert != r.hilbert) {
        b.collision = true;
        const Error err(ErrorCode::BucketInvariantMismatch,
                        "quiver " + std::to_string(r.quiver_id) + " disagrees with quiver " +
                            std::to_string(head.quiver_id) + " in bucket " + std::to_string(b.id));
        if (!b.report.empty()) b.report += "; ";
        b.report += err.what();
      }
    }
    b.members.push_back(pos);
  }
  return res;
}

namespace detail {

// W_s^* x W_t (or W_t when s is the source) as a summand, else nullopt.
inline std::optional<std::pair<int, int>> arrow_class(const Quiver& q, const BundleSummand& s) {
  int t = -1, src = 0;
  for (int i = 1; i < q.size(); ++i) {
    const auto& p = s.partitions[i - 1];
    if (std::all_of(p.begin(), p.end(), [](int x) { return x == 0; })) continue;
    Partition unit(q.rank(i), 0);
    unit[0] = 1;
    if (p == unit && t < 0) {
      t = i;
    } else if (q.rank(i) == 1 && p[0] == -1 && src == 0) {
      src = i;
    } else {
      return std::nullopt;
    }
  }
  if (t < 0 || src >= t) return std::nullopt;
  return std::make_pair(src, t);
}

inline std::optional<std::pair<Quiver, BundleSpec>> strip_arrow(const Quiver& q, const BundleSpec& e) {
  for (std::size_t k = 0; k < e.summands.size(); ++k) {
    auto st = arrow_class(q, e.summands[k]);
    if (!st) continue;
    auto [s, t] = *st;
    if (q.arrows(s, t) == 0 || q.incoming_rank(t) - q.rank(s) < q.rank(t)) continue;
    auto adj = q.adjacency();
    --adj[s][t];
    BundleSpec rest = e;
    rest.summands.erase(rest.summands.begin() + static_cast<long>(k));
    return std::make_pair(Quiver(std::move(adj), q.ranks()), std::move(rest));
  }
  return std::nullopt;
}

inline std::optional<std::pair<Quiver, BundleSpec>> contract_once(const Quiver& q, const BundleSpec& e) {
  for (int i = 1; i < q.size(); ++i) {
    if (q.incoming_rank(i) != q.rank(i)) continue;
    BundleSpec next = e;
    if (q.rank(i) == 1) {
      int k = 0;
      while (q.arrows(k, i) == 0) ++k;
      for (auto& s : next.summands) {
        if (k > 0) s.partitions[k - 1][0] += s.partitions[i - 1][0];
      }
    } else {
      const bool untouched = std::all_of(e.summands.begin(), e.summands.end(), [&](const BundleSummand& s) {
        const auto& p = s.partitions[i - 1];
        return std::all_of(p.begin(), p.end(), [](int x) { return x == 0; });
      });
      if (!untouched) continue;
    }
    for (auto& s : next.summands) s.partitions.erase(s.partitions.begin() + (i - 1));
    return std::make_pair(remove_vertex(q, i), std::move(next));
  }
  return std::nullopt;
}

inline std::optional<std::pair<Quiver, BundleSpec>> graft_once(const Quiver& q, const BundleSpec& e) {
  const int n = q.size();
  for (int i = 1; i + 1 < n; ++i) {
    if (q.rank(i) != 1) continue;
    // Vertices left without a route to the source once i's out-arrows go.
    std::vector<char> all_out(n, 0);
    for (int j = i + 1; j < n; ++j) all_out[j] = q.arrows(i, j) > 0;
    const auto comp = components_without(q, i, all_out);
    std::vector<int> s;
    for (int v = 1; v < n; ++v) {
      if (comp[v] != comp[0]) s.push_back(v);
    }
    if (s.empty() || graft_failure(q, i, s)) continue;
    BundleSpec next = e;
    for (auto& summand : next.summands) {
      int gain = 0;
      for (int j : s) gain += partition_size(summand.partitions[j - 1]);
      summand.partitions[i - 1][0] += gain;
    }
    return std::make_pair(graft(q, i, s), std::move(next));
  }
  return std::nullopt;
}

}  // namespace detail

/// Greedily removes arrow-class summands, contracts trivial vertices and
/// grafts, until none applies.
inline std::pair<Quiver, BundleSpec> simplify_model(Quiver q, BundleSpec e) {
  check_bundle(e, q);
  while (true) {
    auto step = detail::strip_arrow(q, e);
    if (!step) step = detail::contract_once(q, e);
    if (!step) step = detail::graft_once(q, e);
    if (!step) break;
    q = std::move(step->first);
    e = std::move(step->second);
  }
  return {std::move(q), std::move(e)};
}

}  // namespace qflag
