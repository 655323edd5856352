#pragma once

// Detach-and-link, collapse and compress.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "mimply/rdag.hpp"
#include "mimply/redundancy.hpp"

namespace mimply {

class NotAnInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndexCollision : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

// Mutable working copy used by the pipeline. Node ids are stable; removed
// nodes and edges are flagged dead and dropped by finish().
class WorkDag {
 public:
  explicit WorkDag(const RDagProof& c) : order_(c.order), label_(c.label), root_(c.root) {
    alive_.assign(c.size(), 1);
    in_d_.resize(c.size());
    out_d_.resize(c.size());
    in_a_.resize(c.size());
    out_a_.resize(c.size());
    for (const auto& e : c.d_edges) add_d(e.from, e.to, e.bits, e.rho);
    for (const auto& e : c.a_edges) add_a(e.from, e.to, e.delta);
    for (const auto& e : c.d_edges) {
      if (e.rho) next_index_ = std::max(next_index_, *e.rho + 1);
    }
    for (const auto& e : c.a_edges) next_index_ = std::max(next_index_, e.delta + 1);
  }

  Index fresh() { return next_index_++; }
  Index peek_fresh() const { return next_index_; }
  bool alive(NodeId v) const { return alive_[v] != 0; }

  std::size_t out_degree(NodeId v) const {
    std::size_t k = 0;
    for (auto e : out_d_[v]) k += d_[e].alive;
    return k;
  }

  /// Premise edges of v without an index.
  std::size_t plain_premises(NodeId v) const {
    std::size_t k = 0;
    for (auto e : in_d_[v]) k += d_[e].alive && !d_[e].rho;
    return k;
  }

  std::optional<NodeId> sole_consumer(NodeId v) const {
    std::optional<NodeId> out;
    for (auto e : out_d_[v]) {
      if (!d_[e].alive) continue;
      if (out) return std::nullopt;
      out = d_[e].to;
    }
    return out;
  }

  bool plain_edge(NodeId from, NodeId to) const {
    for (auto e : out_d_[from]) {
      if (d_[e].alive && d_[e].to == to) return !d_[e].rho;
    }
    return false;
  }

  std::vector<NodeId> up_nodes(NodeId k) const {
    std::vector<NodeId> stack{k}, out;
    std::set<NodeId> seen{k};
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      out.push_back(v);
      for (auto e : in_d_[v]) {
        if (!d_[e].alive) continue;
        NodeId u = d_[e].from;
        if (seen.insert(u).second) stack.push_back(u);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Members of `nodes` whose premise edges inside the set all carry an index.
  std::vector<NodeId> initials_of(const std::vector<NodeId>& nodes) const {
    std::vector<NodeId> out;
    for (NodeId v : nodes) {
      bool plain = false;
      for (auto e : in_d_[v]) {
        plain = plain || (d_[e].alive && !d_[e].rho && std::binary_search(nodes.begin(), nodes.end(), d_[e].from));
      }
      if (!plain) out.push_back(v);
    }
    return out;
  }

  /// Removes up(k), re-links each consumer of k to `canon` through index i, and
  /// points the consumers' ancestrality edges at `inits`. Seeds that entered the
  /// removed nodes from outside are handed to a consumer left with no plain
  /// premise, so its slots keep the same indices.
  void detach_link(NodeId k, NodeId canon, Index i, const std::vector<NodeId>& inits) {
    const std::vector<NodeId> gone = up_nodes(k);
    auto in_gone = [&](NodeId v) { return std::binary_search(gone.begin(), gone.end(), v); };

    for (NodeId u : gone) {
      for (auto e : out_d_[u]) {
        if (d_[e].alive && u != k && !in_gone(d_[e].to)) {
          throw NotAnInstance("node " + std::to_string(u) + " of the detached part is used outside it");
        }
      }
    }

    std::vector<std::pair<NodeId, Index>> lost;
    for (NodeId u : gone) {
      for (auto e : in_a_[u]) {
        if (!a_[e].alive) continue;
        if (!in_gone(a_[e].from)) lost.emplace_back(a_[e].from, a_[e].delta);
        a_[e].alive = 0;
      }
      for (auto e : out_a_[u]) a_[e].alive = 0;
    }
    std::vector<std::pair<NodeId, std::optional<Bitstring>>> consumers;
    for (NodeId u : gone) {
      for (auto e : out_d_[u]) {
        if (!d_[e].alive) continue;
        if (u == k) consumers.emplace_back(d_[e].to, d_[e].bits);
        d_[e].alive = 0;
      }
      for (auto e : in_d_[u]) d_[e].alive = 0;
      alive_[u] = 0;
    }

    for (const auto& [v, bits] : consumers) {
      add_d(canon, v, bits, i);
      for (NodeId w : inits) add_a(v, w, i);
    }
    std::sort(lost.begin(), lost.end());
    lost.erase(std::unique(lost.begin(), lost.end()), lost.end());
    for (const auto& cons : consumers) {
      NodeId v = cons.first;
      if (plain_premises(v) != 0) continue;
      for (const auto& [w, delta] : lost) {
        if (!alive_[w] || w == v || has_a(w, v, delta)) continue;
        add_a(w, v, delta);
      }
    }
  }

  /// Compacts surviving nodes in id order. `remap` receives old → new ids.
  RDagProof finish(std::vector<NodeId>* remap = nullptr) const {
    std::vector<NodeId> id(label_.size(), kNoNode);
    RDagProof c{order_, {}, 0, {}, {}};
    for (NodeId v = 0; v < label_.size(); ++v) {
      if (!alive_[v]) continue;
      id[v] = c.label.size();
      c.label.push_back(label_[v]);
    }
    c.root = id[root_];
    for (const auto& e : d_) {
      if (e.alive) c.d_edges.push_back(DEdge{id[e.from], id[e.to], e.bits, e.rho});
    }
    for (const auto& e : a_) {
      if (e.alive) c.a_edges.push_back(AEdge{id[e.from], id[e.to], e.delta});
    }
    sort_edges(c);
    if (remap) *remap = std::move(id);
    return c;
  }

 private:
  struct WD {
    NodeId from, to;
    std::optional<Bitstring> bits;
    std::optional<Index> rho;
    char alive;
  };
  struct WA {
    NodeId from, to;
    Index delta;
    char alive;
  };

  void add_d(NodeId from, NodeId to, std::optional<Bitstring> bits, std::optional<Index> rho) {
    out_d_[from].push_back(d_.size());
    in_d_[to].push_back(d_.size());
    d_.push_back(WD{from, to, std::move(bits), rho, 1});
  }
  void add_a(NodeId from, NodeId to, Index delta) {
    out_a_[from].push_back(a_.size());
    in_a_[to].push_back(a_.size());
    a_.push_back(WA{from, to, delta, 1});
  }
  bool has_a(NodeId from, NodeId to, Index delta) const {
    for (auto e : out_a_[from]) {
      if (a_[e].alive && a_[e].to == to && a_[e].delta == delta) return true;
    }
    return false;
  }

  SubformulaOrder order_;
  std::vector<std::size_t> label_;
  NodeId root_;
  std::vector<char> alive_;
  std::vector<WD> d_;
  std::vector<WA> a_;
  std::vector<std::vector<std::size_t>> in_d_, out_d_, in_a_, out_a_;
  Index next_index_ = 1;
};

}  // namespace detail

/// True when up(d, k) is isomorphic to `c` as a labeled graph: formulas,
/// premise roles, bitstrings and indices on internal edges, and internal
/// ancestrality edges all correspond.
inline bool is_instance(const RDagProof& d, NodeId k, const Fragment& c) {
  if (!c.root || k >= d.size()) return false;
  const Incidence inc(d);
  Fragment fk = restrict(d, detail::up_nodes(d, inc, k), k);
  if (fk.size() != c.size() || fk.d_edges.size() != c.d_edges.size() || fk.a_edges.size() != c.a_edges.size()) {
    return false;
  }
  std::map<NodeId, NodeId> fwd, bwd;
  std::vector<std::pair<NodeId, NodeId>> stack{{k, *c.root}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    auto fx = fwd.find(x);
    auto by = bwd.find(y);
    if (fx != fwd.end() || by != bwd.end()) {
      if (fx == fwd.end() || by == bwd.end() || fx->second != y || by->second != x) return false;
      continue;
    }
    if (!c.contains(y) || d.label[x] != d.label[y]) return false;
    fwd[x] = y;
    bwd[y] = x;
    auto px = detail::ordered_premises(d, inc, x);
    auto py = detail::ordered_premises(d, inc, y);
    std::vector<std::size_t> py_inside;
    for (auto e : py) {
      if (c.contains(d.d_edges[e].from)) py_inside.push_back(e);
    }
    if (px.size() != py_inside.size()) return false;
    for (std::size_t j = 0; j < px.size(); ++j) {
      const DEdge& ex = d.d_edges[px[j]];
      const DEdge& ey = d.d_edges[py_inside[j]];
      if (ex.bits != ey.bits || ex.rho != ey.rho) return false;
      stack.push_back({ex.from, ey.from});
    }
  }
  std::multiset<std::tuple<NodeId, NodeId, Index>> ax, ay;
  for (auto e : fk.a_edges) ax.emplace(fwd[d.a_edges[e].from], fwd[d.a_edges[e].to], d.a_edges[e].delta);
  for (auto e : c.a_edges) ay.emplace(d.a_edges[e].from, d.a_edges[e].to, d.a_edges[e].delta);
  return ax == ay;
}

namespace detail {

inline void check_detach_preconditions(const RDagProof& d, NodeId k, const Fragment& c, Index i) {
  if (!c.root) throw NotAnInstance("matrix fragment has no root");
  if (k >= d.size()) throw NotAnInstance("node out of range");
  if (k == *c.root || c.contains(k)) throw NotAnInstance("the canonical copy is never detached");
  if (!is_instance(d, k, c)) throw NotAnInstance("up(" + std::to_string(k) + ") is not an instance of the matrix");
  if (i == 0) throw IndexCollision("index 0 is reserved");
  for (const auto& e : d.d_edges) {
    if (e.from == *c.root && e.rho == i) throw IndexCollision("index " + std::to_string(i) + " already used");
  }
}

}  // namespace detail

/// Replaces the instance rooted at k by a reference to the matrix copy c
/// through index i.
inline RDagProof detach_link(const RDagProof& d, NodeId k, const Fragment& c, Index i) {
  detail::check_detach_preconditions(d, k, c, i);
  detail::WorkDag w(d);
  std::vector<NodeId> inits = initials(d, c);
  w.detach_link(k, *c.root, i, inits);
  return w.finish();
}

struct IndexOrigin {
  Index index;
  NodeId matrix;        // canonical root, in the ids of the input
  std::size_t ordinal;  // 1 for the first detached instance, and so on
};

/// Keeps Y[0] as the canonical copy and detaches every other instance with a
/// fresh index. Node ids in `origins` refer to the input certificate.
inline RDagProof collapse(const RDagProof& d, const std::vector<NodeId>& Y, const Fragment& c,
                          std::vector<IndexOrigin>* origins = nullptr) {
  if (Y.size() <= 1) return d;
  if (!c.root) throw NotAnInstance("matrix fragment has no root");
  detail::WorkDag w(d);
  const std::vector<NodeId> inits = initials(d, c);
  Index first = w.peek_fresh();
  for (std::size_t j = 1; j < Y.size(); ++j) {
    detail::check_detach_preconditions(d, Y[j], c, first + (j - 1));
  }
  for (std::size_t j = 1; j < Y.size(); ++j) {
    Index i = w.fresh();
    w.detach_link(Y[j], *c.root, i, inits);
    if (origins) origins->push_back(IndexOrigin{i, *c.root, j});
  }
  return w.finish();
}

// ---------------------------------------------------------------------------

struct CompressParams {
  RedundancyParams redundancy;
  /// Exponent of the size gate |T| > m^p, m the conclusion size. Only consulted
  /// when enforce_size_gate is set; by default any repetition triggers compression.
  std::size_t p = 4;
  bool enforce_size_gate = false;

  void validate() const {
    redundancy.validate();
    if (p <= 3) throw std::invalid_argument("p must be greater than 3");
  }
};

struct CompressStats {
  std::size_t passes = 0;        // level passes, one per level from the lowest repeated level up
  std::size_t groups = 0;        // matrices collapsed
  std::size_t detached = 0;      // instances replaced by links
  std::size_t kept_for_divergence = 0;
  std::vector<IndexOrigin> origins;  // matrix ids are derivation node ids
};

/// Level-by-level compression. Starting at the lowest level holding an
/// independent repeated matrix, each pass groups the live nodes of one level
/// by subtree identity and collapses every group onto one canonical copy. The
/// canonical copies stay in place and are compressed further by later passes,
/// since everything above a level is still a plain tree when it is reached.
///
/// An instance is kept rather than detached when its consumer already feeds
/// several conclusions and would otherwise be left reading only through indexed
/// edges.
inline RDagProof compress(const Derivation& d, const CompressParams& params = {}, CompressStats* stats = nullptr) {
  params.validate();
  CompressStats local;
  CompressStats& st = stats ? *stats : local;
  st = CompressStats{};

  RDagProof tree = from_derivation(d);
  const Fingerprints fp = fingerprints(d);
  const auto independent = lri(d, fp, params.redundancy);
  if (independent.empty()) return tree;
  if (params.enforce_size_gate) {
    double gate = std::pow(static_cast<double>(conclusion(d).size()), static_cast<double>(params.p));
    if (static_cast<double>(d.size()) <= gate) return tree;
  }
  std::size_t start = independent.front().level;
  for (const auto& g : independent) start = std::min(start, g.level);

  std::size_t h = 0;
  for (auto l : fp.level) h = std::max(h, l);
  std::vector<std::vector<NodeId>> at_level(h + 1);
  for (NodeId v = 0; v < d.size(); ++v) {
    if (fp.size[v] >= params.redundancy.min_size) at_level[fp.level[v]].push_back(v);
  }

  detail::WorkDag w(tree);
  for (std::size_t level = start; level <= h; ++level) {
    ++st.passes;
    std::map<std::size_t, std::vector<NodeId>> by_class;
    for (NodeId v : at_level[level]) {
      if (w.alive(v)) by_class[fp.cls[v]].push_back(v);
    }
    std::vector<std::vector<NodeId>> groups;
    for (auto& [cls, members] : by_class) {
      if (members.size() >= params.redundancy.min_count) groups.push_back(std::move(members));
    }
    std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
      if (fp.size[a[0]] != fp.size[b[0]]) return fp.size[a[0]] > fp.size[b[0]];
      return a[0] < b[0];
    });

    for (const auto& members : groups) {
      auto pinned_in = [&](NodeId x) {
        auto cons = w.sole_consumer(x);
        return cons && w.out_degree(*cons) >= 2 && w.plain_premises(*cons) == 1 && w.plain_edge(x, *cons);
      };
      NodeId canon = members[0];
      for (NodeId x : members) {
        if (pinned_in(x)) {
          canon = x;
          break;
        }
      }
      const std::vector<NodeId> inits = w.initials_of(w.up_nodes(canon));
      std::size_t ordinal = 0;
      bool any = false;
      for (NodeId x : members) {
        if (x == canon) continue;
        if (pinned_in(x)) {
          ++st.kept_for_divergence;
          continue;
        }
        Index i = w.fresh();
        w.detach_link(x, canon, i, inits);
        st.origins.push_back(IndexOrigin{i, canon, ++ordinal});
        ++st.detached;
        any = true;
      }
      if (any) ++st.groups;
    }
  }
  return w.finish();
}

}  // namespace mimply
