#pragma once

// Rooted-DAG proof certificates: deductive edges E_d (premise → conclusion)
// carrying dependency bitstrings L and optional indices ρ, and ancestrality
// edges E_A carrying indices δ. Also the structural validity report and the
// fragment operations used by detach-and-link.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mimply/derivation.hpp"

namespace mimply {

using Index = std::uint64_t;

struct DEdge {
  NodeId from;
  NodeId to;
  std::optional<Bitstring> bits;
  std::optional<Index> rho;
};

struct AEdge {
  NodeId from;
  NodeId to;
  Index delta;
};

struct RDagProof {
  SubformulaOrder order;
  std::vector<std::size_t> label;  // formula index into order, per node
  NodeId root = 0;
  std::vector<DEdge> d_edges;
  std::vector<AEdge> a_edges;

  std::size_t size() const noexcept { return label.size(); }
  const Formula& formula(NodeId v) const { return order[label.at(v)]; }
};

/// Sorts both edge arrays by (from, to) and then by index, for deterministic output.
inline void sort_edges(RDagProof& c) {
  std::stable_sort(c.d_edges.begin(), c.d_edges.end(), [](const DEdge& a, const DEdge& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.rho < b.rho;
  });
  std::stable_sort(c.a_edges.begin(), c.a_edges.end(), [](const AEdge& a, const AEdge& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.delta < b.delta;
  });
}

/// Tree certificate with the derivation's node ids: no ancestrality edges and
/// every deductive edge labeled by the premise's dependency set.
inline RDagProof from_derivation(const Derivation& d) {
  validate_derivation(d);
  RDagProof c{d.order, {}, d.root, {}, {}};
  c.label.reserve(d.nodes.size());
  for (const auto& n : d.nodes) c.label.push_back(d.order.index_of(n.formula));
  c.d_edges.reserve(d.nodes.size());
  for (NodeId i = 0; i < d.nodes.size(); ++i) {
    for (NodeId ch : d.nodes[i].children) c.d_edges.push_back(DEdge{ch, i, d.nodes[ch].dep, std::nullopt});
  }
  sort_edges(c);
  return c;
}

/// Incidence lists (edge indices) of a certificate. Edges whose endpoints are out
/// of range are left out.
struct Incidence {
  std::vector<std::vector<std::size_t>> in_d, out_d, in_a, out_a;

  explicit Incidence(const RDagProof& c)
      : in_d(c.size()), out_d(c.size()), in_a(c.size()), out_a(c.size()) {
    for (std::size_t e = 0; e < c.d_edges.size(); ++e) {
      const auto& x = c.d_edges[e];
      if (x.from >= c.size() || x.to >= c.size()) continue;
      out_d[x.from].push_back(e);
      in_d[x.to].push_back(e);
    }
    for (std::size_t e = 0; e < c.a_edges.size(); ++e) {
      const auto& x = c.a_edges[e];
      if (x.from >= c.size() || x.to >= c.size()) continue;
      out_a[x.from].push_back(e);
      in_a[x.to].push_back(e);
    }
  }
};

// ---------------------------------------------------------------------------
// Structural validity

struct ConditionResult {
  std::string name;
  bool ok = true;
  std::vector<std::string> offenders;

  void fail(std::string what) {
    ok = false;
    if (offenders.size() < 32) offenders.push_back(std::move(what));
  }
};

struct StructureReport {
  std::vector<ConditionResult> conditions;

  bool ok() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.ok; });
  }

  const ConditionResult& at(const std::string& name) const {
    for (const auto& c : conditions) {
      if (c.name == name) return c;
    }
    throw std::out_of_range("no condition named " + name);
  }

  /// Names of failed conditions, comma separated.
  std::string failed() const {
    std::string s;
    for (const auto& c : conditions) {
      if (c.ok) continue;
      if (!s.empty()) s += ", ";
      s += c.name;
    }
    return s;
  }
};

namespace cond {
inline constexpr const char* kWellFormed = "WellFormed";
inline constexpr const char* kGlobal = "Global";
inline constexpr const char* kIntro = "Ed-(l/L)1";
inline constexpr const char* kElim = "Ed-(l/L)2";
inline constexpr const char* kTarget = "EA-target";
inline constexpr const char* kSource = "EA-source";
inline constexpr const char* kIrreflexive = "EA-irreflexivity";
inline constexpr const char* kRhoDistinct = "rho-distinct";
inline constexpr const char* kDivergentTarget = "divergent-not-target";
}  // namespace cond

namespace detail {

inline std::string edge_str(NodeId a, NodeId b) {
  return "<" + std::to_string(a) + "," + std::to_string(b) + ">";
}

/// Breadth-first distance from the root along reversed deductive edges.
inline std::vector<std::size_t> bfs_levels(const RDagProof& c, const Incidence& inc) {
  constexpr std::size_t unseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> lv(c.size(), unseen);
  if (c.root >= c.size()) return lv;
  std::vector<NodeId> frontier{c.root};
  lv[c.root] = 0;
  for (std::size_t depth = 0; !frontier.empty(); ++depth) {
    std::vector<NodeId> next;
    for (NodeId v : frontier) {
      for (auto e : inc.in_d[v]) {
        NodeId u = c.d_edges[e].from;
        if (lv[u] == unseen) {
          lv[u] = depth + 1;
          next.push_back(u);
        }
      }
    }
    frontier = std::move(next);
  }
  return lv;
}

/// Premise edges of v ordered minor first when the formulas identify the roles.
inline std::vector<std::size_t> ordered_premises(const RDagProof& c, const Incidence& inc, NodeId v) {
  std::vector<std::size_t> in = inc.in_d[v];
  if (in.size() == 2) {
    const Formula& f0 = c.formula(c.d_edges[in[0]].from);
    const Formula& f1 = c.formula(c.d_edges[in[1]].from);
    bool zero_is_major = f0.is_imp() && f0.left() == f1 && f0.right() == c.formula(v);
    bool one_is_major = f1.is_imp() && f1.left() == f0 && f1.right() == c.formula(v);
    if (zero_is_major && !one_is_major) std::swap(in[0], in[1]);
  }
  return in;
}

inline bool elim_shape(const Formula& minor, const Formula& major, const Formula& concl) {
  return major.is_imp() && major.left() == minor && major.right() == concl;
}

}  // namespace detail

/// Evaluates every structural condition independently.
inline StructureReport validate_structure(const RDagProof& c) {
  StructureReport rep;
  const char* names[] = {cond::kWellFormed, cond::kGlobal,      cond::kIntro,
                         cond::kElim,       cond::kTarget,      cond::kSource,
                         cond::kIrreflexive, cond::kRhoDistinct, cond::kDivergentTarget};
  for (const char* n : names) rep.conditions.push_back(ConditionResult{n, true, {}});
  auto& wf = rep.conditions[0];
  auto& global = rep.conditions[1];
  auto& intro_c = rep.conditions[2];
  auto& elim_c = rep.conditions[3];
  auto& target = rep.conditions[4];
  auto& source = rep.conditions[5];
  auto& irrefl = rep.conditions[6];
  auto& rho_distinct = rep.conditions[7];
  auto& div_target = rep.conditions[8];

  const std::size_t n = c.size();
  if (n == 0) wf.fail("no nodes");
  if (c.root >= n && n > 0) wf.fail("root out of range");
  for (NodeId v = 0; v < n; ++v) {
    if (c.label[v] >= c.order.size()) wf.fail("node " + std::to_string(v) + " label out of range");
  }
  std::set<std::pair<NodeId, NodeId>> seen_d;
  for (const auto& e : c.d_edges) {
    if (e.from >= n || e.to >= n) {
      wf.fail("E_d " + detail::edge_str(e.from, e.to) + " endpoint out of range");
    } else if (!seen_d.emplace(e.from, e.to).second) {
      wf.fail("duplicate E_d " + detail::edge_str(e.from, e.to));
    }
    if (e.bits && e.bits->length() != c.order.size()) {
      wf.fail("E_d " + detail::edge_str(e.from, e.to) + " bitstring length");
    }
  }
  for (const auto& e : c.a_edges) {
    if (e.from >= n || e.to >= n) wf.fail("E_A " + detail::edge_str(e.from, e.to) + " endpoint out of range");
  }
  if (!wf.ok) {
    for (std::size_t i = 1; i < rep.conditions.size(); ++i) rep.conditions[i].fail("not evaluated");
    return rep;
  }

  const Incidence inc(c);

  // Global: every node reaches the root, and every edge goes exactly one level
  // down, so all root paths to a node have the same length.
  const auto lv = detail::bfs_levels(c, inc);
  for (NodeId v = 0; v < n; ++v) {
    if (lv[v] == static_cast<std::size_t>(-1)) global.fail("node " + std::to_string(v) + " does not reach the root");
  }
  for (const auto& e : c.d_edges) {
    if (e.from == e.to) {
      global.fail("self-loop " + detail::edge_str(e.from, e.to));
    } else if (lv[e.from] != static_cast<std::size_t>(-1) && lv[e.to] != static_cast<std::size_t>(-1) &&
               lv[e.from] != lv[e.to] + 1) {
      global.fail("unequal path lengths across " + detail::edge_str(e.from, e.to));
    }
  }

  for (NodeId v = 0; v < n; ++v) {
    const auto& in = inc.in_d[v];
    const Formula& fv = c.formula(v);
    if (in.size() == 1) {
      const DEdge& ein = c.d_edges[in[0]];
      if (!fv.is_imp() || fv.right() != c.formula(ein.from)) {
        intro_c.fail("node " + std::to_string(v) + " is not the intro of its premise");
        continue;
      }
      if (!ein.bits) continue;
      Bitstring want = *ein.bits;
      std::size_t k = c.order.find(fv.left());
      if (k != c.order.size()) want.reset(k);
      for (auto eo : inc.out_d[v]) {
        const DEdge& out = c.d_edges[eo];
        if (!out.rho && out.bits && *out.bits != want) {
          intro_c.fail("L on " + detail::edge_str(out.from, out.to) + " is not the discharge of its premise");
        }
      }
    } else if (in.size() == 2) {
      auto ord = detail::ordered_premises(c, inc, v);
      const DEdge& minor = c.d_edges[ord[0]];
      const DEdge& major = c.d_edges[ord[1]];
      if (!detail::elim_shape(c.formula(minor.from), c.formula(major.from), fv)) {
        elim_c.fail("node " + std::to_string(v) + " is not the elim of its premises");
        continue;
      }
      if (!minor.bits || !major.bits) continue;
      Bitstring want = bit_union(*minor.bits, *major.bits);
      for (auto eo : inc.out_d[v]) {
        const DEdge& out = c.d_edges[eo];
        if (!out.rho && out.bits && *out.bits != want) {
          elim_c.fail("L on " + detail::edge_str(out.from, out.to) + " is not the union of its premises");
        }
      }
    } else if (in.size() > 2) {
      elim_c.fail("node " + std::to_string(v) + " has " + std::to_string(in.size()) + " premises");
    }
  }

  for (const auto& a : c.a_edges) {
    std::string es = detail::edge_str(a.from, a.to);
    if (a.from == a.to) irrefl.fail(es);
    // Target: a deductive leaf, or itself the source of an E_A edge to another node.
    if (!inc.in_d[a.to].empty()) {
      bool ok = false;
      for (auto e2 : inc.out_a[a.to]) ok = ok || c.a_edges[e2].to != a.from;
      if (!ok) target.fail(es);
    }
    // Source: some premise edge into the source carries ρ equal to δ.
    bool ok = false;
    for (auto e2 : inc.in_d[a.from]) {
      const DEdge& d = c.d_edges[e2];
      ok = ok || (d.from != a.to && d.rho && *d.rho == a.delta);
    }
    if (!ok) source.fail(es + " delta " + std::to_string(a.delta));
  }

  for (NodeId v = 0; v < n; ++v) {
    std::set<Index> rhos;
    for (auto e : inc.out_d[v]) {
      const auto& r = c.d_edges[e].rho;
      if (r && !rhos.insert(*r).second) rho_distinct.fail("node " + std::to_string(v) + " index " + std::to_string(*r));
    }
    if (inc.out_d[v].size() >= 2 && !inc.in_a[v].empty()) div_target.fail("node " + std::to_string(v));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Fragments: node subsets of a certificate with the induced edges. They are
// not certificates themselves and are only meaningful with their parent.

struct Fragment {
  std::vector<NodeId> nodes;         // ascending
  std::optional<NodeId> root;
  std::vector<std::size_t> d_edges;  // indices into the parent's d_edges
  std::vector<std::size_t> a_edges;  // indices into the parent's a_edges

  std::size_t size() const noexcept { return nodes.size(); }
  bool contains(NodeId v) const { return std::binary_search(nodes.begin(), nodes.end(), v); }
};

/// Fragment induced by `vs`; `root` is kept only if it belongs to the set.
inline Fragment restrict(const RDagProof& c, std::vector<NodeId> vs, std::optional<NodeId> root = std::nullopt) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  for (NodeId v : vs) {
    if (v >= c.size()) throw std::out_of_range("restrict: node " + std::to_string(v) + " not in DAG");
  }
  Fragment f;
  f.nodes = std::move(vs);
  if (!root && f.contains(c.root)) root = c.root;
  if (root && f.contains(*root)) f.root = root;
  for (std::size_t e = 0; e < c.d_edges.size(); ++e) {
    if (f.contains(c.d_edges[e].from) && f.contains(c.d_edges[e].to)) f.d_edges.push_back(e);
  }
  for (std::size_t e = 0; e < c.a_edges.size(); ++e) {
    if (f.contains(c.a_edges[e].from) && f.contains(c.a_edges[e].to)) f.a_edges.push_back(e);
  }
  return f;
}

namespace detail {

inline std::vector<NodeId> up_nodes(const RDagProof& c, const Incidence& inc, NodeId k) {
  std::vector<char> seen(c.size(), 0);
  std::vector<NodeId> stack{k}, out;
  seen[k] = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    out.push_back(v);
    for (auto e : inc.in_d[v]) {
      NodeId u = c.d_edges[e].from;
      if (!seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return out;
}

}  // namespace detail

/// The maximal sub-DAG rooted at k: every node from which k is deductively reachable.
inline Fragment up(const RDagProof& c, NodeId k) {
  if (k >= c.size()) throw std::out_of_range("up: node not in DAG");
  return restrict(c, detail::up_nodes(c, Incidence(c), k), k);
}

inline Fragment difference(const RDagProof& d, const Fragment& f) {
  std::vector<NodeId> rest;
  for (NodeId v = 0; v < d.size(); ++v) {
    if (!f.contains(v)) rest.push_back(v);
  }
  return restrict(d, std::move(rest), f.contains(d.root) ? std::nullopt : std::optional<NodeId>(d.root));
}

/// Nodes of the fragment whose every incoming deductive edge inside the
/// fragment carries an index: deductive leaves, plus consumers that read all
/// their premises from shared copies. These are the nodes whose entailment
/// slots are seeded rather than inherited.
inline std::vector<NodeId> initials(const RDagProof& c, const Fragment& f) {
  std::vector<char> has_plain(c.size(), 0);
  for (auto e : f.d_edges) {
    if (!c.d_edges[e].rho) has_plain[c.d_edges[e].to] = 1;
  }
  std::vector<NodeId> out;
  for (NodeId v : f.nodes) {
    if (!has_plain[v]) out.push_back(v);
  }
  return out;
}

inline std::vector<NodeId> initials(const RDagProof& c) {
  std::vector<NodeId> all(c.size());
  for (NodeId v = 0; v < c.size(); ++v) all[v] = v;
  return initials(c, restrict(c, std::move(all)));
}

}  // namespace mimply
