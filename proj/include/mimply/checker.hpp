#pragma once

// Local entailment over certificates and the verdict procedure.
//
// Every node v holds a register Reg(v): index → sequent Δ ⊢ ℓ(v). Indices not
// present are undefined. The rules, shared by both evaluators below:
//
//  * A deductive leaf holds {ℓ(v)} ⊢ ℓ(v) at index 0 and at every δ of an
//    incoming ancestrality edge.
//  * A premise edge ⟨u,v⟩ with index ρ is read at Reg(u)[ρ] for every index of
//    v. A plain edge is read index-wise, and exports the indices of Reg(u) minus
//    those u sends out through indexed edges.
//  * An internal node takes its index set from its plain premises. Two plain
//    premises exporting different index sets make the node undefined
//    everywhere. A node whose premises are all indexed takes index 0 plus its
//    incoming δ values, like a leaf.
//  * At each index the premises must fit ⊃-Intro (antecedent discharged) or
//    ⊃-Elim (antecedents united); otherwise that index is undefined.
//  * A node with several outgoing deductive edges must define every index it
//    sends out, and must not be an ancestrality target; otherwise it is
//    undefined everywhere.
//  * Wherever an edge carries a bitstring, it must equal the antecedent read
//    through it. A violation is recorded as a label mismatch.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mimply/rdag.hpp"

namespace mimply {

struct Sequent {
  Bitstring antecedent;
  std::size_t succedent;  // formula index

  friend bool operator==(const Sequent& a, const Sequent& b) {
    return a.succedent == b.succedent && a.antecedent == b.antecedent;
  }
  friend bool operator!=(const Sequent& a, const Sequent& b) { return !(a == b); }
};

using LocalEntailment = std::optional<Sequent>;

inline std::string to_string(const LocalEntailment& e, const SubformulaOrder& order) {
  if (!e) return "undefined";
  std::string s = "{";
  bool first = true;
  for (const auto& f : decode(e->antecedent, order)) {
    if (!first) s += ", ";
    first = false;
    s += f.str();
  }
  return s + "} |- " + order[e->succedent].str();
}

struct EntailmentTable {
  std::vector<std::map<Index, Sequent>> reg;
  std::vector<std::size_t> label_mismatches;  // d_edge indices, ascending

  LocalEntailment at(NodeId v, Index j) const {
    auto it = reg.at(v).find(j);
    if (it == reg[v].end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const EntailmentTable& a, const EntailmentTable& b) {
    return a.reg == b.reg && a.label_mismatches == b.label_mismatches;
  }
};

/// Length of the longest deductive path from v up to a deductive leaf,
/// counting nodes; 1 on leaves.
inline std::vector<std::size_t> rdh_all(const RDagProof& c) {
  const Incidence inc(c);
  const auto lv = detail::bfs_levels(c, inc);
  std::vector<NodeId> order(c.size());
  for (NodeId v = 0; v < c.size(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return lv[a] > lv[b]; });
  std::vector<std::size_t> r(c.size(), 1);
  for (NodeId v : order) {
    for (auto e : inc.in_d[v]) r[v] = std::max(r[v], r[c.d_edges[e].from] + 1);
  }
  return r;
}

inline std::size_t rdh(const RDagProof& c, NodeId v) { return rdh_all(c).at(v); }

namespace detail {

inline std::optional<Sequent> apply_intro(const RDagProof& c, NodeId v, const Sequent& p) {
  const Formula& f = c.formula(v);
  if (!f.is_imp() || f.right() != c.order[p.succedent]) return std::nullopt;
  Sequent s{p.antecedent, c.label[v]};
  std::size_t k = c.order.find(f.left());
  if (k != c.order.size()) s.antecedent.reset(k);
  return s;
}

inline std::optional<Sequent> apply_elim(const RDagProof& c, NodeId v, const Sequent& a, const Sequent& b) {
  const Formula& fa = c.order[a.succedent];
  const Formula& fb = c.order[b.succedent];
  const Formula& fv = c.formula(v);
  if (!elim_shape(fa, fb, fv) && !elim_shape(fb, fa, fv)) return std::nullopt;
  return Sequent{bit_union(a.antecedent, b.antecedent), c.label[v]};
}

inline std::set<Index> pinned_out(const RDagProof& c, const Incidence& inc, NodeId u) {
  std::set<Index> s;
  for (auto e : inc.out_d[u]) {
    if (c.d_edges[e].rho) s.insert(*c.d_edges[e].rho);
  }
  return s;
}

inline std::set<Index> seed_indices(const RDagProof& c, const Incidence& inc, NodeId v) {
  std::set<Index> s{0};
  for (auto e : inc.in_a[v]) s.insert(c.a_edges[e].delta);
  return s;
}

}  // namespace detail

/// Reference evaluator: memoized recursion along premises, following the node
/// classification (leaf, internal, divergent, target of a divergent node).
/// Requires a structurally valid certificate.
inline EntailmentTable local_entailment(const RDagProof& c) {
  if (!validate_structure(c).ok()) throw std::invalid_argument("local_entailment: certificate is not structurally valid");
  const Incidence inc(c);
  EntailmentTable t;
  t.reg.resize(c.size());
  std::vector<char> done(c.size(), 0);
  std::set<std::size_t> mismatches;

  std::function<const std::map<Index, Sequent>&(NodeId)> reg = [&](NodeId v) -> const std::map<Index, Sequent>& {
    if (done[v]) return t.reg[v];
    done[v] = 1;
    auto& out = t.reg[v];
    const auto& in = inc.in_d[v];

    // Deductive leaf, with or without ancestrality.
    if (in.empty()) {
      for (Index j : detail::seed_indices(c, inc, v)) out[j] = Sequent{encode({c.formula(v)}, c.order), c.label[v]};
      return out;
    }

    std::vector<std::size_t> plain;
    for (auto e : in) {
      if (!c.d_edges[e].rho) plain.push_back(e);
    }
    std::set<Index> idx;
    if (plain.empty()) {
      // Target of a divergent node: every premise is read through an index.
      idx = detail::seed_indices(c, inc, v);
    } else {
      bool first = true;
      for (auto e : plain) {
        NodeId u = c.d_edges[e].from;
        std::set<Index> exported;
        auto pin = detail::pinned_out(c, inc, u);
        for (const auto& kv : reg(u)) {
          if (!pin.count(kv.first)) exported.insert(kv.first);
        }
        if (first) {
          idx = std::move(exported);
          first = false;
        } else if (exported != idx) {
          return out;  // index sets of the premises disagree
        }
      }
    }
    for (auto e : in) reg(c.d_edges[e].from);

    for (Index j : idx) {
      std::vector<Sequent> prem;
      for (auto e : in) {
        const DEdge& de = c.d_edges[e];
        const auto& ru = t.reg[de.from];
        auto it = ru.find(de.rho ? *de.rho : j);
        if (it == ru.end()) break;
        if (de.bits && *de.bits != it->second.antecedent) mismatches.insert(e);
        prem.push_back(it->second);
      }
      if (prem.size() != in.size()) continue;
      std::optional<Sequent> s;
      if (prem.size() == 1) s = detail::apply_intro(c, v, prem[0]);
      if (prem.size() == 2) s = detail::apply_elim(c, v, prem[0], prem[1]);
      if (s) out[j] = *s;
    }

    // Divergent node: must define all indices it sends out and not be a target.
    if (inc.out_d[v].size() >= 2) {
      bool ok = inc.in_a[v].empty();
      for (Index j : detail::pinned_out(c, inc, v)) ok = ok && out.count(j);
      if (!ok) out.clear();
    }
    return out;
  };

  for (NodeId v = 0; v < c.size(); ++v) reg(v);
  t.label_mismatches.assign(mismatches.begin(), mismatches.end());
  return t;
}

enum class Outcome { Incorrect, CorrectTautology, CorrectDerivation };

enum class Reason { None, Structural, LabelMismatch, RootUndefined, ExtraRootSlots };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Incorrect: return "INCORRECT";
    case Outcome::CorrectTautology: return "CORRECT TAUTOLOGY";
    case Outcome::CorrectDerivation: return "CORRECT DERIVATION";
  }
  return "?";
}

inline const char* reason_name(Reason r) {
  switch (r) {
    case Reason::None: return "none";
    case Reason::Structural: return "Structural";
    case Reason::LabelMismatch: return "LabelMismatch";
    case Reason::RootUndefined: return "RootUndefined";
    case Reason::ExtraRootSlots: return "ExtraRootSlots";
  }
  return "?";
}

struct Verdict {
  Outcome outcome = Outcome::Incorrect;
  Reason reason = Reason::None;
  LocalEntailment root_entailment;
  std::size_t steps = 0;
  std::size_t height = 0;      // largest level
  std::size_t n_v = 0;
  std::size_t n_a = 0;
  std::string detail;          // failed structural conditions, when any
  EntailmentTable table;

  /// h · n_v · max(1, n_A)
  std::uint64_t step_bound() const {
    return static_cast<std::uint64_t>(height) * n_v * std::max<std::size_t>(1, n_a);
  }
};

/// Level sweep from the deepest level to the root. Leaves are seeded from
/// their ancestrality edges first, then each level is computed from the one
/// above it. Steps count seeds and per-index computations at internal nodes.
inline Verdict check(const RDagProof& c) {
  Verdict out;
  out.n_v = c.size();
  out.n_a = c.a_edges.size();
  StructureReport rep = validate_structure(c);
  if (!rep.ok()) {
    out.reason = Reason::Structural;
    out.detail = rep.failed();
    return out;
  }
  const Incidence inc(c);
  const auto lv = detail::bfs_levels(c, inc);
  std::size_t h = 0;
  for (auto l : lv) h = std::max(h, l);
  out.height = h;
  std::vector<std::vector<NodeId>> by_level(h + 1);
  for (NodeId v = 0; v < c.size(); ++v) by_level[lv[v]].push_back(v);

  auto& reg = out.table.reg;
  reg.assign(c.size(), {});
  std::set<std::size_t> mismatches;
  std::size_t steps = 0;

  // Tops: slot 0 plus one slot per incoming ancestrality edge.
  for (NodeId v = 0; v < c.size(); ++v) {
    if (!inc.in_d[v].empty()) continue;
    Sequent axiom{encode({c.formula(v)}, c.order), c.label[v]};
    reg[v][0] = axiom;
    for (auto e : inc.in_a[v]) {
      reg[v][c.a_edges[e].delta] = axiom;
      ++steps;
    }
  }

  std::vector<std::set<Index>> pinned(c.size());
  for (const auto& e : c.d_edges) {
    if (e.rho) pinned[e.from].insert(*e.rho);
  }

  for (std::size_t k = h + 1; k-- > 0;) {
    for (NodeId v : by_level[k]) {
      const auto& in = inc.in_d[v];
      if (in.empty()) continue;
      std::set<Index> idx;
      bool consistent = true;
      bool any_plain = false;
      for (auto e : in) {
        const DEdge& de = c.d_edges[e];
        if (de.rho) continue;
        std::set<Index> ex;
        for (const auto& kv : reg[de.from]) {
          if (!pinned[de.from].count(kv.first)) ex.insert(kv.first);
        }
        if (!any_plain) {
          idx = std::move(ex);
          any_plain = true;
        } else if (ex != idx) {
          consistent = false;
        }
      }
      if (!consistent) continue;
      if (!any_plain) {
        idx.insert(0);
        for (auto e : inc.in_a[v]) idx.insert(c.a_edges[e].delta);
      }
      auto& rv = reg[v];
      for (Index j : idx) {
        ++steps;
        std::optional<Sequent> s;
        const DEdge& e0 = c.d_edges[in[0]];
        auto it0 = reg[e0.from].find(e0.rho ? *e0.rho : j);
        if (it0 == reg[e0.from].end()) continue;
        if (e0.bits && *e0.bits != it0->second.antecedent) mismatches.insert(in[0]);
        if (in.size() == 1) {
          s = detail::apply_intro(c, v, it0->second);
        } else {
          const DEdge& e1 = c.d_edges[in[1]];
          auto it1 = reg[e1.from].find(e1.rho ? *e1.rho : j);
          if (it1 == reg[e1.from].end()) continue;
          if (e1.bits && *e1.bits != it1->second.antecedent) mismatches.insert(in[1]);
          s = detail::apply_elim(c, v, it0->second, it1->second);
        }
        if (s) rv[j] = *s;
      }
      if (inc.out_d[v].size() >= 2) {
        bool ok = inc.in_a[v].empty();
        for (Index j : pinned[v]) ok = ok && rv.count(j);
        if (!ok) rv.clear();
      }
    }
  }

  out.steps = steps;
  out.table.label_mismatches.assign(mismatches.begin(), mismatches.end());
  const auto& root_reg = reg[c.root];
  out.root_entailment = out.table.at(c.root, 0);
  if (!mismatches.empty()) {
    out.reason = Reason::LabelMismatch;
  } else if (!out.root_entailment) {
    out.reason = Reason::RootUndefined;
  } else if (root_reg.size() != 1) {
    out.reason = Reason::ExtraRootSlots;
  } else {
    out.outcome = out.root_entailment->antecedent.none() ? Outcome::CorrectTautology : Outcome::CorrectDerivation;
  }
  return out;
}

}  // namespace mimply
