#pragma once

// Tree-shaped natural deduction derivations with greedy discharge and
// dependency bitstrings, plus their structural analyses (levels, branches,
// normal and expanded form).

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mimply/bitstring.hpp"
#include "mimply/formula.hpp"

namespace mimply {

using NodeId = std::size_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

enum class Rule { Hypothesis, ImpIntro, ImpElim };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Hypothesis: return "hyp";
    case Rule::ImpIntro: return "intro";
    case Rule::ImpElim: return "elim";
  }
  return "?";
}

inline std::size_t rule_arity(Rule r) {
  switch (r) {
    case Rule::Hypothesis: return 0;
    case Rule::ImpIntro: return 1;
    case Rule::ImpElim: return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Proof terms: a convenient immutable builder form. Subterms may be shared;
// flattening into a Derivation unfolds the sharing into a tree.

struct ProofTerm;
using ProofPtr = std::shared_ptr<const ProofTerm>;

struct ProofTerm {
  Rule rule;
  Formula formula;
  std::vector<ProofPtr> children;  // elim: {minor, major}
};

class RuleShapeError : public std::runtime_error {
 public:
  RuleShapeError(NodeId node, const std::string& msg)
      : std::runtime_error("rule shape error at node " + std::to_string(node) + ": " + msg),
        node_(node) {}
  NodeId node() const noexcept { return node_; }

 private:
  NodeId node_;
};

class DependencyError : public std::runtime_error {
 public:
  DependencyError(NodeId node, std::string expected, std::string found)
      : std::runtime_error("dependency error at node " + std::to_string(node) + ": expected " +
                           expected + ", found " + found),
        node_(node),
        expected_(std::move(expected)),
        found_(std::move(found)) {}
  NodeId node() const noexcept { return node_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  NodeId node_;
  std::string expected_;
  std::string found_;
};

inline ProofPtr hyp(const Formula& f) {
  return std::make_shared<const ProofTerm>(ProofTerm{Rule::Hypothesis, f, {}});
}

/// ⊃-Intro of `antecedent ⊃ ψ` where ψ is the conclusion of `body`.
inline ProofPtr intro(const Formula& antecedent, ProofPtr body) {
  Formula f = Formula::imp(antecedent, body->formula);
  return std::make_shared<const ProofTerm>(ProofTerm{Rule::ImpIntro, f, {std::move(body)}});
}

inline ProofPtr elim(ProofPtr minor, ProofPtr major) {
  const Formula& m = major->formula;
  if (!m.is_imp() || m.left() != minor->formula) {
    throw std::invalid_argument("elim: major premise " + m.str() +
                                " does not match minor premise " + minor->formula.str());
  }
  Formula f = m.right();
  return std::make_shared<const ProofTerm>(
      ProofTerm{Rule::ImpElim, f, {std::move(minor), std::move(major)}});
}

// ---------------------------------------------------------------------------

struct NdNode {
  Formula formula;
  Rule rule;
  std::vector<NodeId> children;
  Bitstring dep;
};

/// Node ids are dense and in preorder, root first; elim children are {minor, major}.
struct Derivation {
  SubformulaOrder order;
  std::vector<NdNode> nodes;
  NodeId root = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  const NdNode& operator[](NodeId i) const { return nodes.at(i); }
};

namespace detail {

inline Bitstring expected_dep(const Derivation& d, NodeId i) {
  const NdNode& n = d.nodes[i];
  switch (n.rule) {
    case Rule::Hypothesis: return encode({n.formula}, d.order);
    case Rule::ImpIntro: {
      const Bitstring& below = d.nodes[n.children[0]].dep;
      std::size_t k = d.order.find(n.formula.left());
      if (k == d.order.size()) return below;
      Bitstring out = below;
      out.reset(k);
      return out;
    }
    case Rule::ImpElim:
      return bit_union(d.nodes[n.children[0]].dep, d.nodes[n.children[1]].dep);
  }
  return Bitstring(d.order.size());
}

inline void recompute_deps(Derivation& d) {
  for (std::size_t i = d.nodes.size(); i-- > 0;) d.nodes[i].dep = expected_dep(d, i);
}

}  // namespace detail

/// Flattens a proof term into preorder. Without an explicit order, the order is
/// the canonical order over the sub-closure of every formula in the term.
inline Derivation build_derivation(const ProofPtr& term,
                                   std::optional<SubformulaOrder> order = std::nullopt) {
  std::vector<NdNode> nodes;
  std::vector<std::pair<const ProofTerm*, NodeId>> stack{{term.get(), kNoNode}};
  FormulaSet seen;
  std::vector<Formula> distinct;
  while (!stack.empty()) {
    auto [t, parent] = stack.back();
    stack.pop_back();
    NodeId id = nodes.size();
    nodes.push_back(NdNode{t->formula, t->rule, {}, Bitstring()});
    if (parent != kNoNode) nodes[parent].children.push_back(id);
    if (!order && seen.insert(t->formula).second) distinct.push_back(t->formula);
    for (std::size_t c = t->children.size(); c-- > 0;) stack.push_back({t->children[c].get(), id});
  }
  // Children were appended in pop order, which is the intended left-to-right order.
  SubformulaOrder ord = order ? std::move(*order) : SubformulaOrder::of_subformulas(distinct);
  Derivation d{std::move(ord), std::move(nodes), 0};
  detail::recompute_deps(d);
  return d;
}

/// Checks tree shape, preorder numbering, rule shapes and greedy dependency propagation.
inline void validate_derivation(const Derivation& d) {
  const std::size_t n = d.nodes.size();
  if (n == 0) throw RuleShapeError(0, "empty derivation");
  if (d.root != 0) throw RuleShapeError(d.root, "root must be node 0");
  // Preorder check: walking the tree from the root must visit ids 0..n-1 in order.
  std::vector<NodeId> stack{0};
  NodeId expect = 0;
  while (!stack.empty()) {
    NodeId i = stack.back();
    stack.pop_back();
    if (i != expect) throw RuleShapeError(i, "node ids are not a dense preorder numbering");
    ++expect;
    const NdNode& node = d.nodes[i];
    if (node.children.size() != rule_arity(node.rule)) {
      throw RuleShapeError(i, std::string(rule_name(node.rule)) + " node has " +
                                  std::to_string(node.children.size()) + " children");
    }
    for (std::size_t c = node.children.size(); c-- > 0;) {
      NodeId ch = node.children[c];
      if (ch >= n || ch <= i) throw RuleShapeError(i, "child id out of range");
      stack.push_back(ch);
    }
  }
  if (expect != n) throw RuleShapeError(expect, "unreachable nodes");

  for (NodeId i = 0; i < n; ++i) {
    const NdNode& node = d.nodes[i];
    if (node.rule == Rule::ImpIntro) {
      const Formula& f = node.formula;
      if (!f.is_imp() || f.right() != d.nodes[node.children[0]].formula) {
        throw RuleShapeError(i, "intro conclusion " + f.str() + " does not match premise");
      }
    } else if (node.rule == Rule::ImpElim) {
      const Formula& minor = d.nodes[node.children[0]].formula;
      const Formula& major = d.nodes[node.children[1]].formula;
      if (!major.is_imp() || major.left() != minor || major.right() != node.formula) {
        throw RuleShapeError(i, "elim premises do not fit " + node.formula.str());
      }
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    const NdNode& node = d.nodes[i];
    if (node.dep.length() != d.order.size()) {
      throw DependencyError(i, std::string(d.order.size(), '?'), node.dep.str());
    }
    Bitstring want;
    try {
      want = detail::expected_dep(d, i);
    } catch (const FormulaNotInOrder&) {
      throw DependencyError(i, "<hypothesis outside order>", node.dep.str());
    }
    if (want != node.dep) throw DependencyError(i, want.str(), node.dep.str());
  }
}

inline const Formula& conclusion(const Derivation& d) { return d.nodes.at(d.root).formula; }

inline std::vector<Formula> open_assumptions(const Derivation& d) {
  return decode(d.nodes.at(d.root).dep, d.order);
}

inline std::vector<NodeId> parents(const Derivation& d) {
  std::vector<NodeId> p(d.nodes.size(), kNoNode);
  for (NodeId i = 0; i < d.nodes.size(); ++i) {
    for (NodeId c : d.nodes[i].children) p[c] = i;
  }
  return p;
}

/// Deductive distance from the conclusion.
inline std::vector<std::size_t> levels(const Derivation& d) {
  std::vector<std::size_t> lv(d.nodes.size(), 0);
  for (NodeId i = 0; i < d.nodes.size(); ++i) {
    for (NodeId c : d.nodes[i].children) lv[c] = lv[i] + 1;
  }
  return lv;
}

inline std::size_t height(const Derivation& d) {
  std::size_t h = 0;
  for (auto l : levels(d)) h = std::max(h, l);
  return h;
}

/// Subtree of node i spans ids [i, i + sizes[i]).
inline std::vector<std::size_t> subtree_sizes(const Derivation& d) {
  std::vector<std::size_t> s(d.nodes.size(), 1);
  for (std::size_t i = d.nodes.size(); i-- > 0;) {
    for (NodeId c : d.nodes[i].children) s[i] += s[c];
  }
  return s;
}

inline bool is_normal(const Derivation& d) {
  for (const auto& n : d.nodes) {
    if (n.rule == Rule::ImpElim && d.nodes[n.children[1]].rule == Rule::ImpIntro) return false;
  }
  return true;
}

struct Branch {
  std::vector<NodeId> nodes;  // top-formula first
  std::size_t minimal = 0;    // index into nodes; nodes[0..minimal] is the E-part
  bool principal = false;
  std::size_t rank = 0;       // 0 for the principal branch, n+1 below an n-branch
};

/// Partition of the nodes into branches, ordered by (rank, top-formula id).
inline std::vector<Branch> branches(const Derivation& d) {
  const auto par = parents(d);
  std::vector<Branch> out;
  std::vector<std::size_t> branch_of(d.nodes.size(), 0);
  for (NodeId top = 0; top < d.nodes.size(); ++top) {
    if (d.nodes[top].rule != Rule::Hypothesis) continue;
    Branch b;
    NodeId cur = top;
    while (true) {
      b.nodes.push_back(cur);
      NodeId p = par[cur];
      if (p == kNoNode) break;
      if (d.nodes[p].rule == Rule::ImpElim && d.nodes[p].children[0] == cur) break;
      cur = p;
    }
    b.principal = par[b.nodes.back()] == kNoNode;
    std::size_t j = 0;
    while (j + 1 < b.nodes.size() && d.nodes[b.nodes[j + 1]].rule == Rule::ImpElim) ++j;
    b.minimal = j;
    for (NodeId x : b.nodes) branch_of[x] = out.size();
    out.push_back(std::move(b));
  }
  // Ranks: a branch ending in a minor premise sits one below the branch of that rule's conclusion.
  std::vector<std::optional<std::size_t>> rank(out.size());
  for (std::size_t start = 0; start < out.size(); ++start) {
    std::vector<std::size_t> chain;
    std::size_t cur = start;
    while (!rank[cur]) {
      if (out[cur].principal) {
        rank[cur] = 0;
        break;
      }
      chain.push_back(cur);
      cur = branch_of[par[out[cur].nodes.back()]];
    }
    std::size_t r = *rank[cur];
    while (!chain.empty()) {
      rank[chain.back()] = ++r;
      chain.pop_back();
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = *rank[i];
  std::stable_sort(out.begin(), out.end(),
                   [](const Branch& a, const Branch& b) { return a.rank < b.rank; });
  return out;
}

inline bool is_expanded(const Derivation& d) {
  for (const auto& b : branches(d)) {
    if (!d.nodes[b.nodes[b.minimal]].formula.is_atom()) return false;
  }
  return true;
}

inline bool check_subformula_principle(const Derivation& d) {
  FormulaSet universe;
  std::vector<Formula> sink;
  collect_subformulas(conclusion(d), universe, sink);
  for (const auto& a : open_assumptions(d)) collect_subformulas(a, universe, sink);
  for (const auto& n : d.nodes) {
    if (!universe.count(n.formula)) return false;
  }
  return true;
}

}  // namespace mimply
