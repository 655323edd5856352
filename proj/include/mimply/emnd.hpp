#pragma once

// Mapping the E-parts of a normal expanded derivation into the syntax tree of
// its conclusion.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mimply/derivation.hpp"

namespace mimply {

class MappingError : public std::runtime_error {
 public:
  MappingError(std::size_t branch, const std::string& msg)
      : std::runtime_error("cannot map branch " + std::to_string(branch) + ": " + msg),
        branch_(branch) {}
  std::size_t branch() const noexcept { return branch_; }

 private:
  std::size_t branch_;
};

struct EmND {
  Derivation derivation;
  SyntaxTree tree;
  std::vector<std::optional<VertexId>> ell;  // indexed by derivation node id
  std::vector<Branch> branches;
};

/// Maps every E-part ⟨β0..βj⟩ onto a right spine u0, u1, .., uj of the syntax
/// tree, where u0 is a left child (or the root) labeled β0 and each u(i+1) is the
/// right child of u(i). The anchor u0 is then the nearest right-ancestral
/// left child of uj. A one-formula E-part that is the minor premise of an
/// elimination is anchored at the left sibling of the major premise's vertex
/// when that vertex is labeled correctly; otherwise the first candidate in
/// syntax-tree preorder is used.
inline EmND emnd_map(const Derivation& d) {
  if (!is_normal(d)) throw std::invalid_argument("emnd_map: derivation is not normal");
  if (!is_expanded(d)) throw std::invalid_argument("emnd_map: derivation is not expanded");

  EmND e{d, SyntaxTree(conclusion(d)), std::vector<std::optional<VertexId>>(d.nodes.size()),
         branches(d)};
  const SyntaxTree& t = e.tree;
  const auto par = parents(d);

  for (std::size_t bi = 0; bi < e.branches.size(); ++bi) {
    const Branch& b = e.branches[bi];
    const Formula& top = d.nodes[b.nodes[0]].formula;

    std::optional<VertexId> anchor;
    if (b.minimal == 0) {
      NodeId last = b.nodes[0];
      NodeId p = par[last];
      if (p != kNoNode && d.nodes[p].rule == Rule::ImpElim && d.nodes[p].children[0] == last) {
        const auto& major_v = e.ell[d.nodes[p].children[1]];
        if (major_v && t[*major_v].left != SyntaxTree::npos && t.label(t[*major_v].left) == top) {
          anchor = t[*major_v].left;
        }
      }
    }
    if (!anchor) {
      for (VertexId v = 0; v < t.size(); ++v) {
        if ((t[v].is_left_child || v == t.root()) && t.label(v) == top) {
          anchor = v;
          break;
        }
      }
    }
    if (!anchor) throw MappingError(bi, "top-formula " + top.str() + " has no anchor vertex");

    VertexId v = *anchor;
    for (std::size_t i = 0; i <= b.minimal; ++i) {
      if (i > 0) v = t[v].right;
      if (v == SyntaxTree::npos || t.label(v) != d.nodes[b.nodes[i]].formula) {
        throw MappingError(bi, "E-part does not follow a right spine");
      }
      e.ell[b.nodes[i]] = v;
    }
    if (b.minimal > 0) {
      auto ra = right_ancestral(t, v);
      std::optional<VertexId> nearest_left;
      for (VertexId u : ra) {
        if (t[u].is_left_child || u == t.root()) {
          nearest_left = u;
          break;
        }
      }
      if (nearest_left != anchor) throw MappingError(bi, "anchor is not the right-ancestral left child");
    }
  }
  return e;
}

/// Number of distinct syntax-tree paths (anchor, length) instantiated by E-parts.
inline std::size_t e_part_types(const EmND& e) {
  std::set<std::pair<VertexId, std::size_t>> paths;
  for (const auto& b : e.branches) paths.emplace(*e.ell[b.nodes[0]], b.minimal);
  return paths.size();
}

/// E-part types whose minimal formula is the given atom.
inline std::size_t e_part_types_ending_in(const EmND& e, const Formula& q) {
  std::set<std::pair<VertexId, std::size_t>> paths;
  for (const auto& b : e.branches) {
    if (e.derivation.nodes[b.nodes[b.minimal]].formula == q) paths.emplace(*e.ell[b.nodes[0]], b.minimal);
  }
  return paths.size();
}

}  // namespace mimply
