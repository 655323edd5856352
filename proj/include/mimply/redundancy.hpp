#pragma once

// Detection of repeated sub-derivations ("matrices") and selection of
// independent sets of their lowest instances.

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mimply/derivation.hpp"

namespace mimply {

/// Desk-scale repetition thresholds: a matrix qualifies when it has at least
/// `min_count` instances at one level and at least `min_size` nodes.
struct RedundancyParams {
  std::size_t min_count = 2;
  std::size_t min_size = 2;

  void validate() const {
    if (min_count < 2) throw std::invalid_argument("min_count must be at least 2");
    if (min_size < 2) throw std::invalid_argument("min_size must be at least 2");
  }
};

/// Per-node structural classes. Two nodes have the same `cls` exactly when
/// their subtrees are identical as labeled trees (rules, formulas, shape and
/// dependency bitstrings); `hash` is the corresponding 64-bit digest.
struct Fingerprints {
  std::vector<std::uint64_t> hash;
  std::vector<std::size_t> cls;
  std::vector<std::size_t> size;
  std::vector<std::size_t> level;
};

namespace detail {

struct ClassKey {
  const Formula* formula;
  const Bitstring* dep;
  Rule rule;
  std::size_t c0;
  std::size_t c1;
  std::uint64_t hash;

  bool operator==(const ClassKey& o) const {
    return rule == o.rule && c0 == o.c0 && c1 == o.c1 && *formula == *o.formula && *dep == *o.dep;
  }
};

struct ClassKeyHash {
  std::size_t operator()(const ClassKey& k) const noexcept { return static_cast<std::size_t>(k.hash); }
};

inline std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 12) + (h >> 4);
  return h * 0xbf58476d1ce4e5b9ULL;
}

}  // namespace detail

/// One bottom-up pass; classes are interned so equal keys are compared in full.
inline Fingerprints fingerprints(const Derivation& d) {
  const std::size_t n = d.nodes.size();
  Fingerprints fp;
  fp.hash.assign(n, 0);
  fp.cls.assign(n, 0);
  fp.size = subtree_sizes(d);
  fp.level = levels(d);
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::unordered_map<detail::ClassKey, std::size_t, detail::ClassKeyHash> interned;
  interned.reserve(n);
  for (std::size_t i = n; i-- > 0;) {
    const NdNode& node = d.nodes[i];
    std::size_t c0 = node.children.size() > 0 ? fp.cls[node.children[0]] : none;
    std::size_t c1 = node.children.size() > 1 ? fp.cls[node.children[1]] : none;
    std::uint64_t h = detail::mix(static_cast<std::uint64_t>(node.rule) + 1, node.formula.hash());
    h = detail::mix(h, node.dep.hash());
    for (NodeId c : node.children) h = detail::mix(h, fp.hash[c]);
    fp.hash[i] = h;
    detail::ClassKey key{&node.formula, &node.dep, node.rule, c0, c1, h};
    auto [it, fresh] = interned.emplace(key, interned.size());
    fp.cls[i] = it->second;
  }
  return fp;
}

/// Node-by-node comparison of two subtrees.
inline bool deep_equal(const Derivation& d, NodeId a, NodeId b) {
  std::vector<std::pair<NodeId, NodeId>> stack{{a, b}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    const NdNode& nx = d.nodes[x];
    const NdNode& ny = d.nodes[y];
    if (nx.rule != ny.rule || nx.formula != ny.formula || nx.dep != ny.dep ||
        nx.children.size() != ny.children.size()) {
      return false;
    }
    for (std::size_t c = 0; c < nx.children.size(); ++c) stack.push_back({nx.children[c], ny.children[c]});
  }
  return true;
}

struct MatrixOccurrences {
  NodeId matrix;               // root of the canonical (first) instance
  std::size_t level;
  std::size_t size;            // nodes in one instance
  std::vector<NodeId> roots;   // ascending
};

/// Groups ordered by larger matrices first, then lower first root.
inline std::vector<MatrixOccurrences> find_repeats(const Derivation& d, const Fingerprints& fp,
                                                   std::size_t level, const RedundancyParams& params) {
  std::unordered_map<std::size_t, std::vector<NodeId>> by_class;
  for (NodeId i = 0; i < d.nodes.size(); ++i) {
    if (fp.level[i] == level && fp.size[i] >= params.min_size) by_class[fp.cls[i]].push_back(i);
  }
  std::vector<MatrixOccurrences> out;
  for (auto& [cls, roots] : by_class) {
    if (roots.size() < params.min_count) continue;
    out.push_back(MatrixOccurrences{roots.front(), level, fp.size[roots.front()], std::move(roots)});
  }
  std::sort(out.begin(), out.end(), [](const MatrixOccurrences& a, const MatrixOccurrences& b) {
    if (a.size != b.size) return a.size > b.size;
    return a.matrix < b.matrix;
  });
  return out;
}

inline std::vector<MatrixOccurrences> find_repeats(const Derivation& d, std::size_t level,
                                                   const RedundancyParams& params = {}) {
  return find_repeats(d, fingerprints(d), level, params);
}

/// Greedy lowest-level-first selection: a group is kept with those of its
/// instances that do not lie inside an instance already selected, provided at
/// least min_count of them remain.
inline std::vector<MatrixOccurrences> lri(const Derivation& d, const Fingerprints& fp,
                                          const RedundancyParams& params) {
  std::vector<char> covered(d.nodes.size(), 0);
  std::size_t h = 0;
  for (auto l : fp.level) h = std::max(h, l);
  std::vector<MatrixOccurrences> out;
  for (std::size_t level = 0; level <= h; ++level) {
    for (auto& g : find_repeats(d, fp, level, params)) {
      std::vector<NodeId> kept;
      for (NodeId r : g.roots) {
        if (!covered[r]) kept.push_back(r);
      }
      if (kept.size() < params.min_count) continue;
      for (NodeId r : kept) std::fill(covered.begin() + r, covered.begin() + r + g.size, 1);
      g.matrix = kept.front();
      g.roots = std::move(kept);
      out.push_back(std::move(g));
    }
  }
  return out;
}

inline std::vector<MatrixOccurrences> lri(const Derivation& d, const RedundancyParams& params = {}) {
  return lri(d, fingerprints(d), params);
}

}  // namespace mimply
