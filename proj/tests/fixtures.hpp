#pragma once

// Shared fixtures: hand-built derivations, a Kripke-model second oracle,
// random derivation generators and the test corpora.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mimply/mimply.hpp"

namespace fixtures {

using namespace mimply;

inline Formula F(const char* s) { return parse_formula(s); }

/// A ⊃ C from A ⊃ B and B ⊃ C.
inline ProofPtr transitivity_term() {
  return intro(F("A"), elim(elim(hyp(F("A")), hyp(F("A -> B"))), hyp(F("B -> C"))));
}

inline Derivation transitivity() { return build_derivation(transitivity_term()); }

/// Atoms first, then A⊃B, B⊃C, A⊃C.
inline SubformulaOrder permuted_order() {
  return SubformulaOrder::explicit_order({F("A"), F("B"), F("C"), F("A -> B"), F("B -> C"), F("A -> C")});
}

inline Formula nested_spine_formula() {
  return F("(A -> B -> C -> q) -> ((A -> q) -> D -> q) -> D -> q");
}

/// Nested right spines; the minor premises B and C stay open.
inline Derivation nested_spine() {
  Formula L = F("A -> B -> C -> q");
  Formula X = F("(A -> q) -> D -> q");
  ProofPtr q1 = elim(hyp(F("C")), elim(hyp(F("B")), elim(hyp(F("A")), hyp(L))));
  ProofPtr dq = elim(intro(F("A"), q1), hyp(X));
  ProofPtr q2 = elim(hyp(F("D")), dq);
  return build_derivation(intro(L, intro(X, intro(F("D"), q2))));
}

// ---------------------------------------------------------------------------
// Kripke models with at most `max_worlds` worlds, rooted at world 0.

class KripkeOracle {
 public:
  KripkeOracle(std::vector<std::string> atoms, std::size_t max_worlds) : atoms_(std::move(atoms)) {
    for (std::size_t k = 1; k <= max_worlds; ++k) enumerate_frames(k);
  }

  bool valid(const Formula& f) const { return entails({}, f); }

  /// Δ ⊨ β at every world of every model.
  bool entails(const std::vector<Formula>& delta, const Formula& beta) const {
    for (const auto& m : models_) {
      for (std::size_t w = 0; w < m.worlds; ++w) {
        bool all = true;
        for (const auto& d : delta) all = all && forces(m, w, d);
        if (all && !forces(m, w, beta)) return false;
      }
    }
    return true;
  }

  std::size_t model_count() const { return models_.size(); }

 private:
  struct Model {
    std::size_t worlds;
    std::vector<std::vector<char>> le;          // le[a][b]: a ≤ b
    std::map<std::string, std::vector<char>> val;
  };

  bool forces(const Model& m, std::size_t w, const Formula& f) const {
    if (f.is_atom()) {
      auto it = m.val.find(f.name());
      return it != m.val.end() && it->second[w];
    }
    for (std::size_t v = 0; v < m.worlds; ++v) {
      if (m.le[w][v] && forces(m, v, f.left()) && !forces(m, v, f.right())) return false;
    }
    return true;
  }

  void enumerate_frames(std::size_t k) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 1; a < k; ++a) {
      for (std::size_t b = 1; b < k; ++b) {
        if (a != b) pairs.emplace_back(a, b);
      }
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs.size()); ++mask) {
      std::vector<std::vector<char>> le(k, std::vector<char>(k, 0));
      for (std::size_t a = 0; a < k; ++a) {
        le[a][a] = 1;
        le[0][a] = 1;
      }
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (mask >> p & 1) le[pairs[p].first][pairs[p].second] = 1;
      }
      bool ok = true;
      for (std::size_t a = 0; a < k && ok; ++a) {
        for (std::size_t b = 0; b < k && ok; ++b) {
          if (a != b && le[a][b] && le[b][a]) ok = false;
          for (std::size_t c = 0; c < k && ok; ++c) {
            if (le[a][b] && le[b][c] && !le[a][c]) ok = false;
          }
        }
      }
      if (ok) enumerate_valuations(k, le);
    }
  }

  void enumerate_valuations(std::size_t k, const std::vector<std::vector<char>>& le) {
    std::vector<std::vector<char>> up_sets;
    for (std::size_t s = 0; s < (std::size_t{1} << k); ++s) {
      std::vector<char> set(k);
      for (std::size_t w = 0; w < k; ++w) set[w] = (s >> w) & 1;
      bool closed = true;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          if (set[a] && le[a][b] && !set[b]) closed = false;
        }
      }
      if (closed) up_sets.push_back(set);
    }
    std::vector<std::size_t> pick(atoms_.size(), 0);
    while (true) {
      Model m{k, le, {}};
      for (std::size_t i = 0; i < atoms_.size(); ++i) m.val[atoms_[i]] = up_sets[pick[i]];
      models_.push_back(std::move(m));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == up_sets.size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
  }

  std::vector<std::string> atoms_;
  std::vector<Model> models_;
};

// ---------------------------------------------------------------------------
// Randomness

inline std::uint64_t seed() {
  if (const char* s = std::getenv("MIMPLY_SEED")) return std::strtoull(s, nullptr, 10);
  return 20241019;
}

inline Formula random_formula(std::mt19937_64& rng, const std::vector<Formula>& atoms, std::size_t max_imps) {
  std::size_t imps = std::uniform_int_distribution<std::size_t>(0, max_imps)(rng);
  std::function<Formula(std::size_t)> build = [&](std::size_t k) -> Formula {
    if (k == 0) return atoms[std::uniform_int_distribution<std::size_t>(0, atoms.size() - 1)(rng)];
    std::size_t l = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    return Formula::imp(build(l), build(k - 1 - l));
  };
  return build(imps);
}

/// Random derivation of `goal`; when `bias` is set, minor premises favour it.
inline ProofPtr random_derivation(std::mt19937_64& rng, const Formula& goal, std::size_t depth,
                                  const std::vector<Formula>& atoms, const std::optional<Formula>& bias) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (depth == 0 || u(rng) < 0.2) return hyp(goal);
  if (goal.is_imp() && u(rng) < 0.35) return intro(goal.left(), random_derivation(rng, goal.right(), depth - 1, atoms, bias));
  Formula phi = (bias && u(rng) < 0.6) ? *bias : random_formula(rng, atoms, 1);
  return elim(random_derivation(rng, phi, depth - 1, atoms, bias),
              random_derivation(rng, Formula::imp(phi, goal), depth - 1, atoms, bias));
}

/// Rebuilds the subtree of node i as a proof term, replacing nodes found in `subst`.
inline ProofPtr to_term(const Derivation& d, NodeId i, const std::map<NodeId, ProofPtr>& subst) {
  if (auto it = subst.find(i); it != subst.end()) return it->second;
  const NdNode& n = d.nodes[i];
  std::vector<ProofPtr> ch;
  for (NodeId c : n.children) ch.push_back(to_term(d, c, subst));
  return std::make_shared<const ProofTerm>(ProofTerm{n.rule, n.formula, std::move(ch)});
}

struct Planted {
  Derivation d;
  std::size_t level;
  std::vector<NodeId> roots;  // every instance of the planted matrix at `level`
};

/// A random derivation in which a random sub-derivation of at least three
/// nodes occurs at least twice on one level.
inline Planted planted_fixture(std::mt19937_64& rng) {
  std::vector<Formula> atoms{F("A"), F("B"), F("C")};
  while (true) {
    Formula psi = random_formula(rng, atoms, 1);
    Formula phi = random_formula(rng, atoms, 1);
    ProofPtr s = elim(random_derivation(rng, phi, 2, atoms, std::nullopt), hyp(Formula::imp(phi, psi)));
    Formula goal = random_formula(rng, atoms, 2);
    Derivation amb = build_derivation(random_derivation(rng, goal, 5, atoms, psi));
    auto lv = levels(amb);
    std::map<std::size_t, std::vector<NodeId>> holes;
    for (NodeId i = 0; i < amb.size(); ++i) {
      if (amb.nodes[i].rule == Rule::Hypothesis && amb.nodes[i].formula == psi) holes[lv[i]].push_back(i);
    }
    std::vector<std::pair<std::size_t, std::vector<NodeId>>> usable;
    for (auto& [l, v] : holes) {
      if (v.size() >= 2) usable.emplace_back(l, v);
    }
    if (usable.empty()) continue;
    const auto& [level, spots] = usable[std::uniform_int_distribution<std::size_t>(0, usable.size() - 1)(rng)];
    std::map<NodeId, ProofPtr> subst;
    for (NodeId i : spots) {
      if (subst.size() < 2 || std::uniform_real_distribution<double>(0, 1)(rng) < 0.7) subst[i] = s;
    }
    Derivation d = build_derivation(to_term(amb, 0, subst));
    Derivation sd = build_derivation(s, d.order);
    auto lv2 = levels(d);
    auto fp = fingerprints(d);
    // A preorder sequence of rules and formulas determines the labeled tree.
    auto is_copy = [&](NodeId i) {
      if (fp.size[i] != sd.size()) return false;
      for (NodeId k = 0; k < sd.size(); ++k) {
        if (d.nodes[i + k].rule != sd.nodes[k].rule || d.nodes[i + k].formula != sd.nodes[k].formula) return false;
      }
      return true;
    };
    Planted p{d, level, {}};
    for (NodeId i = 0; i < d.size(); ++i) {
      if (lv2[i] == level && is_copy(i)) p.roots.push_back(i);
    }
    if (p.roots.size() >= 2) return p;
  }
}

// ---------------------------------------------------------------------------
// Corpora

struct CorpusItem {
  std::string name;
  Derivation d;
};

/// Proofs found by search for every valid formula over two atoms up to `max_size`.
inline std::vector<CorpusItem> search_corpus(std::size_t max_size) {
  std::vector<CorpusItem> out;
  for (const auto& f : enumerate_formulas(2, max_size)) {
    if (auto p = proof_search(f, default_search_depth(f))) out.push_back({"search:" + f.str(), std::move(*p)});
  }
  return out;
}

inline std::vector<CorpusItem> fib_corpus(std::size_t max_n) {
  std::vector<CorpusItem> out;
  for (std::size_t n = 2; n <= max_n; ++n) {
    out.push_back({"fib:" + std::to_string(n), fib_family(n).derivation});
    out.push_back({"fib-closed:" + std::to_string(n), fib_family_closed(n).derivation});
  }
  return out;
}

inline std::vector<CorpusItem> planted_corpus(std::size_t count, std::uint64_t s) {
  std::mt19937_64 rng(s);
  std::vector<CorpusItem> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({"planted:" + std::to_string(i), planted_fixture(rng).d});
  return out;
}

inline std::vector<CorpusItem> full_corpus() {
  std::vector<CorpusItem> out = search_corpus(9);
  for (auto& x : fib_corpus(14)) out.push_back(std::move(x));
  out.push_back({"transitivity", transitivity()});
  out.push_back({"nested_spine", nested_spine()});
  for (auto& x : planted_corpus(200, seed())) out.push_back(std::move(x));
  return out;
}

// ---------------------------------------------------------------------------
// Mutations of certificates

enum class Mutation { FlipBit, RetargetEdge, Relabel, DropAncestrality };

inline const char* mutation_name(Mutation m) {
  switch (m) {
    case Mutation::FlipBit: return "flip-bit";
    case Mutation::RetargetEdge: return "retarget-edge";
    case Mutation::Relabel: return "relabel";
    case Mutation::DropAncestrality: return "drop-ancestrality";
  }
  return "?";
}

/// Applies one random edit of kind `m`; returns false when the kind does not apply.
inline bool mutate(RDagProof& c, Mutation m, std::mt19937_64& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  switch (m) {
    case Mutation::FlipBit: {
      std::vector<std::size_t> with_bits;
      for (std::size_t e = 0; e < c.d_edges.size(); ++e) {
        if (c.d_edges[e].bits) with_bits.push_back(e);
      }
      if (with_bits.empty()) return false;
      auto& b = *c.d_edges[with_bits[pick(with_bits.size())]].bits;
      std::size_t i = pick(b.length());
      if (b.test(i)) b.reset(i); else b.set(i);
      return true;
    }
    case Mutation::RetargetEdge: {
      std::size_t total = c.d_edges.size() + c.a_edges.size();
      if (total == 0 || c.size() < 2) return false;
      std::size_t e = pick(total);
      NodeId& to = e < c.d_edges.size() ? c.d_edges[e].to : c.a_edges[e - c.d_edges.size()].to;
      NodeId old = to;
      while (to == old) to = pick(c.size());
      return true;
    }
    case Mutation::Relabel: {
      if (c.order.size() < 2) return false;
      NodeId v = pick(c.size());
      std::size_t old = c.label[v];
      while (c.label[v] == old) c.label[v] = pick(c.order.size());
      return true;
    }
    case Mutation::DropAncestrality: {
      if (c.a_edges.empty()) return false;
      c.a_edges.erase(c.a_edges.begin() + static_cast<std::ptrdiff_t>(pick(c.a_edges.size())));
      return true;
    }
  }
  return false;
}

/// Sets bit `i` on every labelled edge from `v` down to the root, keeping the union discipline intact.
inline RDagProof add_bit_along_path(RDagProof c, NodeId v, std::size_t i) {
  while (v != c.root) {
    auto e = std::find_if(c.d_edges.begin(), c.d_edges.end(), [&](const DEdge& x) { return x.from == v; });
    if (e == c.d_edges.end()) break;
    if (e->bits) e->bits->set(i);
    v = e->to;
  }
  return c;
}

}  // namespace fixtures
