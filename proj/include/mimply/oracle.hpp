#pragma once

// Ground truth for tests and benchmarks: a decision procedure for the
// implicational fragment, an exhaustive formula enumerator, and the
// Fibonacci family of derivations with exponentially many nodes.

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mimply/derivation.hpp"

namespace mimply {

namespace detail {

// Contraction-free sequent calculus for intuitionistic implication
// (Dyckhoff's LJT restricted to ⊃). Contexts are multisets kept sorted by
// canonical text. Every backward rule application decreases the multiset
// ordering on formula weights, so the search terminates without a loop check.
class Ljt {
 public:
  bool prove(std::vector<Formula> ctx, const Formula& goal) {
    std::sort(ctx.begin(), ctx.end(), by_text);
    return sequent(ctx, goal);
  }

 private:
  static bool by_text(const Formula& a, const Formula& b) { return a.str() < b.str(); }

  static std::string key(const std::vector<Formula>& ctx, const Formula& goal) {
    std::string k;
    for (const auto& f : ctx) {
      k += f.str();
      k += ';';
    }
    k += "|-";
    k += goal.str();
    return k;
  }

  static std::vector<Formula> with(std::vector<Formula> ctx, std::size_t drop, const Formula& add) {
    ctx.erase(ctx.begin() + static_cast<std::ptrdiff_t>(drop));
    ctx.insert(std::upper_bound(ctx.begin(), ctx.end(), add, by_text), add);
    return ctx;
  }

  bool sequent(const std::vector<Formula>& ctx, const Formula& goal) {
    std::string k = key(ctx, goal);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    bool r = search(ctx, goal);
    memo_.emplace(std::move(k), r);
    return r;
  }

  bool search(const std::vector<Formula>& ctx, const Formula& goal) {
    if (goal.is_imp()) {
      std::vector<Formula> c2 = ctx;
      c2.insert(std::upper_bound(c2.begin(), c2.end(), goal.left(), by_text), goal.left());
      return sequent(c2, goal.right());
    }
    auto has_atom = [&](const Formula& p) {
      return std::any_of(ctx.begin(), ctx.end(), [&](const Formula& f) { return f == p; });
    };
    if (has_atom(goal)) return true;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      const Formula& x = ctx[i];
      if (!x.is_imp()) continue;
      Formula a = x.left();
      Formula b = x.right();
      if (a.is_atom()) {
        // p, p ⊃ B  ~>  p, B   (invertible)
        if (has_atom(a)) return sequent(with(ctx, i, b), goal);
      } else {
        // (C ⊃ D) ⊃ B:  Γ, D ⊃ B ⊢ C ⊃ D   and   Γ, B ⊢ G
        if (sequent(with(ctx, i, Formula::imp(a.right(), b)), a) && sequent(with(ctx, i, b), goal)) {
          return true;
        }
      }
    }
    return false;
  }

  std::unordered_map<std::string, bool> memo_;
};

}  // namespace detail

/// True iff Δ ⊨ β in minimal implicational logic.
inline bool decide(const std::vector<Formula>& delta, const Formula& beta) {
  detail::Ljt ljt;
  return ljt.prove(delta, beta);
}

inline bool decide(const Formula& alpha) { return decide({}, alpha); }

/// Atom names used by the enumerator: A, B, .., Z, then p27, p28, ...
inline std::string enumerator_atom(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return "p" + std::to_string(i + 1);
}

/// Every formula over `num_atoms` atoms with size ≤ max_size, exactly once,
/// ordered by size, then by left subformula, then by right subformula.
inline std::vector<Formula> enumerate_formulas(std::size_t num_atoms, std::size_t max_size) {
  if (num_atoms == 0 || max_size == 0) throw std::invalid_argument("enumerate_formulas: empty alphabet or size");
  std::vector<std::vector<Formula>> by_size(max_size + 1);
  for (std::size_t i = 0; i < num_atoms; ++i) by_size[1].push_back(Formula::atom(enumerator_atom(i)));
  for (std::size_t s = 3; s <= max_size; s += 2) {
    for (std::size_t ls = 1; ls + 1 < s; ls += 2) {
      std::size_t rs = s - 1 - ls;
      for (const auto& l : by_size[ls]) {
        for (const auto& r : by_size[rs]) by_size[s].push_back(Formula::imp(l, r));
      }
    }
  }
  std::vector<Formula> out;
  for (const auto& v : by_size) out.insert(out.end(), v.begin(), v.end());
  return out;
}

struct FibInstance {
  std::size_t n;
  std::vector<Formula> atoms;  // p1 .. pn
  std::vector<Formula> delta;  // p1, p1 ⊃ p2, then p_i ⊃ (p_{i+1} ⊃ p_{i+2}) for i = 1..n-2
  Derivation derivation;
};

/// Node count of the Fibonacci derivation of p_n.
inline std::uint64_t fib_node_count(std::size_t n) {
  if (n == 0) throw std::invalid_argument("fib_node_count: n must be positive");
  std::uint64_t a = 1, b = 3;  // N(1), N(2)
  if (n == 1) return a;
  for (std::size_t i = 2; i < n; ++i) {
    std::uint64_t c = a + b + 3;
    a = b;
    b = c;
  }
  return b;
}

namespace detail {

inline std::vector<ProofPtr> fib_terms(std::size_t n, std::vector<Formula>& atoms,
                                       std::vector<Formula>& delta) {
  for (std::size_t i = 1; i <= n; ++i) atoms.push_back(Formula::atom("p" + std::to_string(i)));
  delta.push_back(atoms[0]);
  delta.push_back(Formula::imp(atoms[0], atoms[1]));
  for (std::size_t i = 0; i + 2 < n; ++i) {
    delta.push_back(Formula::imp(atoms[i], Formula::imp(atoms[i + 1], atoms[i + 2])));
  }
  // D(1) = [p1], D(2) = [p1] with [p1 ⊃ p2],
  // D(i+2) = elim(D(i+1), elim(D(i), [p_i ⊃ (p_{i+1} ⊃ p_{i+2})])).
  std::vector<ProofPtr> d;
  d.push_back(hyp(delta[0]));
  d.push_back(elim(hyp(delta[0]), hyp(delta[1])));
  for (std::size_t i = 0; i + 2 < n; ++i) {
    d.push_back(elim(d[i + 1], elim(d[i], hyp(delta[i + 2]))));
  }
  return d;
}

}  // namespace detail

/// Derivation of p_n from Δ_n.
inline FibInstance fib_family(std::size_t n) {
  if (n < 2) throw std::invalid_argument("fib_family: n must be at least 2");
  std::vector<Formula> atoms, delta;
  auto terms = detail::fib_terms(n, atoms, delta);
  Derivation d = build_derivation(terms[n - 1]);
  return FibInstance{n, std::move(atoms), std::move(delta), std::move(d)};
}

/// Closed proof of δ1 ⊃ (δ2 ⊃ .. ⊃ p_n) obtained by discharging Δ_n in listing order.
inline FibInstance fib_family_closed(std::size_t n) {
  if (n < 2) throw std::invalid_argument("fib_family_closed: n must be at least 2");
  std::vector<Formula> atoms, delta;
  auto terms = detail::fib_terms(n, atoms, delta);
  ProofPtr p = terms[n - 1];
  for (std::size_t i = delta.size(); i-- > 0;) p = intro(delta[i], p);
  Derivation d = build_derivation(p);
  return FibInstance{n, std::move(atoms), std::move(delta), std::move(d)};
}

}  // namespace mimply
