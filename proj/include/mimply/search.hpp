#pragma once

// Goal-directed proof search producing normal, expanded proofs.

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "mimply/derivation.hpp"

namespace mimply {

namespace detail {

class GoalSearch {
 public:
  explicit GoalSearch(const Formula& alpha) : order_(SubformulaOrder::of_subformulas({alpha})) {
    const std::size_t n = order_.size();
    heads_.resize(n);
    // For each subformula γ = a1 ⊃ (a2 ⊃ .. (ak ⊃ q)), record q and a1..ak.
    for (std::size_t i = 0; i < n; ++i) {
      Formula g = order_[i];
      std::vector<std::size_t> ants;
      while (g.is_imp()) {
        ants.push_back(order_.index_of(g.left()));
        g = g.right();
      }
      heads_[i] = {order_.index_of(g), std::move(ants)};
    }
  }

  std::optional<ProofPtr> run(const Formula& goal, std::size_t bound) {
    Bitstring ctx(order_.size());
    std::size_t g = order_.index_of(goal);
    for (std::size_t b = 0; b <= bound; ++b) {
      if (auto p = prove(ctx, g, b)) return p;
    }
    return std::nullopt;
  }

 private:
  using Key = std::tuple<Bitstring, std::size_t, std::size_t>;

  ProofPtr prove(const Bitstring& ctx, std::size_t goal, std::size_t budget) {
    Key key{ctx, goal, budget};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    memo_[key] = nullptr;  // guards against re-entry on the same key
    ProofPtr result = attempt(ctx, goal, budget);
    memo_[key] = result;
    return result;
  }

  ProofPtr attempt(const Bitstring& ctx, std::size_t goal, std::size_t budget) {
    const Formula& g = order_[goal];
    if (g.is_imp()) {
      if (budget == 0) return nullptr;
      Bitstring inner = ctx;
      inner.set(order_.index_of(g.left()));
      ProofPtr body = prove(inner, order_.index_of(g.right()), budget - 1);
      return body ? intro(g.left(), body) : nullptr;
    }
    for (std::size_t h = 0; h < order_.size(); ++h) {
      if (!ctx.test(h) || heads_[h].first != goal) continue;
      const auto& ants = heads_[h].second;
      const std::size_t k = ants.size();
      if (k > budget) continue;
      // The i-th antecedent (0-based) is the minor premise at depth k - i.
      std::vector<ProofPtr> minors;
      bool ok = true;
      for (std::size_t i = 0; i < k && ok; ++i) {
        ProofPtr m = prove(ctx, ants[i], budget - (k - i));
        if (!m) ok = false;
        minors.push_back(m);
      }
      if (!ok) continue;
      ProofPtr acc = hyp(order_[h]);
      for (std::size_t i = 0; i < k; ++i) acc = elim(minors[i], acc);
      return acc;
    }
    return nullptr;
  }

  SubformulaOrder order_;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> heads_;
  std::map<Key, ProofPtr> memo_;
};

}  // namespace detail

/// Searches for a closed normal expanded proof of `alpha` of height at most
/// `depth_bound`, returning one of minimal height. Goals φ1 ⊃ φ2 are proved by
/// ⊃-Intro; an atomic goal q is proved by an in-scope assumption whose right
/// spine ends in q, with each antecedent proved as a minor premise.
inline std::optional<Derivation> proof_search(const Formula& alpha, std::size_t depth_bound) {
  detail::GoalSearch search(alpha);
  auto term = search.run(alpha, depth_bound);
  if (!term) return std::nullopt;
  return build_derivation(*term);
}

/// Default depth bound used by the CLI and the test corpus.
inline std::size_t default_search_depth(const Formula& alpha) { return 2 * alpha.size() + 2; }

}  // namespace mimply
