#pragma once

// Implicational formulas, their parser and printer, syntax trees and the
// canonical subformula order.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mimply {

class Formula {
 public:
  Formula() = delete;

  static Formula atom(std::string name) {
    if (name.empty()) throw std::invalid_argument("atom name must be nonempty");
    auto node = std::make_shared<Node>();
    node->hash = std::hash<std::string>{}(name) * 0x9e3779b97f4a7c15ULL + 1;
    node->size = 1;
    node->name = std::move(name);
    return Formula(std::move(node));
  }

  static Formula imp(const Formula& lhs, const Formula& rhs) {
    auto node = std::make_shared<Node>();
    node->lhs = lhs.node_;
    node->rhs = rhs.node_;
    node->size = lhs.size() + rhs.size() + 1;
    std::uint64_t h = lhs.hash();
    h ^= rhs.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    node->hash = h * 0xff51afd7ed558ccdULL + 7;
    return Formula(std::move(node));
  }

  bool is_atom() const noexcept { return node_->lhs == nullptr; }
  bool is_imp() const noexcept { return node_->lhs != nullptr; }

  const std::string& name() const {
    if (!is_atom()) throw std::logic_error("name() on an implication");
    return node_->name;
  }
  Formula left() const {
    if (is_atom()) throw std::logic_error("left() on an atom");
    return Formula(node_->lhs);
  }
  Formula right() const {
    if (is_atom()) throw std::logic_error("right() on an atom");
    return Formula(node_->rhs);
  }

  /// Number of syntax-tree vertices.
  std::size_t size() const noexcept { return node_->size; }
  std::uint64_t hash() const noexcept { return node_->hash; }

  /// Canonical text: `->` with parentheses only around left-nested implications.
  std::string str() const {
    std::string out;
    out.reserve(size() * 4);
    print(node_.get(), out);
    return out;
  }

  friend bool operator==(const Formula& a, const Formula& b) noexcept {
    return equal(a.node_.get(), b.node_.get());
  }
  friend bool operator!=(const Formula& a, const Formula& b) noexcept { return !(a == b); }

 private:
  struct Node {
    std::string name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
    std::size_t size = 0;
    std::uint64_t hash = 0;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static bool equal(const Node* a, const Node* b) noexcept {
    while (true) {
      if (a == b) return true;
      if (a->hash != b->hash || a->size != b->size) return false;
      if (a->lhs == nullptr || b->lhs == nullptr) {
        return a->lhs == nullptr && b->lhs == nullptr && a->name == b->name;
      }
      if (!equal(a->lhs.get(), b->lhs.get())) return false;
      a = a->rhs.get();
      b = b->rhs.get();
    }
  }

  static void print(const Node* n, std::string& out) {
    while (n->lhs != nullptr) {
      const Node* l = n->lhs.get();
      if (l->lhs != nullptr) {
        out += '(';
        print(l, out);
        out += ')';
      } else {
        out += l->name;
      }
      out += " -> ";
      n = n->rhs.get();
    }
    out += n->name;
  }

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return static_cast<std::size_t>(f.hash()); }
};

using FormulaSet = std::unordered_set<Formula, FormulaHash>;

inline Formula imp(const Formula& a, const Formula& b) { return Formula::imp(a, b); }
inline Formula atom(std::string name) { return Formula::atom(std::move(name)); }

// ---------------------------------------------------------------------------
// Parsing

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t token, std::size_t column)
      : std::runtime_error(what + " at token " + std::to_string(token) + " (column " +
                           std::to_string(column) + ")"),
        token_(token),
        column_(column) {}

  /// Zero-based index of the offending token.
  std::size_t token() const noexcept { return token_; }
  /// Zero-based byte offset into the input.
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t token_;
  std::size_t column_;
};

namespace detail {

enum class Tok { Ident, Arrow, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> toks;
  std::size_t i = 0;
  auto ident_start = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  auto ident_char = [&](char c) { return ident_start(c) || (c >= '0' && c <= '9'); };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (c == '(') {
      toks.push_back({Tok::LParen, "(", i++});
    } else if (c == ')') {
      toks.push_back({Tok::RParen, ")", i++});
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      toks.push_back({Tok::Arrow, "->", i});
      i += 2;
    } else if (s.substr(i, 3) == "\xE2\x8A\x83") {  // U+2283 SUPERSET OF
      toks.push_back({Tok::Arrow, "\xE2\x8A\x83", i});
      i += 3;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      toks.push_back({Tok::Ident, std::string(s.substr(i, j - i)), i});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", toks.size(), i);
    }
  }
  toks.push_back({Tok::End, "", s.size()});
  return toks;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("expected end of input");
    return f;
  }

 private:
  // Right-associativity is handled by looping over the arrow chain and folding
  // from the right, which keeps the recursion depth bounded by nesting of
  // parentheses rather than by chain length.
  Formula formula() {
    std::vector<Formula> chain;
    chain.push_back(primary());
    while (peek().kind == Tok::Arrow) {
      ++pos_;
      chain.push_back(primary());
    }
    Formula acc = chain.back();
    for (std::size_t i = chain.size() - 1; i-- > 0;) acc = Formula::imp(chain[i], acc);
    return acc;
  }

  Formula primary() {
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      ++pos_;
      return Formula::atom(t.text);
    }
    if (t.kind == Tok::LParen) {
      ++pos_;
      Formula f = formula();
      if (peek().kind != Tok::RParen) fail("expected ')'");
      ++pos_;
      return f;
    }
    fail(t.kind == Tok::End ? "unexpected end of input" : "expected atom or '('");
  }

  const Token& peek() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, pos_, toks_[pos_].column);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `formula := atom | formula "->" formula | "(" formula ")"`, with
/// `->` right-associative and U+2283 accepted in place of `->`.
inline Formula parse_formula(std::string_view text) {
  return detail::Parser(detail::tokenize(text)).parse_all();
}

// ---------------------------------------------------------------------------
// Subformulas and the canonical order

/// Appends every subformula of `f` (including `f`) to `out`, skipping those already in `seen`.
inline void collect_subformulas(const Formula& f, FormulaSet& seen, std::vector<Formula>& out) {
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g).second) continue;
    out.push_back(g);
    if (g.is_imp()) {
      stack.push_back(g.right());
      stack.push_back(g.left());
    }
  }
}

inline std::vector<Formula> subformulas(const Formula& f) {
  FormulaSet seen;
  std::vector<Formula> out;
  collect_subformulas(f, seen, out);
  return out;
}

class SubformulaOrder {
 public:
  /// Keeps `formulas` in the given sequence. Throws on duplicates or an empty list.
  static SubformulaOrder explicit_order(std::vector<Formula> formulas) {
    if (formulas.empty()) throw std::invalid_argument("subformula order must be nonempty");
    SubformulaOrder o;
    o.items_ = std::move(formulas);
    o.index_.reserve(o.items_.size());
    for (std::size_t i = 0; i < o.items_.size(); ++i) {
      if (!o.index_.emplace(o.items_[i], i).second) {
        throw std::invalid_argument("duplicate formula in order: " + o.items_[i].str());
      }
    }
    return o;
  }

  /// Sorted by (size, canonical string); the universe is taken as given, not sub-closed.
  static SubformulaOrder canonical(const std::vector<Formula>& universe) {
    FormulaSet seen;
    std::vector<std::pair<std::string, Formula>> keyed;
    for (const auto& f : universe) {
      if (seen.insert(f).second) keyed.emplace_back(f.str(), f);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
      if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
      return a.first < b.first;
    });
    std::vector<Formula> items;
    items.reserve(keyed.size());
    for (auto& k : keyed) items.push_back(std::move(k.second));
    return explicit_order(std::move(items));
  }

  /// Canonical order over the sub-closure of `roots`.
  static SubformulaOrder of_subformulas(const std::vector<Formula>& roots) {
    FormulaSet seen;
    std::vector<Formula> all;
    for (const auto& r : roots) collect_subformulas(r, seen, all);
    return canonical(all);
  }

  std::size_t size() const noexcept { return items_.size(); }
  const Formula& operator[](std::size_t i) const { return items_.at(i); }
  const std::vector<Formula>& formulas() const noexcept { return items_; }

  bool contains(const Formula& f) const { return index_.count(f) != 0; }

  std::size_t index_of(const Formula& f) const {
    auto it = index_.find(f);
    if (it == index_.end()) throw std::out_of_range("formula not in order: " + f.str());
    return it->second;
  }

  /// Returns size() when absent.
  std::size_t find(const Formula& f) const {
    auto it = index_.find(f);
    return it == index_.end() ? items_.size() : it->second;
  }

  friend bool operator==(const SubformulaOrder& a, const SubformulaOrder& b) {
    return a.items_ == b.items_;
  }

 private:
  SubformulaOrder() = default;
  std::vector<Formula> items_;
  std::unordered_map<Formula, std::size_t, FormulaHash> index_;
};

inline SubformulaOrder subformula_order(const std::vector<Formula>& universe) {
  return SubformulaOrder::canonical(universe);
}

// ---------------------------------------------------------------------------
// Syntax trees

using VertexId = std::size_t;

class SyntaxTree {
 public:
  static constexpr VertexId npos = static_cast<VertexId>(-1);

  struct Vertex {
    Formula label;
    VertexId parent = npos;
    VertexId left = npos;
    VertexId right = npos;
    bool is_left_child = false;
    bool is_right_child = false;
  };

  /// Vertices are numbered in preorder, root first.
  explicit SyntaxTree(const Formula& alpha) {
    struct Item {
      Formula f;
      VertexId parent;
      bool left_side;
    };
    std::vector<Item> stack{{alpha, npos, false}};
    while (!stack.empty()) {
      Item it = stack.back();
      stack.pop_back();
      VertexId id = vertices_.size();
      vertices_.push_back(Vertex{it.f, it.parent});
      if (it.parent != npos) {
        if (it.left_side) {
          vertices_[it.parent].left = id;
          vertices_[id].is_left_child = true;
        } else {
          vertices_[it.parent].right = id;
          vertices_[id].is_right_child = true;
        }
      }
      if (it.f.is_imp()) {
        stack.push_back({it.f.right(), id, false});
        stack.push_back({it.f.left(), id, true});
      }
    }
  }

  std::size_t size() const noexcept { return vertices_.size(); }
  VertexId root() const noexcept { return 0; }
  const Vertex& operator[](VertexId v) const { return vertices_.at(v); }
  const Formula& label(VertexId v) const { return vertices_.at(v).label; }

 private:
  std::vector<Vertex> vertices_;
};

/// All u from which `v` is reached by a nonempty chain of right-child edges,
/// nearest first.
inline std::vector<VertexId> right_ancestral(const SyntaxTree& t, VertexId v) {
  if (v >= t.size()) throw std::out_of_range("vertex not in syntax tree");
  std::vector<VertexId> out;
  while (t[v].is_right_child) {
    v = t[v].parent;
    out.push_back(v);
  }
  return out;
}

}  // namespace mimply
