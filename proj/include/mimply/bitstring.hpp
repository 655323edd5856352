#pragma once

// Fixed-length dependency bitstrings over a SubformulaOrder. Position 0 is the
// leftmost character of the textual form and corresponds to order[0].

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mimply/formula.hpp"

namespace mimply {

class Bitstring {
 public:
  Bitstring() = default;
  explicit Bitstring(std::size_t length) : length_(length), words_((length + 63) / 64, 0) {}

  static Bitstring from_string(std::string_view s) {
    Bitstring b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') {
        b.set(i);
      } else if (s[i] != '0') {
        throw std::invalid_argument("bitstring may only contain '0' and '1'");
      }
    }
    return b;
  }

  std::size_t length() const noexcept { return length_; }

  bool test(std::size_t i) const {
    check_index(i);
    return (words_[i / 64] >> (i % 64)) & 1U;
  }
  void set(std::size_t i) {
    check_index(i);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  void reset(std::size_t i) {
    check_index(i);
    words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  bool none() const noexcept {
    for (auto w : words_) {
      if (w != 0) return false;
    }
    return true;
  }
  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  Bitstring& operator|=(const Bitstring& o) {
    if (o.length_ != length_) throw std::invalid_argument("bitstring length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  std::string str() const {
    std::string s(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) {
      if (test(i)) s[i] = '1';
    }
    return s;
  }

  std::uint64_t hash() const noexcept {
    std::uint64_t h = length_ * 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) h = (h ^ w) * 0x100000001b3ULL + (h >> 29);
    return h;
  }

  friend bool operator==(const Bitstring& a, const Bitstring& b) noexcept {
    return a.length_ == b.length_ && a.words_ == b.words_;
  }
  friend bool operator!=(const Bitstring& a, const Bitstring& b) noexcept { return !(a == b); }
  friend bool operator<(const Bitstring& a, const Bitstring& b) noexcept {
    if (a.length_ != b.length_) return a.length_ < b.length_;
    return a.words_ < b.words_;
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= length_) throw std::out_of_range("bit index out of range");
  }

  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

class FormulaNotInOrder : public std::out_of_range {
 public:
  explicit FormulaNotInOrder(const Formula& f)
      : std::out_of_range("formula not in order: " + f.str()) {}
};

inline Bitstring encode(const std::vector<Formula>& set, const SubformulaOrder& order) {
  Bitstring b(order.size());
  for (const auto& f : set) {
    std::size_t i = order.find(f);
    if (i == order.size()) throw FormulaNotInOrder(f);
    b.set(i);
  }
  return b;
}

/// Members of `bits` in order sequence.
inline std::vector<Formula> decode(const Bitstring& bits, const SubformulaOrder& order) {
  if (bits.length() != order.size()) throw std::invalid_argument("bitstring length mismatch");
  std::vector<Formula> out;
  for (std::size_t i = 0; i < bits.length(); ++i) {
    if (bits.test(i)) out.push_back(order[i]);
  }
  return out;
}

inline Bitstring bit_union(const Bitstring& a, const Bitstring& b) {
  Bitstring r = a;
  r |= b;
  return r;
}

/// Clears the bit of `f` (greedy discharge). Throws FormulaNotInOrder for unknown formulas.
inline Bitstring bit_remove(const Bitstring& b, const Formula& f, const SubformulaOrder& order) {
  if (b.length() != order.size()) throw std::invalid_argument("bitstring length mismatch");
  std::size_t i = order.find(f);
  if (i == order.size()) throw FormulaNotInOrder(f);
  Bitstring r = b;
  r.reset(i);
  return r;
}

}  // namespace mimply
