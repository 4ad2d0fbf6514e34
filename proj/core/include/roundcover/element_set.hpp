#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "roundcover/types.hpp"

namespace roundcover {

// A subset of the groundset {0, ..., universe-1}, stored as a bitset.
// Two sets only combine when they share a universe.
class ElementSet {
 public:
  ElementSet() = default;
  explicit ElementSet(std::size_t universe);
  ElementSet(std::size_t universe, std::initializer_list<Element> elements);
  ElementSet(std::size_t universe, std::span<const Element> elements);

  static ElementSet full(std::size_t universe);

  std::size_t universe() const { return universe_; }
  bool contains(Element e) const;
  void insert(Element e);
  void erase(Element e);
  std::size_t count() const;
  bool empty() const;
  bool is_subset_of(const ElementSet& other) const;

  ElementSet& operator|=(const ElementSet& other);
  ElementSet& operator&=(const ElementSet& other);
  // this \ other
  ElementSet& subtract(const ElementSet& other);
  friend ElementSet operator|(ElementSet a, const ElementSet& b) { return a |= b; }
  friend ElementSet operator&(ElementSet a, const ElementSet& b) { return a &= b; }

  std::vector<Element> elements() const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        f(static_cast<Element>(w * 64 + static_cast<std::size_t>(b)));
        bits &= bits - 1;
      }
    }
  }

  std::span<const std::uint64_t> words() const { return words_; }
  std::uint64_t hash() const;

  friend bool operator==(const ElementSet& a, const ElementSet& b) = default;

 private:
  void check_universe(const ElementSet& other) const;

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

// Lexicographic order on the sorted element lists ({} < {0} < {0,1} < {1}).
// Used wherever a deterministic tie-break between realizations is needed.
bool lex_less(const ElementSet& a, const ElementSet& b);

struct ElementSetHash {
  std::size_t operator()(const ElementSet& s) const { return static_cast<std::size_t>(s.hash()); }
};

// FNV-1a over 64-bit words; stable across runs and platforms.
class StableHasher {
 public:
  StableHasher& add(std::uint64_t word);
  StableHasher& add(std::span<const std::uint64_t> words);
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace roundcover
