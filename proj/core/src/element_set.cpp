#include "roundcover/element_set.hpp"

#include <algorithm>
#include <string>

namespace roundcover {

namespace {
constexpr std::size_t word_count(std::size_t universe) { return (universe + 63) / 64; }
}  // namespace

ElementSet::ElementSet(std::size_t universe) : universe_(universe), words_(word_count(universe), 0) {}

ElementSet::ElementSet(std::size_t universe, std::initializer_list<Element> elements) : ElementSet(universe) {
  for (Element e : elements) insert(e);
}

ElementSet::ElementSet(std::size_t universe, std::span<const Element> elements) : ElementSet(universe) {
  for (Element e : elements) insert(e);
}

ElementSet ElementSet::full(std::size_t universe) {
  ElementSet s(universe);
  for (std::size_t i = 0; i < universe; ++i) s.insert(static_cast<Element>(i));
  return s;
}

bool ElementSet::contains(Element e) const {
  if (e >= universe_) return false;
  return (words_[e / 64] >> (e % 64)) & 1U;
}

void ElementSet::insert(Element e) {
  if (e >= universe_) {
    throw InputError("element " + std::to_string(e) + " out of range for groundset of size " +
                     std::to_string(universe_));
  }
  words_[e / 64] |= std::uint64_t{1} << (e % 64);
}

void ElementSet::erase(Element e) {
  if (e >= universe_) return;
  words_[e / 64] &= ~(std::uint64_t{1} << (e % 64));
}

std::size_t ElementSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool ElementSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool ElementSet::is_subset_of(const ElementSet& other) const {
  check_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

ElementSet& ElementSet::operator|=(const ElementSet& other) {
  check_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

ElementSet& ElementSet::operator&=(const ElementSet& other) {
  check_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

ElementSet& ElementSet::subtract(const ElementSet& other) {
  check_universe(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

std::vector<Element> ElementSet::elements() const {
  std::vector<Element> out;
  for_each([&](Element e) { out.push_back(e); });
  return out;
}

std::uint64_t ElementSet::hash() const {
  StableHasher h;
  h.add(static_cast<std::uint64_t>(universe_));
  h.add(words_);
  return h.value();
}

void ElementSet::check_universe(const ElementSet& other) const {
  if (other.universe_ != universe_) {
    throw InputError("element sets over different groundsets (" + std::to_string(universe_) + " vs " +
                     std::to_string(other.universe_) + ")");
  }
}

bool lex_less(const ElementSet& a, const ElementSet& b) {
  const auto ea = a.elements();
  const auto eb = b.elements();
  return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

StableHasher& StableHasher::add(std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (word >> (8 * i)) & 0xffU;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

StableHasher& StableHasher::add(std::span<const std::uint64_t> words) {
  for (auto w : words) add(w);
  return *this;
}

}  // namespace roundcover
