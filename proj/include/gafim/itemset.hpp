// Copyright 2026, the gafim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gafim/error.hpp"

namespace gafim {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

// Largest supported item universe. Itemsets span as many 64-bit words as
// needed up to this bound.
inline constexpr std::size_t kMaxItems = 4096;

inline constexpr std::size_t words_for(std::size_t width) {
  return (width + kWordBits - 1) / kWordBits;
}

/// A subset of the item universe {1..width}, stored as a bitmask.
///
/// Bit position i (0-based) represents item i+1. Every public function that
/// takes or returns item *ids* is 1-based; functions taking a *position* are
/// 0-based. Bits at positions >= width are never set.
class Itemset {
 public:
  Itemset() = default;

  explicit Itemset(std::size_t width) : width_(width), words_(words_for(width), 0) {
    if (width == 0 || width > kMaxItems) {
      throw UsageError("itemset width must be in [1, " + std::to_string(kMaxItems) +
                       "], got " + std::to_string(width));
    }
  }

  static Itemset from_ids(std::size_t width, std::span<const std::size_t> ids) {
    Itemset s(width);
    for (std::size_t id : ids) {
      if (id == 0 || id > width) {
        throw UsageError("item id " + std::to_string(id) + " outside [1, " +
                         std::to_string(width) + "]");
      }
      s.set(id - 1);
    }
    return s;
  }

  static Itemset from_ids(std::size_t width, std::initializer_list<std::size_t> ids) {
    return from_ids(width, std::span<const std::size_t>(ids.begin(), ids.size()));
  }

  /// Parses a '0'/'1' string where character i is item i+1.
  static Itemset from_bitstring(std::string_view bits) {
    Itemset s(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        s.set(i);
      } else if (bits[i] != '0') {
        throw UsageError("bitstring may contain only '0' and '1'");
      }
    }
    return s;
  }

  static Itemset full(std::size_t width) {
    Itemset s(width);
    for (auto& w : s.words_) w = ~Word{0};
    s.clear_tail();
    return s;
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  std::span<const Word> words() const noexcept { return words_; }

  bool test(std::size_t pos) const {
    return (words_[pos / kWordBits] >> (pos % kWordBits)) & Word{1};
  }

  void set(std::size_t pos) { words_[pos / kWordBits] |= Word{1} << (pos % kWordBits); }
  void reset(std::size_t pos) { words_[pos / kWordBits] &= ~(Word{1} << (pos % kWordBits)); }
  void flip(std::size_t pos) { words_[pos / kWordBits] ^= Word{1} << (pos % kWordBits); }

  bool contains_id(std::size_t id) const { return id >= 1 && id <= width_ && test(id - 1); }

  std::size_t cardinality() const noexcept {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool empty() const noexcept {
    for (Word w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  /// this ⊆ other. Widths must agree.
  bool is_subset_of(const Itemset& other) const {
    require_same_width(other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if ((words_[i] & other.words_[i]) != words_[i]) return false;
    }
    return true;
  }

  bool is_proper_subset_of(const Itemset& other) const {
    return is_subset_of(other) && *this != other;
  }

  bool intersects(const Itemset& other) const {
    require_same_width(other);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if ((words_[i] & other.words_[i]) != 0) return true;
    }
    return false;
  }

  Itemset operator|(const Itemset& other) const {
    require_same_width(other);
    Itemset r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= other.words_[i];
    return r;
  }

  Itemset operator&(const Itemset& other) const {
    require_same_width(other);
    Itemset r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= other.words_[i];
    return r;
  }

  /// Set difference this \ other.
  Itemset operator-(const Itemset& other) const {
    require_same_width(other);
    Itemset r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~other.words_[i];
    return r;
  }

  Itemset complement() const {
    Itemset r = *this;
    for (auto& w : r.words_) w = ~w;
    r.clear_tail();
    return r;
  }

  /// Calls fn(pos) for every set bit in ascending order.
  template <typename Fn>
  void for_each_position(Fn&& fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      Word w = words_[wi];
      while (w != 0) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(w));
        fn(wi * kWordBits + bit);
        w &= w - 1;
      }
    }
  }

  /// Sorted 1-based item ids.
  std::vector<std::size_t> ids() const {
    std::vector<std::size_t> out;
    out.reserve(cardinality());
    for_each_position([&](std::size_t pos) { out.push_back(pos + 1); });
    return out;
  }

  /// Highest set position, or width() when empty.
  std::size_t last_position() const noexcept {
    for (std::size_t wi = words_.size(); wi-- > 0;) {
      if (words_[wi] != 0) {
        return wi * kWordBits + (kWordBits - 1 - static_cast<std::size_t>(std::countl_zero(words_[wi])));
      }
    }
    return width_;
  }

  std::string to_bitstring() const {
    std::string s(width_, '0');
    for_each_position([&](std::size_t pos) { s[pos] = '1'; });
    return s;
  }

  /// "{3,5,7}" using 1-based ids.
  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for_each_position([&](std::size_t pos) {
      if (!first) s += ',';
      s += std::to_string(pos + 1);
      first = false;
    });
    s += '}';
    return s;
  }

  friend bool operator==(const Itemset&, const Itemset&) = default;

  /// Lexicographic order of the sorted id lists; a proper prefix sorts first.
  friend bool lex_less(const Itemset& a, const Itemset& b) {
    a.require_same_width(b);
    for (std::size_t wi = 0; wi < a.words_.size(); ++wi) {
      const Word diff = a.words_[wi] ^ b.words_[wi];
      if (diff == 0) continue;
      const Word low = diff & (~diff + 1);
      // The set owning the lowest differing item is smaller, unless the other
      // set has nothing left above that item (then it is a prefix).
      const bool a_has = (a.words_[wi] & low) != 0;
      const bool other_has_more = (a_has ? b : a).any_above(wi, low);
      return a_has ? other_has_more : !other_has_more;
    }
    return false;
  }

 private:
  void require_same_width(const Itemset& other) const {
    if (width_ != other.width_) {
      throw UsageError("itemset width mismatch: " + std::to_string(width_) + " vs " +
                       std::to_string(other.width_));
    }
  }

  // Any bit strictly above the single-bit mask `bit` in word wi.
  bool any_above(std::size_t wi, Word bit) const {
    const Word above = ~((bit << 1) - 1);
    if (bit != (Word{1} << 63) && (words_[wi] & above) != 0) return true;
    for (std::size_t j = wi + 1; j < words_.size(); ++j) {
      if (words_[j] != 0) return true;
    }
    return false;
  }

  void clear_tail() {
    const std::size_t rem = width_ % kWordBits;
    if (rem != 0 && !words_.empty()) words_.back() &= (Word{1} << rem) - 1;
  }

  std::size_t width_ = 0;
  std::vector<Word> words_;
};

/// Orders by cardinality, then lexicographically. This is the canonical
/// output order for every report ("by level, then lexicographic").
struct LevelOrder {
  bool operator()(const Itemset& a, const Itemset& b) const {
    const std::size_t ca = a.cardinality();
    const std::size_t cb = b.cardinality();
    if (ca != cb) return ca < cb;
    return lex_less(a, b);
  }
};

struct LexOrder {
  bool operator()(const Itemset& a, const Itemset& b) const { return lex_less(a, b); }
};

struct ItemsetHash {
  std::size_t operator()(const Itemset& s) const noexcept {
    std::size_t h = std::hash<std::size_t>{}(s.width());
    for (Word w : s.words()) {
      h ^= std::hash<Word>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// An itemset together with its absolute support count.
struct CountedItemset {
  Itemset items;
  std::size_t count = 0;

  friend bool operator==(const CountedItemset&, const CountedItemset&) = default;
};

}  // namespace gafim

template <>
struct std::hash<gafim::Itemset> : gafim::ItemsetHash {};
