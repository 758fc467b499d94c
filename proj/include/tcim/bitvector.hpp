#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcim/error.hpp"

namespace tcim {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for_bits(std::size_t bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

/// Population count of a word span.
inline std::size_t popcount(std::span<const Word> words) {
  std::size_t n = 0;
  for (Word w : words) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

/// BitCount(AND(a, b)) without materializing the AND.
inline std::size_t and_popcount(std::span<const Word> a, std::span<const Word> b) {
  assert(a.size() == b.size());
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  }
  return n;
}

/// Fixed-length bit-vector. Bit t lives in word t/64 at position t%64;
/// bits past size() are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t bits) : bits_(bits), words_(words_for_bits(bits), 0) {}

  /// Parses a '0'/'1' string, leftmost character is bit 0 ("0110" sets bits 1 and 2).
  static BitVector from_string(std::string_view s) {
    BitVector v(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (s[t] == '1') {
        v.set(t);
      } else if (s[t] != '0') {
        throw ParseError("bit string may contain only '0' and '1'");
      }
    }
    return v;
  }

  std::size_t size() const noexcept { return bits_; }
  std::span<const Word> words() const noexcept { return words_; }
  std::span<Word> words() noexcept { return words_; }

  bool test(std::size_t t) const {
    assert(t < bits_);
    return (words_[t / kWordBits] >> (t % kWordBits)) & 1U;
  }
  void set(std::size_t t) {
    assert(t < bits_);
    words_[t / kWordBits] |= Word{1} << (t % kWordBits);
  }
  void reset(std::size_t t) {
    assert(t < bits_);
    words_[t / kWordBits] &= ~(Word{1} << (t % kWordBits));
  }
  void clear() noexcept { std::fill(words_.begin(), words_.end(), Word{0}); }

  std::size_t count() const noexcept { return popcount(words_); }
  bool none() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
  }

  BitVector operator&(const BitVector& other) const {
    assert(bits_ == other.bits_);
    BitVector out(bits_);
    for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] & other.words_[i];
    return out;
  }

  std::string to_string() const {
    std::string s(bits_, '0');
    for (std::size_t t = 0; t < bits_; ++t) {
      if (test(t)) s[t] = '1';
    }
    return s;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t bits_ = 0;
  std::vector<Word> words_;
};

/// Number of '1's in v.
inline std::size_t bitcount(const BitVector& v) { return v.count(); }

}  // namespace tcim
