#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace boolmark {

// Fixed-width bit vector over 64-bit words. Trailing bits of the last word
// are kept zero, so popcount and equality can work word by word.
class BitVec {
public:
  BitVec() = default;

  explicit BitVec(std::size_t width, bool fill_ones = false)
      : width_(width), words_((width + 63) / 64, 0) {
    if (fill_ones) fill(true);
  }

  std::size_t width() const { return width_; }

  bool get(std::size_t i) const {
    check_index(i);
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }

  void set(std::size_t i, bool v) {
    check_index(i);
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  void fill(bool v) {
    const std::uint64_t w = v ? ~std::uint64_t{0} : 0;
    for (auto& word : words_) word = w;
    clear_tail();
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  bool none() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  bool any() const { return !none(); }

  // True when every set bit of *this is also set in other.
  bool is_subset_of(const BitVec& other) const {
    check_width(other);
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  BitVec& operator&=(const BitVec& o) {
    check_width(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  BitVec& operator|=(const BitVec& o) {
    check_width(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }

  BitVec& operator^=(const BitVec& o) {
    check_width(o);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
  }

  friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
  friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

  bool operator==(const BitVec&) const = default;

  // popcount(a & b) without allocating.
  static std::size_t and_count(const BitVec& a, const BitVec& b) {
    a.check_width(b);
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      c += std::popcount(a.words_[i] & b.words_[i]);
    return c;
  }

  std::vector<std::size_t> on_bits() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word) {
        const int b = std::countr_zero(word);
        out.push_back(w * 64 + static_cast<std::size_t>(b));
        word &= word - 1;
      }
    }
    return out;
  }

private:
  void check_index(std::size_t i) const {
    if (i >= width_) throw std::out_of_range("BitVec: index out of range");
  }
  void check_width(const BitVec& o) const {
    if (width_ != o.width_) throw std::invalid_argument("BitVec: width mismatch");
  }
  void clear_tail() {
    const std::size_t used = width_ & 63;
    if (used && !words_.empty()) words_.back() &= (std::uint64_t{1} << used) - 1;
  }

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace boolmark
