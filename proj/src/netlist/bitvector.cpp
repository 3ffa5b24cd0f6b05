#include "locklab/bitvector.hpp"

#include <stdexcept>

namespace locklab {

BitVector BitVector::from_string(std::string_view text) {
  BitVector v;
  v.bits_.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw std::invalid_argument("bit string may only contain 0 and 1: '" + std::string(text) + "'");
    }
    v.bits_.push_back(ch == '1');
  }
  return v;
}

BitVector BitVector::from_uint(std::uint64_t value, std::size_t width) {
  BitVector v(width);
  for (std::size_t i = 0; i < width && i < 64; ++i) {
    v.set(i, (value >> i) & 1);
  }
  return v;
}

BitVector BitVector::concat(const BitVector& tail) const {
  BitVector v = *this;
  v.bits_.insert(v.bits_.end(), tail.bits_.begin(), tail.bits_.end());
  return v;
}

BitVector BitVector::slice(std::size_t offset, std::size_t count) const {
  if (offset + count > width()) throw std::out_of_range("BitVector::slice out of range");
  BitVector v;
  v.bits_.assign(bits_.begin() + offset, bits_.begin() + offset + count);
  return v;
}

std::size_t BitVector::popcount() const {
  std::size_t n = 0;
  for (auto b : bits_) n += b;
  return n;
}

std::uint64_t BitVector::to_uint() const {
  if (width() > 64) throw std::out_of_range("BitVector wider than 64 bits");
  std::uint64_t x = 0;
  for (std::size_t i = 0; i < width(); ++i) {
    if (bits_[i]) x |= std::uint64_t{1} << i;
  }
  return x;
}

std::string BitVector::to_string() const {
  std::string s;
  s.reserve(width());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::string BitVector::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  const std::size_t ndigits = (width() + 3) / 4;
  std::string s(ndigits, '0');
  for (std::size_t d = 0; d < ndigits; ++d) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t i = d * 4 + j;
      if (i < width() && bits_[i]) nibble |= 1u << j;
    }
    s[ndigits - 1 - d] = digits[nibble];
  }
  return s;
}

}  // namespace locklab
