#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace locklab {

/// Fixed-width bit string. Bit 0 belongs to the first name of the ordered
/// name list the vector is paired with (key inputs, primary inputs, ...).
class BitVector {
public:
  BitVector() = default;
  explicit BitVector(std::size_t width, bool value = false) : bits_(width, value ? 1 : 0) {}

  /// Parses "0110..." where character i is bit i. Throws std::invalid_argument.
  static BitVector from_string(std::string_view text);

  /// Low `width` bits of `value`, bit i of the vector = bit i of the integer.
  static BitVector from_uint(std::uint64_t value, std::size_t width);

  std::size_t width() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  void push_back(bool v) { bits_.push_back(v ? 1 : 0); }

  /// Concatenation, `*this` first.
  BitVector concat(const BitVector& tail) const;
  BitVector slice(std::size_t offset, std::size_t count) const;

  std::size_t popcount() const;

  /// Integer value with bit 0 as the least significant bit. Width must be <= 64.
  std::uint64_t to_uint() const;

  /// Characters in bit order, e.g. "1011" means bit0=1, bit1=0, ...
  std::string to_string() const;

  /// Hexadecimal of the integer value (bit 0 = LSB), most significant digit first,
  /// zero-padded to ceil(width/4) digits. Works for any width.
  std::string to_hex() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace locklab
