#pragma once

#include <cstdint>
#include <vector>

#include "press/errors.hpp"

namespace press {

// MSB-first bit packing: the first bit written occupies the highest bit of
// byte 0. Trailing bits of the last byte are zero.
class BitWriter {
 public:
  void push_bit(int b) {
    const std::size_t byte = bit_count_ / 8;
    if (byte >= bytes_.size()) bytes_.push_back(0);
    if (b) bytes_[byte] |= static_cast<std::uint8_t>(0x80u >> (bit_count_ % 8));
    ++bit_count_;
  }

  void push_code(std::uint64_t code, int len) {
    for (int i = len - 1; i >= 0; --i) push_bit(static_cast<int>((code >> i) & 1u));
  }

  std::uint64_t bit_count() const { return bit_count_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> take_bytes() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bit_count_ = 0;
};

class BitReader {
 public:
  BitReader(const std::vector<std::uint8_t>& bytes, std::uint64_t bit_count)
      : bytes_(&bytes), bit_count_(bit_count) {
    if (bytes.size() * 8 < bit_count) throw DataError("bitstream shorter than declared bit count");
  }

  bool done() const { return pos_ == bit_count_; }

  int next_bit() {
    if (pos_ >= bit_count_) throw DataError("bitstream exhausted mid-code");
    const int b = ((*bytes_)[pos_ / 8] >> (7 - pos_ % 8)) & 1;
    ++pos_;
    return b;
  }

 private:
  const std::vector<std::uint8_t>* bytes_;
  std::uint64_t bit_count_;
  std::uint64_t pos_ = 0;
};

}  // namespace press
