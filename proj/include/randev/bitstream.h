#ifndef RANDEV_BITSTREAM_H_
#define RANDEV_BITSTREAM_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace randev {

// Packed binary sequence with an exact bit count.
//
// Bit i lives in byte i / 8 at bit position i % 8, least significant bit
// first. Pad bits of the final byte are always zero, so two sequences are
// equal iff their bytes and lengths are equal.
class BitSequence {
 public:
  BitSequence() = default;

  // n zero bits.
  explicit BitSequence(uint64_t nbits);

  // Takes the first nbits bits of `bytes`. Requires nbits <= 8 * bytes.size().
  static BitSequence FromBytes(std::span<const uint8_t> bytes, uint64_t nbits);
  static BitSequence FromBytes(std::span<const uint8_t> bytes) {
    return FromBytes(bytes, 8 * static_cast<uint64_t>(bytes.size()));
  }

  // Parses "0110"-style text. Any other character throws FormatError.
  static BitSequence FromString(std::string_view bits);

  uint64_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool operator[](uint64_t i) const { return (data_[i >> 3] >> (i & 7)) & 1; }

  void push_back(bool bit) {
    if ((nbits_ & 7) == 0) data_.push_back(0);
    if (bit) data_.back() |= static_cast<uint8_t>(1u << (nbits_ & 7));
    ++nbits_;
  }

  // Appends the low `count` bits of `word`, least significant first.
  void AppendWord(uint64_t word, unsigned count);

  // Appends another sequence; works for any alignment of *this.
  void Append(const BitSequence& other);

  void reserve(uint64_t nbits) { data_.reserve((nbits + 7) / 8); }

  // The 64 bits starting at `pos` (bit 0 of the result is bit `pos`).
  // Positions at or past size() read as zero.
  uint64_t Word(uint64_t pos) const;

  uint64_t CountOnes() const { return CountOnes(0, nbits_); }
  // Ones in [begin, end).
  uint64_t CountOnes(uint64_t begin, uint64_t end) const;

  BitSequence Slice(uint64_t pos, uint64_t len) const;

  std::span<const uint8_t> bytes() const { return data_; }

  std::string ToString() const;

  friend bool operator==(const BitSequence&, const BitSequence&) = default;

 private:
  std::vector<uint8_t> data_;
  uint64_t nbits_ = 0;
};

BitSequence Concat(const BitSequence& a, const BitSequence& b);
BitSequence Concat(std::span<const BitSequence> parts);

enum class BitFormat { kRaw, kAscii };

// "raw" or "ascii"; nullopt otherwise.
std::optional<BitFormat> ParseBitFormat(std::string_view name);

// raw: packed bytes, no header. ascii: one '0'/'1' per bit, then '\n'.
void WriteBits(const BitSequence& seq, std::ostream& out, BitFormat format);
void WriteBits(const BitSequence& seq, const std::filesystem::path& path,
               BitFormat format);

// Raw input has 8 * bytes bits unless nbits_override is given, in which case
// it must not exceed that. Ascii input ignores '\n' and may be truncated by
// the override.
BitSequence ReadBits(std::istream& in, BitFormat format,
                     std::optional<uint64_t> nbits_override = std::nullopt);
BitSequence ReadBits(const std::filesystem::path& path, BitFormat format,
                     std::optional<uint64_t> nbits_override = std::nullopt);

}  // namespace randev

#endif  // RANDEV_BITSTREAM_H_
