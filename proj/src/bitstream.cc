#include "randev/bitstream.h"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "randev/errors.h"

namespace randev {
namespace {

uint64_t LoadLittleEndian(const uint8_t* p) {
  uint64_t v;
  std::memcpy(&v, p, sizeof(v));
  if constexpr (std::endian::native == std::endian::big) {
    uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= static_cast<uint64_t>(p[i]) << (8 * i);
    v = r;
  }
  return v;
}

uint64_t LowMask(unsigned count) {
  return count >= 64 ? ~uint64_t{0} : (uint64_t{1} << count) - 1;
}

}  // namespace

BitSequence::BitSequence(uint64_t nbits)
    : data_((nbits + 7) / 8, 0), nbits_(nbits) {}

BitSequence BitSequence::FromBytes(std::span<const uint8_t> bytes,
                                   uint64_t nbits) {
  if (nbits > 8 * static_cast<uint64_t>(bytes.size())) {
    throw ParameterError("bit count " + std::to_string(nbits) +
                         " exceeds 8 x " + std::to_string(bytes.size()) +
                         " bytes");
  }
  BitSequence seq;
  seq.data_.assign(bytes.begin(), bytes.begin() + (nbits + 7) / 8);
  seq.nbits_ = nbits;
  if (nbits & 7) seq.data_.back() &= static_cast<uint8_t>(LowMask(nbits & 7));
  return seq;
}

BitSequence BitSequence::FromString(std::string_view bits) {
  BitSequence seq;
  seq.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw FormatError(std::string("invalid bit character '") + c + "'");
    }
    seq.push_back(c == '1');
  }
  return seq;
}

void BitSequence::AppendWord(uint64_t word, unsigned count) {
  if (count == 0) return;
  uint64_t w = word & LowMask(count);
  unsigned shift = nbits_ & 7;
  unsigned remaining = count;
  if (shift != 0) {
    data_.back() |= static_cast<uint8_t>(w << shift);
    unsigned take = std::min(8 - shift, remaining);
    w >>= take;
    remaining -= take;
  }
  while (remaining > 0) {
    data_.push_back(static_cast<uint8_t>(w));
    unsigned take = std::min(8u, remaining);
    w >>= take;
    remaining -= take;
  }
  nbits_ += count;
}

void BitSequence::Append(const BitSequence& other) {
  if (other.empty()) return;
  unsigned shift = nbits_ & 7;
  if (shift == 0) {
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  } else {
    for (uint8_t b : other.data_) {
      data_.back() |= static_cast<uint8_t>(b << shift);
      data_.push_back(static_cast<uint8_t>(b >> (8 - shift)));
    }
  }
  nbits_ += other.nbits_;
  data_.resize((nbits_ + 7) / 8);
}

uint64_t BitSequence::Word(uint64_t pos) const {
  if (pos >= nbits_) return 0;
  const size_t byte = pos >> 3;
  const unsigned shift = pos & 7;
  const size_t n = data_.size();
  uint64_t lo;
  if (byte + 8 <= n) {
    lo = LoadLittleEndian(data_.data() + byte);
  } else {
    lo = 0;
    for (size_t i = byte; i < n; ++i) {
      lo |= static_cast<uint64_t>(data_[i]) << (8 * (i - byte));
    }
  }
  if (shift != 0) {
    uint64_t hi = byte + 8 < n ? data_[byte + 8] : 0;
    lo = (lo >> shift) | (hi << (64 - shift));
  }
  return lo;
}

uint64_t BitSequence::CountOnes(uint64_t begin, uint64_t end) const {
  end = std::min(end, nbits_);
  uint64_t ones = 0;
  for (uint64_t pos = begin; pos < end; pos += 64) {
    ones += std::popcount(Word(pos) & LowMask(static_cast<unsigned>(
                                          std::min<uint64_t>(64, end - pos))));
  }
  return ones;
}

BitSequence BitSequence::Slice(uint64_t pos, uint64_t len) const {
  if (pos > nbits_ || len > nbits_ - pos) {
    throw ParameterError("slice out of range");
  }
  BitSequence out;
  out.reserve(len);
  for (uint64_t done = 0; done < len; done += 64) {
    out.AppendWord(Word(pos + done),
                   static_cast<unsigned>(std::min<uint64_t>(64, len - done)));
  }
  return out;
}

std::string BitSequence::ToString() const {
  std::string s(nbits_, '0');
  for (uint64_t i = 0; i < nbits_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

BitSequence Concat(const BitSequence& a, const BitSequence& b) {
  BitSequence out = a;
  out.Append(b);
  return out;
}

BitSequence Concat(std::span<const BitSequence> parts) {
  uint64_t total = 0;
  for (const auto& p : parts) total += p.size();
  BitSequence out;
  out.reserve(total);
  for (const auto& p : parts) out.Append(p);
  return out;
}

std::optional<BitFormat> ParseBitFormat(std::string_view name) {
  if (name == "raw") return BitFormat::kRaw;
  if (name == "ascii") return BitFormat::kAscii;
  return std::nullopt;
}

void WriteBits(const BitSequence& seq, std::ostream& out, BitFormat format) {
  if (format == BitFormat::kRaw) {
    auto bytes = seq.bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  } else {
    out << seq.ToString() << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed");
}

void WriteBits(const BitSequence& seq, const std::filesystem::path& path,
               BitFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing: " +
                  std::strerror(errno));
  }
  WriteBits(seq, out, format);
}

BitSequence ReadBits(std::istream& in, BitFormat format,
                     std::optional<uint64_t> nbits_override) {
  std::vector<uint8_t> bytes;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    bytes.insert(bytes.end(), buf, buf + in.gcount());
  }
  if (in.bad()) throw IoError("read failed");

  if (format == BitFormat::kRaw) {
    uint64_t available = 8 * static_cast<uint64_t>(bytes.size());
    uint64_t nbits = nbits_override.value_or(available);
    if (nbits > available) {
      throw ParameterError("--nbits " + std::to_string(nbits) +
                           " exceeds the " + std::to_string(available) +
                           " bits in the input");
    }
    return BitSequence::FromBytes(bytes, nbits);
  }

  BitSequence seq;
  seq.reserve(bytes.size());
  for (uint8_t c : bytes) {
    if (c == '\n') continue;
    if (c != '0' && c != '1') {
      throw FormatError("invalid character in ascii bit file (byte " +
                        std::to_string(c) + ")");
    }
    seq.push_back(c == '1');
  }
  if (nbits_override) {
    if (*nbits_override > seq.size()) {
      throw ParameterError("--nbits " + std::to_string(*nbits_override) +
                           " exceeds the " + std::to_string(seq.size()) +
                           " bits in the input");
    }
    seq = seq.Slice(0, *nbits_override);
  }
  return seq;
}

BitSequence ReadBits(const std::filesystem::path& path, BitFormat format,
                     std::optional<uint64_t> nbits_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string() + ": " +
                  std::strerror(errno));
  }
  return ReadBits(in, format, nbits_override);
}

}  // namespace randev
