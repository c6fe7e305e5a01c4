#ifndef SYLPIPE_BINARY_IO_H_
#define SYLPIPE_BINARY_IO_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace sylpipe {

// Little-endian encoder for the binary model containers. Integers are
// fixed-width; doubles are written as their IEEE-754 bit pattern; strings are
// a u32 byte length followed by the bytes.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void U8(uint8_t v);
  void U32(uint32_t v);
  void U64(uint64_t v);
  void F64(double v);
  void Str(std::string_view s);
  void Magic(std::string_view magic);

 private:
  std::ostream& out_;
};

// Decoder matching BinaryWriter. Throws ModelError on truncated input.
class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  uint8_t U8();
  uint32_t U32();
  uint64_t U64();
  double F64();
  std::string Str();
  // Reads magic.size() bytes and throws ModelError if they differ.
  void ExpectMagic(std::string_view magic);

 private:
  void Read(char* buf, size_t n);
  std::istream& in_;
};

}  // namespace sylpipe

#endif  // SYLPIPE_BINARY_IO_H_
