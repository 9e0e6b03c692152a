#pragma once

// Little-endian helpers shared by the dataset and checkpoint formats. Both
// files are: "<MAGIC> <version>\n", then "key=value\n" header lines, then
// "end\n", then a binary payload.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmt::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

using Header = std::map<std::string, std::string>;

std::string format_double(double v);  // shortest round-trip text

void write_header(std::ostream& os, const std::string& magic, int version, const Header& h);
// Throws VersionError for a wrong magic string or unsupported version.
Header read_header(std::istream& is, const std::string& magic, int version);

const std::string& header_get(const Header& h, const std::string& key);

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u32(std::uint32_t v);
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s);
  void f64s(const std::vector<double>& v);
  void i32s(const std::vector<int>& v);
  void u8s(const std::vector<std::uint8_t>& v);

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  std::uint8_t u8();
  std::uint64_t u64();
  std::uint32_t u32();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str();
  std::vector<double> f64s();
  std::vector<int> i32s();
  std::vector<std::uint8_t> u8s();
  void expect_eof();

 private:
  void raw(char* dst, std::size_t n);
  std::uint64_t count();
  std::istream& is_;
};

}  // namespace nmt::io
