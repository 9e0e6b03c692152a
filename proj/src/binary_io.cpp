#include "nmt/binary_io.hpp"

#include <charconv>
#include <sstream>

namespace nmt::io {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

void write_header(std::ostream& os, const std::string& magic, int version, const Header& h) {
  os << magic << ' ' << version << '\n';
  for (const auto& [k, v] : h) {
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos ||
        v.find('\n') != std::string::npos)
      throw FormatError("header entry not representable: " + k);
    os << k << '=' << v << '\n';
  }
  os << "end\n";
}

Header read_header(std::istream& is, const std::string& magic, int version) {
  std::string line;
  if (!std::getline(is, line)) throw TruncatedError("file is empty");
  std::istringstream first(line);
  std::string got_magic;
  int got_version = -1;
  first >> got_magic >> got_version;
  if (got_magic != magic)
    throw VersionError("bad magic string: expected '" + magic + "', got '" + got_magic + "'");
  if (got_version != version)
    throw VersionError(magic + ": unsupported version " + std::to_string(got_version) +
                       " (expected " + std::to_string(version) + ")");
  Header h;
  while (true) {
    if (!std::getline(is, line)) throw TruncatedError(magic + ": header not terminated");
    if (line == "end") break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(magic + ": malformed header line '" + line + "'");
    h[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return h;
}

const std::string& header_get(const Header& h, const std::string& key) {
  auto it = h.find(key);
  if (it == h.end()) throw FormatError("header key missing: " + key);
  return it->second;
}

void Writer::u64(std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os_.write(b, 8);
}

void Writer::u32(std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os_.write(b, 4);
}

void Writer::str(const std::string& s) {
  u64(s.size());
  os_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void Writer::f64s(const std::vector<double>& v) {
  u64(v.size());
  for (double x : v) f64(x);
}

void Writer::i32s(const std::vector<int>& v) {
  u64(v.size());
  for (int x : v) i32(x);
}

void Writer::u8s(const std::vector<std::uint8_t>& v) {
  u64(v.size());
  for (auto x : v) u8(x);
}

void Reader::raw(char* dst, std::size_t n) {
  is_.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is_.gcount()) != n) throw TruncatedError("payload truncated");
}

std::uint8_t Reader::u8() {
  char c;
  raw(&c, 1);
  return static_cast<std::uint8_t>(c);
}

std::uint64_t Reader::u64() {
  unsigned char b[8];
  raw(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::uint32_t Reader::u32() {
  unsigned char b[4];
  raw(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t Reader::count() {
  const std::uint64_t n = u64();
  if (n > (1ULL << 34)) throw FormatError("implausible array length " + std::to_string(n));
  return n;
}

std::string Reader::str() {
  std::string s(count(), '\0');
  raw(s.data(), s.size());
  return s;
}

std::vector<double> Reader::f64s() {
  std::vector<double> v(count());
  for (auto& x : v) x = f64();
  return v;
}

std::vector<int> Reader::i32s() {
  std::vector<int> v(count());
  for (auto& x : v) x = i32();
  return v;
}

std::vector<std::uint8_t> Reader::u8s() {
  std::vector<std::uint8_t> v(count());
  for (auto& x : v) x = u8();
  return v;
}

void Reader::expect_eof() {
  if (is_.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
}

}  // namespace nmt::io
