#pragma once

// NPY v1.0 / NPZ reading and writing for 2-D little-endian float64 arrays.

#include <zlib.h>

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctf/array.hpp"
#include "ctf/error.hpp"

namespace ctf {

using Bytes = std::vector<std::uint8_t>;

namespace detail {

inline void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::uint64_t{in[pos + static_cast<std::size_t>(i)]} << (8 * i);
  return v;
}

inline void put_f64(std::uint8_t* dst, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) dst[i] = static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff);
}

inline double get_f64(const std::uint8_t* src) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t{src[i]} << (8 * i);
  return std::bit_cast<double>(bits);
}

inline std::uint32_t crc32_of(std::span<const std::uint8_t> data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks
  std::size_t pos = 0;
  while (pos < data.size()) {
    auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
    crc = ::crc32(crc, data.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

/// Minimal reader for the Python dict literal in an NPY header.
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : s_(text) {}

  struct Result {
    std::string descr;
    bool fortran_order = false;
    std::vector<std::size_t> shape;
  };

  Result parse() {
    Result r;
    bool have_descr = false, have_order = false, have_shape = false;
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      std::string key = quoted();
      expect(':');
      skip_ws();
      if (key == "descr") {
        r.descr = quoted();
        have_descr = true;
      } else if (key == "fortran_order") {
        r.fortran_order = boolean();
        have_order = true;
      } else if (key == "shape") {
        r.shape = tuple();
        have_shape = true;
      } else {
        fail("unexpected key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail("expected ',' or '}'");
      }
    }
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after dict");
    if (!have_descr || !have_order || !have_shape) fail("missing required key");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::MalformedHeader, what + " at offset " + std::to_string(pos_));
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string quoted() {
    skip_ws();
    char q = peek();
    if (q != '\'' && q != '"') fail("expected string");
    ++pos_;
    auto end = s_.find(q, pos_);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  bool boolean() {
    if (s_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }
  std::vector<std::size_t> tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected dimension");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        v = v * 10 + static_cast<std::size_t>(s_[pos_] - '0');
        if (v > (std::size_t{1} << 40)) fail("dimension too large");
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline constexpr std::uint8_t kNpyMagic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};

}  // namespace detail

/// Serializes `a` as an NPY v1.0 file: C order, '<f8'.
inline Bytes write_array(const ArrayF64& a) {
  std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (" +
                     std::to_string(a.rows()) + ", " + std::to_string(a.cols()) + "), }";
  // 10 preamble bytes + dict + padding + '\n' must be a multiple of 64.
  std::size_t unpadded = 10 + dict.size() + 1;
  std::size_t total = (unpadded + 63) / 64 * 64;
  dict.append(total - unpadded, ' ');
  dict.push_back('\n');

  Bytes out(total + a.size() * 8);
  std::memcpy(out.data(), detail::kNpyMagic, 6);
  out[6] = 0x01;
  out[7] = 0x00;
  out[8] = static_cast<std::uint8_t>(dict.size() & 0xff);
  out[9] = static_cast<std::uint8_t>(dict.size() >> 8);
  std::memcpy(out.data() + 10, dict.data(), dict.size());
  const std::size_t base = total;
  auto vals = a.values();
  for (std::size_t i = 0; i < vals.size(); ++i) detail::put_f64(out.data() + base + 8 * i, vals[i]);
  return out;
}

inline ArrayF64 read_array(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6 || std::memcmp(bytes.data(), detail::kNpyMagic, 6) != 0) {
    throw Error(Errc::BadMagic, "not an NPY file");
  }
  if (bytes.size() < 10) throw Error(Errc::MalformedHeader, "file shorter than NPY preamble");
  if (bytes[6] != 1 || bytes[7] != 0) {
    throw Error(Errc::UnsupportedVersion, "NPY version " + std::to_string(bytes[6]) + "." +
                                              std::to_string(bytes[7]) + " (only 1.0)");
  }
  auto header_len = static_cast<std::size_t>(detail::get_le(bytes, 8, 2));
  if (bytes.size() < 10 + header_len) throw Error(Errc::MalformedHeader, "header truncated");
  std::string_view text(reinterpret_cast<const char*>(bytes.data() + 10), header_len);
  auto hdr = detail::HeaderParser(text).parse();

  if (hdr.descr != "<f8") throw Error(Errc::UnsupportedDtype, "dtype '" + hdr.descr + "'");
  if (hdr.shape.size() != 2) {
    throw Error(Errc::MalformedHeader, "expected a 2-D shape, got " +
                                           std::to_string(hdr.shape.size()) + " dimensions");
  }
  std::size_t rows = hdr.shape[0], cols = hdr.shape[1];
  if (rows == 0 || cols == 0) throw Error(Errc::MalformedHeader, "empty dimension in shape");

  std::size_t count = rows * cols;
  std::size_t offset = 10 + header_len;
  if (bytes.size() - offset < count * 8) {
    throw Error(Errc::TruncatedPayload, "expected " + std::to_string(count * 8) + " bytes, have " +
                                            std::to_string(bytes.size() - offset));
  }
  ArrayF64 a(rows, cols);
  const std::uint8_t* src = bytes.data() + offset;
  if (hdr.fortran_order) {
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t r = 0; r < rows; ++r) a(r, c) = detail::get_f64(src + 8 * (c * rows + r));
    }
  } else {
    auto vals = a.values();
    for (std::size_t i = 0; i < count; ++i) vals[i] = detail::get_f64(src + 8 * i);
  }
  return a;
}

/// Named arrays in insertion order; the in-memory form of an NPZ file.
class ArrayArchive {
 public:
  using Entry = std::pair<std::string, ArrayF64>;

  void insert(std::string name, ArrayF64 a) {
    if (contains(name)) throw Error(Errc::DuplicateName, "duplicate entry '" + name + "'");
    entries_.emplace_back(std::move(name), std::move(a));
  }

  bool contains(std::string_view name) const noexcept { return find(name) != nullptr; }

  const ArrayF64* find(std::string_view name) const noexcept {
    for (const auto& [n, a] : entries_) {
      if (n == name) return &a;
    }
    return nullptr;
  }

  const ArrayF64& at(std::string_view name) const {
    if (const auto* a = find(name)) return *a;
    throw Error(Errc::NotFound, "no entry '" + std::string(name) + "'");
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const ArrayArchive&, const ArrayArchive&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Writes a ZIP archive with one stored (uncompressed) "<name>.npy" member per
/// entry. Timestamps are fixed so identical archives produce identical bytes.
inline Bytes write_archive(const ArrayArchive& arch) {
  constexpr std::uint16_t kDosDate = 0x0021;  // 1980-01-01
  Bytes out;
  Bytes central;
  for (const auto& [name, array] : arch.entries()) {
    Bytes payload = write_array(array);
    std::string member = name + ".npy";
    if (payload.size() > 0xfffffffeu) throw Error(Errc::IoError, "member too large for ZIP32");
    auto crc = detail::crc32_of(payload);
    auto size = static_cast<std::uint32_t>(payload.size());
    auto offset = static_cast<std::uint32_t>(out.size());

    detail::put_u32(out, 0x04034b50);
    detail::put_u16(out, 20);  // version needed
    detail::put_u16(out, 0);   // flags
    detail::put_u16(out, 0);   // method: store
    detail::put_u16(out, 0);   // time
    detail::put_u16(out, kDosDate);
    detail::put_u32(out, crc);
    detail::put_u32(out, size);
    detail::put_u32(out, size);
    detail::put_u16(out, static_cast<std::uint16_t>(member.size()));
    detail::put_u16(out, 0);
    out.insert(out.end(), member.begin(), member.end());
    out.insert(out.end(), payload.begin(), payload.end());

    detail::put_u32(central, 0x02014b50);
    detail::put_u16(central, 20);  // made by
    detail::put_u16(central, 20);  // needed
    detail::put_u16(central, 0);
    detail::put_u16(central, 0);
    detail::put_u16(central, 0);
    detail::put_u16(central, kDosDate);
    detail::put_u32(central, crc);
    detail::put_u32(central, size);
    detail::put_u32(central, size);
    detail::put_u16(central, static_cast<std::uint16_t>(member.size()));
    detail::put_u16(central, 0);  // extra
    detail::put_u16(central, 0);  // comment
    detail::put_u16(central, 0);  // disk
    detail::put_u16(central, 0);  // internal attrs
    detail::put_u32(central, 0);  // external attrs
    detail::put_u32(central, offset);
    central.insert(central.end(), member.begin(), member.end());
  }
  auto cd_offset = static_cast<std::uint32_t>(out.size());
  auto cd_size = static_cast<std::uint32_t>(central.size());
  out.insert(out.end(), central.begin(), central.end());
  auto count = static_cast<std::uint16_t>(arch.size());
  detail::put_u32(out, 0x06054b50);
  detail::put_u16(out, 0);
  detail::put_u16(out, 0);
  detail::put_u16(out, count);
  detail::put_u16(out, count);
  detail::put_u32(out, cd_size);
  detail::put_u32(out, cd_offset);
  detail::put_u16(out, 0);
  return out;
}

namespace detail {

inline Bytes inflate_raw(std::span<const std::uint8_t> in, std::size_t expected) {
  Bytes out(expected);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw Error(Errc::NotAZip, "inflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = ::inflate(&zs, Z_FINISH);
  auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) {
    throw Error(Errc::NotAZip, "corrupt deflate stream");
  }
  return out;
}

struct Zip64Sizes {
  std::uint64_t usize, csize, offset;
};

// Replaces 0xffffffff placeholders with values from a zip64 extra field.
inline void apply_zip64_extra(std::span<const std::uint8_t> extra, Zip64Sizes& s) {
  std::size_t p = 0;
  while (p + 4 <= extra.size()) {
    auto id = get_le(extra, p, 2);
    auto len = static_cast<std::size_t>(get_le(extra, p + 2, 2));
    if (p + 4 + len > extra.size()) break;
    if (id == 0x0001) {
      std::size_t q = p + 4;
      auto take = [&](std::uint64_t& field) {
        if (field == 0xffffffffu && q + 8 <= p + 4 + len) {
          field = get_le(extra, q, 8);
          q += 8;
        }
      };
      take(s.usize);
      take(s.csize);
      take(s.offset);
    }
    p += 4 + len;
  }
}

}  // namespace detail

/// Reads an NPZ archive. Accepts stored and deflated members.
inline ArrayArchive read_archive(std::span<const std::uint8_t> bytes) {
  using detail::get_le;
  constexpr std::size_t kEocdSize = 22;
  if (bytes.size() < kEocdSize) throw Error(Errc::NotAZip, "too short for a ZIP archive");

  std::optional<std::size_t> eocd;
  std::size_t lowest = bytes.size() > kEocdSize + 0xffff ? bytes.size() - kEocdSize - 0xffff : 0;
  for (std::size_t p = bytes.size() - kEocdSize + 1; p-- > lowest;) {
    if (get_le(bytes, p, 4) == 0x06054b50) {
      eocd = p;
      break;
    }
  }
  if (!eocd) throw Error(Errc::NotAZip, "end of central directory not found");

  std::uint64_t count = get_le(bytes, *eocd + 10, 2);
  std::uint64_t cd_size = get_le(bytes, *eocd + 12, 4);
  std::uint64_t cd_offset = get_le(bytes, *eocd + 16, 4);
  if (count == 0xffff || cd_offset == 0xffffffffu || cd_size == 0xffffffffu) {
    // zip64 end of central directory locator sits right before the EOCD.
    if (*eocd < 20 || get_le(bytes, *eocd - 20, 4) != 0x07064b50) {
      throw Error(Errc::NotAZip, "zip64 locator missing");
    }
    auto rec = get_le(bytes, *eocd - 20 + 8, 8);
    if (rec + 56 > bytes.size() || get_le(bytes, rec, 4) != 0x06064b50) {
      throw Error(Errc::NotAZip, "zip64 end record missing");
    }
    count = get_le(bytes, rec + 32, 8);
    cd_size = get_le(bytes, rec + 40, 8);
    cd_offset = get_le(bytes, rec + 48, 8);
  }
  if (cd_offset + cd_size > bytes.size()) throw Error(Errc::NotAZip, "central directory out of range");

  ArrayArchive arch;
  std::size_t p = cd_offset;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (p + 46 > bytes.size() || get_le(bytes, p, 4) != 0x02014b50) {
      throw Error(Errc::NotAZip, "bad central directory entry");
    }
    auto method = get_le(bytes, p + 10, 2);
    auto crc = static_cast<std::uint32_t>(get_le(bytes, p + 16, 4));
    detail::Zip64Sizes sz{get_le(bytes, p + 24, 4), get_le(bytes, p + 20, 4), get_le(bytes, p + 42, 4)};
    auto name_len = static_cast<std::size_t>(get_le(bytes, p + 28, 2));
    auto extra_len = static_cast<std::size_t>(get_le(bytes, p + 30, 2));
    auto comment_len = static_cast<std::size_t>(get_le(bytes, p + 32, 2));
    if (p + 46 + name_len + extra_len > bytes.size()) throw Error(Errc::NotAZip, "entry out of range");
    std::string name(reinterpret_cast<const char*>(bytes.data() + p + 46), name_len);
    detail::apply_zip64_extra(bytes.subspan(p + 46 + name_len, extra_len), sz);
    p += 46 + name_len + extra_len + comment_len;

    if (name.size() < 4 || name.substr(name.size() - 4) != ".npy") {
      throw Error(Errc::MemberNotNpy, "member '" + name + "'");
    }
    std::size_t lh = sz.offset;
    if (lh + 30 > bytes.size() || get_le(bytes, lh, 4) != 0x04034b50) {
      throw Error(Errc::NotAZip, "bad local header for '" + name + "'");
    }
    std::size_t data_start = lh + 30 + get_le(bytes, lh + 26, 2) + get_le(bytes, lh + 28, 2);
    if (data_start + sz.csize > bytes.size()) throw Error(Errc::NotAZip, "member data out of range");
    auto raw = bytes.subspan(data_start, sz.csize);

    Bytes inflated;
    std::span<const std::uint8_t> payload;
    if (method == 0) {
      payload = raw;
    } else if (method == 8) {
      inflated = detail::inflate_raw(raw, sz.usize);
      payload = inflated;
    } else {
      throw Error(Errc::NotAZip, "unsupported compression method " + std::to_string(method));
    }
    if (detail::crc32_of(payload) != crc) throw Error(Errc::NotAZip, "CRC mismatch in '" + name + "'");
    arch.insert(name.substr(0, name.size() - 4), read_array(payload));
  }
  return arch;
}

}  // namespace ctf
