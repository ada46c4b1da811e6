#include "tdict/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>

#include "tdict/errors.hpp"

namespace tdict {

namespace {

constexpr std::string_view kT3d1 = "T3D1";
constexpr std::string_view kTdct1 = "TDCT1";
constexpr std::string_view kTcof1 = "TCOF1";

class ByteWriter {
 public:
  void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }

  template <typename U>
  void uint(U v) {
    for (std::size_t b = 0; b < sizeof(U); ++b) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }

  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string_view format) : bytes_(bytes), format_(format) {}

  void magic(std::string_view m) {
    need(m.size(), "magic");
    if (std::memcmp(bytes_.data(), m.data(), m.size()) != 0) {
      throw FormatError(std::string(format_) + ": bad magic at offset 0, expected \"" + std::string(m) + "\"");
    }
    pos_ += m.size();
  }

  template <typename U>
  U uint(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(bytes_[pos_ + b]) << (8 * b);
    pos_ += sizeof(U);
    return v;
  }

  double f64(const char* what) { return std::bit_cast<double>(uint<std::uint64_t>(what)); }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  void finish() const {
    if (pos_ != bytes_.size()) {
      throw FormatError(std::string(format_) + ": " + std::to_string(bytes_.size() - pos_) +
                        " trailing bytes at offset " + std::to_string(pos_));
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError(std::string(format_) + ": " + msg + " at offset " + std::to_string(pos_));
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw FormatError(std::string(format_) + ": truncated " + what + " at offset " + std::to_string(pos_) +
                        " (need " + std::to_string(n) + " bytes, have " + std::to_string(remaining()) + ")");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::string_view format_;
  std::size_t pos_ = 0;
};

void write_dims_and_payload(ByteWriter& w, const Tensor3& t) {
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(t.rows()));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(t.cols()));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(t.tubes()));
  for (double x : t.data()) w.f64(x);
}

Tensor3 allocate(ByteReader& r, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::size_t bytes_per_entry) {
  if (a == 0 || b == 0 || c == 0) r.fail("zero dimension in header");
  constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 31;
  if (a > kMaxDim || b > kMaxDim || c > kMaxDim) r.fail("implausible dimension in header");
  if (static_cast<double>(a) * static_cast<double>(b) * static_cast<double>(c) > 0x1p36) {
    r.fail("implausible tensor size in header");
  }
  const std::uint64_t total = a * b * c;
  if (bytes_per_entry > 0 && total * bytes_per_entry > r.remaining()) {
    r.fail("truncated payload: header promises " + std::to_string(total) +
           " scalars, only " + std::to_string(r.remaining()) + " bytes remain");
  }
  return Tensor3(static_cast<Index>(a), static_cast<Index>(b), static_cast<Index>(c));
}

Tensor3 read_dims_and_payload(ByteReader& r) {
  const auto a = r.uint<std::uint64_t>("dimension");
  const auto b = r.uint<std::uint64_t>("dimension");
  const auto c = r.uint<std::uint64_t>("dimension");
  Tensor3 t = allocate(r, a, b, c, sizeof(double));
  for (double& x : t.data()) x = r.f64("payload");
  return t;
}

}  // namespace

std::vector<std::uint8_t> encode_t3d1(const Tensor3& t) {
  ByteWriter w;
  w.magic(kT3d1);
  write_dims_and_payload(w, t);
  return w.take();
}

Tensor3 decode_t3d1(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "T3D1");
  r.magic(kT3d1);
  Tensor3 t = read_dims_and_payload(r);
  r.finish();
  return t;
}

std::vector<std::uint8_t> encode_tdct1(const Tensor3& dictionary) {
  ByteWriter w;
  w.magic(kTdct1);
  write_dims_and_payload(w, dictionary);
  return w.take();
}

Tensor3 decode_tdct1(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "TDCT1");
  r.magic(kTdct1);
  Tensor3 t = read_dims_and_payload(r);
  r.finish();
  return t;
}

std::vector<std::uint8_t> encode_tcof1(const Tensor3& c, double threshold) {
  ByteWriter w;
  w.magic(kTcof1);
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(c.rows()));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(c.cols()));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(c.tubes()));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(nnz(c, threshold)));
  for (Index k = 0; k < c.tubes(); ++k) {
    for (Index j = 0; j < c.cols(); ++j) {
      for (Index i = 0; i < c.rows(); ++i) {
        const double v = c(i, j, k);
        if (std::abs(v) <= threshold) continue;
        w.uint<std::uint32_t>(static_cast<std::uint32_t>(i));
        w.uint<std::uint32_t>(static_cast<std::uint32_t>(j));
        w.uint<std::uint32_t>(static_cast<std::uint32_t>(k));
        w.f64(v);
      }
    }
  }
  return w.take();
}

Tensor3 decode_tcof1(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "TCOF1");
  r.magic(kTcof1);
  const auto s = r.uint<std::uint64_t>("dimension");
  const auto m = r.uint<std::uint64_t>("dimension");
  const auto q = r.uint<std::uint64_t>("dimension");
  Tensor3 c = allocate(r, s, m, q, 0);
  const auto count = r.uint<std::uint64_t>("record count");
  constexpr std::size_t kRecord = 3 * sizeof(std::uint32_t) + sizeof(double);
  if (count > static_cast<std::uint64_t>(c.size())) r.fail("record count exceeds tensor size");
  if (count * kRecord > r.remaining()) {
    r.fail("truncated records: header promises " + std::to_string(count) + " records, only " +
           std::to_string(r.remaining()) + " bytes remain");
  }
  for (std::uint64_t n = 0; n < count; ++n) {
    const auto i = r.uint<std::uint32_t>("record index");
    const auto j = r.uint<std::uint32_t>("record index");
    const auto k = r.uint<std::uint32_t>("record index");
    const double v = r.f64("record value");
    if (i >= s || j >= m || k >= q) r.fail("record index out of range");
    c(i, j, k) = v;
  }
  r.finish();
  return c;
}

std::string sniff_format(std::span<const std::uint8_t> bytes) {
  auto starts = [&](std::string_view m) {
    return bytes.size() >= m.size() && std::memcmp(bytes.data(), m.data(), m.size()) == 0;
  };
  if (starts(kTdct1)) return std::string(kTdct1);
  if (starts(kTcof1)) return std::string(kTcof1);
  if (starts(kT3d1)) return std::string(kT3d1);
  return {};
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

namespace {

template <typename Decode>
Tensor3 decode_file(const std::filesystem::path& path, Decode decode) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

void write_t3d1(const std::filesystem::path& path, const Tensor3& t) { write_file_bytes(path, encode_t3d1(t)); }
Tensor3 read_t3d1(const std::filesystem::path& path) { return decode_file(path, decode_t3d1); }

void write_dictionary(const std::filesystem::path& path, const Tensor3& d) { write_file_bytes(path, encode_tdct1(d)); }
Tensor3 read_dictionary(const std::filesystem::path& path) { return decode_file(path, decode_tdct1); }

void write_coefficients(const std::filesystem::path& path, const Tensor3& c, double threshold) {
  write_file_bytes(path, encode_tcof1(c, threshold));
}
Tensor3 read_coefficients(const std::filesystem::path& path) { return decode_file(path, decode_tcof1); }

Tensor3 read_tensor_any(const std::filesystem::path& path) {
  return decode_file(path, [&](std::span<const std::uint8_t> bytes) {
    const std::string fmt = sniff_format(bytes);
    if (fmt == kTcof1) return decode_tcof1(bytes);
    if (fmt == kT3d1) return decode_t3d1(bytes);
    if (fmt == kTdct1) return decode_tdct1(bytes);
    throw FormatError("unrecognized magic at offset 0");
  });
}

}  // namespace tdict
