#include "sopool/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "sopool/error.hpp"

namespace sopool {

namespace {

constexpr char kMagic[4] = {'S', 'O', 'P', '1'};
constexpr std::size_t kHeader = 4 + 1 + 4;

static_assert(std::endian::native == std::endian::little,
              "tensor files are read and written with native little-endian layout");

[[noreturn]] void parse_error(std::size_t offset, const std::string& what) {
  std::ostringstream os;
  os << "tensor file: " << what << " at byte offset " << offset;
  fail(ErrorKind::Parse, os.str());
}

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

template <class T>
T get(const std::vector<std::uint8_t>& in, std::size_t offset) {
  T v;
  std::memcpy(&v, in.data() + offset, sizeof(T));
  return v;
}

std::size_t dtype_size(DType d) { return d == DType::F32 ? 4 : 8; }

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  require(t.dims.size() == 2 || t.dims.size() == 3, ErrorKind::Dimension,
          "tensor rank must be 2 or 3");
  require(t.values.size() == t.element_count(), ErrorKind::Dimension,
          "tensor payload does not match its dims");
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.reserve(kHeader + 4 * t.dims.size() + t.values.size() * dtype_size(t.dtype));
  put(out, static_cast<std::uint8_t>(t.dtype));
  put(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put(out, d);
  for (double v : t.values) {
    if (t.dtype == DType::F32) {
      put(out, static_cast<float>(v));
    } else {
      put(out, v);
    }
  }
  return out;
}

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) parse_error(bytes.size(), "truncated magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) parse_error(0, "bad magic (expected \"SOP1\")");
  if (bytes.size() < kHeader) parse_error(bytes.size(), "truncated header");
  Tensor t;
  const std::uint8_t dtype = bytes[4];
  if (dtype > 1) parse_error(4, "unknown dtype " + std::to_string(dtype));
  t.dtype = static_cast<DType>(dtype);
  const auto rank = get<std::uint32_t>(bytes, 5);
  if (rank != 2 && rank != 3) parse_error(5, "rank " + std::to_string(rank) + " not in {2, 3}");
  std::size_t offset = kHeader;
  if (bytes.size() < offset + 4 * rank) parse_error(bytes.size(), "truncated dims");
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i, offset += 4) {
    const auto d = get<std::uint32_t>(bytes, offset);
    if (d == 0) parse_error(offset, "zero-length dimension");
    t.dims.push_back(d);
    count *= d;
  }
  const std::size_t width = dtype_size(t.dtype);
  const std::size_t expected = offset + count * width;
  if (bytes.size() < expected) {
    parse_error(bytes.size(), "payload truncated (expected " + std::to_string(count * width) +
                                  " bytes after the header)");
  }
  if (bytes.size() > expected) parse_error(expected, "trailing bytes after payload");
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i, offset += width) {
    t.values[i] = t.dtype == DType::F32 ? static_cast<double>(get<float>(bytes, offset))
                                        : get<double>(bytes, offset);
  }
  return t;
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::Io, "read failed on " + path.string());
  return decode_tensor(bytes);
}

void write_tensor(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "write failed on " + path.string());
}

}  // namespace sopool
