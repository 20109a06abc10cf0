#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sopool {

enum class DType : std::uint8_t { F32 = 0, F64 = 1 };

/// In-memory form of a "SOP1" tensor: rank 2 (d×N) or 3 (d×H×W), values held
/// as double whatever the on-disk dtype.
struct Tensor {
  DType dtype = DType::F64;
  std::vector<std::uint32_t> dims;
  std::vector<double> values;

  std::size_t element_count() const;
};

/// Layout: "SOP1", u8 dtype, u32 rank, rank × u32 dims, row-major payload,
/// all little-endian. f32 values are widened on read and narrowed on write.
std::vector<std::uint8_t> encode_tensor(const Tensor& t);

/// Parse error naming the byte offset of the first bad field.
Tensor decode_tensor(const std::vector<std::uint8_t>& bytes);

/// Io error when the file cannot be opened, read or written.
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor& t);

}  // namespace sopool
