#pragma once

// Binary array container:
//   "EITK" | u32 version | u8 dtype | u8 ndim | u64 shape[ndim] | payload
// All integers and the row-major payload are little-endian.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "eitlab/types.hpp"

namespace eit {

enum class DType : std::uint8_t { F32 = 1, F64 = 2, C64 = 3, C128 = 4 };

inline constexpr std::uint32_t kArrayVersion = 1;

std::size_t dtype_size(DType t);

struct ArrayData {
  DType dtype = DType::F64;
  std::vector<std::uint64_t> shape;
  std::vector<std::uint8_t> payload;

  std::size_t element_count() const;
};

/// Written to a temporary sibling and renamed into place.
void save_array(const std::filesystem::path& path, const ArrayData& array);
/// Throws FormatError naming the defect (magic, version, dtype, truncation).
ArrayData load_array(const std::filesystem::path& path);

void save_real(const std::filesystem::path& path, const RealGrid& grid);
RealGrid load_real(const std::filesystem::path& path);

void save_vector(const std::filesystem::path& path, std::span<const double> values,
                 std::vector<std::uint64_t> shape = {});
std::vector<double> load_vector(const std::filesystem::path& path, std::vector<std::uint64_t>* shape = nullptr);

/// Square complex matrix stored as c128, row-major.
void save_complex(const std::filesystem::path& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd load_complex(const std::filesystem::path& path);

/// zlib crc32 of the whole file.
std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace eit
