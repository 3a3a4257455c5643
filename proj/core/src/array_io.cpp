#include "eitlab/array_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include <zlib.h>

namespace eit {

static_assert(std::endian::native == std::endian::little, "array container assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'E', 'I', 'T', 'K'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T take(const std::vector<std::uint8_t>& in, std::size_t& pos, const std::filesystem::path& path) {
  if (pos + sizeof(T) > in.size()) throw FormatError(path.string() + ": truncated header");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::F32: return 4;
    case DType::F64: return 8;
    case DType::C64: return 8;
    case DType::C128: return 16;
  }
  throw FormatError("unknown dtype code " + std::to_string(static_cast<int>(t)));
}

std::size_t ArrayData::element_count() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::uint64_t b) { return a * static_cast<std::size_t>(b); });
}

void save_array(const std::filesystem::path& path, const ArrayData& a) {
  if (a.shape.size() > 255) throw std::invalid_argument("save_array: too many dimensions");
  if (a.payload.size() != a.element_count() * dtype_size(a.dtype)) {
    throw std::invalid_argument("save_array: payload does not match shape");
  }
  std::vector<std::uint8_t> header;
  header.insert(header.end(), kMagic, kMagic + 4);
  put<std::uint32_t>(header, kArrayVersion);
  put<std::uint8_t>(header, static_cast<std::uint8_t>(a.dtype));
  put<std::uint8_t>(header, static_cast<std::uint8_t>(a.shape.size()));
  for (auto s : a.shape) put<std::uint64_t>(header, s);

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(a.payload.data()), static_cast<std::streamsize>(a.payload.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ArrayData load_array(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad magic (not an EITK array)");
  }
  std::size_t pos = 4;
  const auto version = take<std::uint32_t>(bytes, pos, path);
  if (version != kArrayVersion) {
    throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
  }
  ArrayData a;
  const auto code = take<std::uint8_t>(bytes, pos, path);
  if (code < 1 || code > 4) throw FormatError(path.string() + ": unknown dtype code " + std::to_string(code));
  a.dtype = static_cast<DType>(code);
  const auto ndim = take<std::uint8_t>(bytes, pos, path);
  for (int i = 0; i < ndim; ++i) a.shape.push_back(take<std::uint64_t>(bytes, pos, path));
  const std::size_t need = a.element_count() * dtype_size(a.dtype);
  if (bytes.size() - pos != need) {
    throw FormatError(path.string() + ": payload is " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                      std::to_string(need));
  }
  a.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return a;
}

void save_real(const std::filesystem::path& path, const RealGrid& grid) {
  ArrayData a;
  a.dtype = DType::F64;
  a.shape = {static_cast<std::uint64_t>(grid.rows()), static_cast<std::uint64_t>(grid.cols())};
  a.payload.resize(grid.size() * sizeof(double));
  std::memcpy(a.payload.data(), grid.data(), a.payload.size());
  save_array(path, a);
}

RealGrid load_real(const std::filesystem::path& path) {
  const ArrayData a = load_array(path);
  if (a.shape.size() != 2) throw FormatError(path.string() + ": expected a 2-d array");
  RealGrid g(static_cast<Eigen::Index>(a.shape[0]), static_cast<Eigen::Index>(a.shape[1]));
  if (a.dtype == DType::F64) {
    std::memcpy(g.data(), a.payload.data(), a.payload.size());
  } else if (a.dtype == DType::F32) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      float f;
      std::memcpy(&f, a.payload.data() + 4 * i, 4);
      g.data()[i] = f;
    }
  } else {
    throw FormatError(path.string() + ": expected a real dtype");
  }
  return g;
}

void save_vector(const std::filesystem::path& path, std::span<const double> values, std::vector<std::uint64_t> shape) {
  ArrayData a;
  a.dtype = DType::F64;
  a.shape = shape.empty() ? std::vector<std::uint64_t>{values.size()} : std::move(shape);
  a.payload.resize(values.size() * sizeof(double));
  if (!values.empty()) std::memcpy(a.payload.data(), values.data(), a.payload.size());
  save_array(path, a);
}

std::vector<double> load_vector(const std::filesystem::path& path, std::vector<std::uint64_t>* shape) {
  const ArrayData a = load_array(path);
  if (a.dtype != DType::F64) throw FormatError(path.string() + ": expected f64");
  std::vector<double> v(a.element_count());
  if (!v.empty()) std::memcpy(v.data(), a.payload.data(), a.payload.size());
  if (shape) *shape = a.shape;
  return v;
}

void save_complex(const std::filesystem::path& path, const Eigen::MatrixXcd& m) {
  ArrayData a;
  a.dtype = DType::C128;
  a.shape = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  a.payload.resize(m.size() * sizeof(Complex));
  auto* out = reinterpret_cast<Complex*>(a.payload.data());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r * m.cols() + c] = m(r, c);
  }
  save_array(path, a);
}

Eigen::MatrixXcd load_complex(const std::filesystem::path& path) {
  const ArrayData a = load_array(path);
  if (a.dtype != DType::C128 || a.shape.size() != 2) throw FormatError(path.string() + ": expected a 2-d c128 array");
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(a.shape[0]), static_cast<Eigen::Index>(a.shape[1]));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::memcpy(&m(r, c), a.payload.data() + sizeof(Complex) * (r * m.cols() + c), sizeof(Complex));
    }
  }
  return m;
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace eit
