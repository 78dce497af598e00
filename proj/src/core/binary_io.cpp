#include "recsql/core/binary_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>

#include "recsql/errors.hpp"

namespace recsql::core::binary {

namespace {

constexpr std::uint64_t kMaxString = 1ull << 32;
constexpr std::uint64_t kMaxEntries = 1ull << 34;

template <typename T>
void write_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw DataError("unexpected end of binary stream");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t value) { write_le(out, value); }
void write_u64(std::ostream& out, std::uint64_t value) { write_le(out, value); }
void write_i64(std::ostream& out, std::int64_t value) { write_le(out, value); }
void write_f64(std::ostream& out, double value) {
  write_le(out, std::bit_cast<std::uint64_t>(value));
}

void write_string(std::ostream& out, const std::string& value) {
  write_u64(out, value.size());
  out.write(value.data(), static_cast<std::streamsize>(value.size()));
}

std::uint32_t read_u32(std::istream& in) { return read_le<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_le<std::uint64_t>(in); }
std::int64_t read_i64(std::istream& in) { return read_le<std::int64_t>(in); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_le<std::uint64_t>(in)); }

std::string read_string(std::istream& in) {
  const auto n = read_u64(in);
  if (n > kMaxString) throw DataError("string length out of range");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw DataError("unexpected end of binary stream");
  }
  return s;
}

void write_params(std::ostream& out, const ParamStore& store) {
  write_u64(out, store.parameter_count());
  for (const auto& [name, e] : store.entries()) {
    write_string(out, name);
    write_u64(out, e.value.rows());
    write_u64(out, e.value.cols());
    for (double x : e.value.storage()) write_f64(out, x);
  }
}

ParamStore read_params(std::istream& in) {
  ParamStore store;
  const auto count = read_u64(in);
  for (std::uint64_t k = 0; k < count; ++k) {
    std::string name = read_string(in);
    const auto rows = read_u64(in);
    const auto cols = read_u64(in);
    if (rows * cols > kMaxEntries) throw DataError("parameter '" + name + "' is too large");
    Matrix m(rows, cols);
    for (double& x : m.storage()) x = read_f64(in);
    store.add(name, std::move(m));
  }
  return store;
}

}  // namespace recsql::core::binary
