#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "recsql/core/param_store.hpp"

// Little-endian binary encoding shared by model files.

namespace recsql::core::binary {

void write_u32(std::ostream& out, std::uint32_t value);
void write_u64(std::ostream& out, std::uint64_t value);
void write_i64(std::ostream& out, std::int64_t value);
void write_f64(std::ostream& out, double value);
/// u64 length followed by raw bytes.
void write_string(std::ostream& out, const std::string& value);

std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
std::int64_t read_i64(std::istream& in);
double read_f64(std::istream& in);
std::string read_string(std::istream& in);

/// u64 record count, then per parameter: name, rows (u64), cols (u64),
/// rows * cols row-major f64 values. Optimizer state is not written.
void write_params(std::ostream& out, const ParamStore& store);
ParamStore read_params(std::istream& in);

}  // namespace recsql::core::binary
