#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "recsql/core/matrix.hpp"

namespace recsql::core {

using Rng = std::mt19937_64;
using Gradients = std::map<std::string, Matrix>;

/// Named trainable parameters plus their Adam moment estimates.
class ParamStore {
 public:
  struct Entry {
    Matrix value;
    Matrix m;  // first moment
    Matrix v;  // second moment
  };

  /// Throws ParameterError if `name` already exists.
  Matrix& add(const std::string& name, Matrix value);
  /// Uniform in [-bound, bound].
  Matrix& add_uniform(const std::string& name, std::size_t rows, std::size_t cols, double bound,
                      Rng& rng);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  Matrix& value(const std::string& name);
  const Matrix& value(const std::string& name) const;
  Entry& entry(const std::string& name);
  const Entry& entry(const std::string& name) const;

  std::vector<std::string> names() const;
  std::size_t parameter_count() const { return entries_.size(); }
  std::size_t entry_count() const;

  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::map<std::string, Entry>& entries() { return entries_; }

  std::int64_t step() const noexcept { return step_; }
  void advance_step() noexcept { ++step_; }
  void reset_optimizer();

  /// True when names, shapes and values agree exactly (moments ignored).
  bool same_values(const ParamStore& other) const;

 private:
  std::map<std::string, Entry> entries_;
  std::int64_t step_ = 0;
};

}  // namespace recsql::core
