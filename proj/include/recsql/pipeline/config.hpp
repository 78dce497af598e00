#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "recsql/sketch/sketch.hpp"

namespace recsql::pipeline {

/// Trainable module groups. `sub` covers the WHERE/HAVING sub-query flag
/// heads; without it the model never emits nested queries or set operations.
struct ModuleSelection {
  bool encoder = true;
  bool sketch = true;
  bool col = true;
  bool op = true;
  bool sub = true;

  /// "all" or a comma list drawn from encoder, sketch, col, op, sub.
  static ModuleSelection parse(std::string_view list);
  std::string to_string() const;
  /// Whether the parameter named `name` belongs to a selected group.
  bool selects(const std::string& name) const;
  friend bool operator==(const ModuleSelection&, const ModuleSelection&) = default;
};

/// Group of a parameter name: "encoder", "sketch", "col", "op" or "sub".
std::string module_of(const std::string& name);

struct ModelConfig {
  std::size_t d = 64;
  int depth = 2;  // recursion cap for sub-queries
  bool separate_encoders = false;
  bool type_token = true;
  sketch::SketchLimits limits;
  ModuleSelection modules;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  double dropout = 0.2;
  int max_epochs = 50;
  int patience = 50;  // epochs without validation improvement before stopping
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  double holdout = 0.2;  // fraction of schemas held out for early stopping
  double clip = 5.0;
  double target = 1.0;  // stop once validation exact match reaches this
  ModelConfig model;
};

using KeyValues = std::map<std::string, std::string>;

/// Flat "key = value" lines; '#' starts a comment. Throws ParameterError on a
/// line without '='.
KeyValues parse_key_values(std::string_view text);
/// Throws DataError if the file cannot be read.
KeyValues read_key_values(const std::string& path);

/// Applies recognised keys; throws ParameterError on unknown keys or bad values.
void apply_settings(TrainConfig& config, const KeyValues& values);
/// Checks ranges (d even, rates in range, counts positive).
void validate(const TrainConfig& config);

}  // namespace recsql::pipeline
