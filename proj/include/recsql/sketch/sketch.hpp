#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "recsql/core/param_store.hpp"
#include "recsql/core/tape.hpp"
#include "recsql/encoders/encoders.hpp"
#include "recsql/sql/operators.hpp"

namespace recsql::sketch {

/// The eight classification heads that fix a query's clause structure.
enum class HeadId { select, where, group_by, having, order_by, limit, iue, connective };

inline constexpr std::array<HeadId, 8> kHeads = {HeadId::select,   HeadId::where,
                                                 HeadId::group_by, HeadId::having,
                                                 HeadId::order_by, HeadId::limit,
                                                 HeadId::iue,      HeadId::connective};

std::string_view head_name(HeadId head);

/// Upper bounds on per-clause expression counts.
struct SketchLimits {
  int max_select = 4;
  int max_where = 4;
  int max_group_by = 3;
  int max_having = 2;
  int max_order_by = 3;

  /// n_s for a head. SELECT classes are counts 1..max, the others 0..max.
  std::size_t classes(HeadId head) const;
  friend bool operator==(const SketchLimits&, const SketchLimits&) = default;
};

struct Sketch {
  int num_select = 1;
  int num_where = 0;
  int num_group_by = 0;
  int num_having = 0;
  int num_order_by = 0;
  bool has_limit = false;
  sql::SetOp iue = sql::SetOp::none;
  sql::Connective where_connective = sql::Connective::and_;

  /// Invariants: 1 <= num_select, having requires group by, counts within limits.
  bool valid(const SketchLimits& limits) const;

  std::size_t class_of(HeadId head) const;
  friend bool operator==(const Sketch&, const Sketch&) = default;
};

/// Builds a Sketch from one class index per head and repairs HAVING without
/// GROUP BY by dropping the HAVING count.
Sketch sketch_from_classes(const std::array<std::size_t, 8>& classes);

/// Registers "sketch.<head>.{w,W,b}" for all eight heads.
void init_sketch_params(core::ParamStore& store, std::size_t d, const SketchLimits& limits,
                        core::Rng& rng);

/// alpha_s = softmax(w_s^T tanh(H_Q)), r_s = H_Q alpha_s, P = softmax(W_s r_s + b_s).
core::Var head_forward(core::Tape& t, const encoders::QuestionEncoding& question, HeadId head);

/// Per-head argmax with ties going to the lower class, then repair.
Sketch predict_sketch(core::Tape& t, const encoders::QuestionEncoding& question);

/// Heads may use different question encodings (one encoder per head).
using QuestionForHead = std::function<const encoders::QuestionEncoding&(HeadId)>;
Sketch predict_sketch(core::Tape& t, const QuestionForHead& question);

/// Sum of per-head cross-entropies against `gold`. Throws DimensionError if a
/// gold class is outside the head's range.
core::Var sketch_loss(core::Tape& t, const QuestionForHead& question, const Sketch& gold);
core::Var sketch_loss(core::Tape& t, const encoders::QuestionEncoding& question,
                      const Sketch& gold);

}  // namespace recsql::sketch
