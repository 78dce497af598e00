#include "recsql/sketch/sketch.hpp"

#include <cmath>
#include <vector>

#include "recsql/core/ops.hpp"
#include "recsql/errors.hpp"

namespace recsql::sketch {

using core::Tape;
using core::Var;
namespace ops = core::ops;

std::string_view head_name(HeadId head) {
  switch (head) {
    case HeadId::select: return "select";
    case HeadId::where: return "where";
    case HeadId::group_by: return "group_by";
    case HeadId::having: return "having";
    case HeadId::order_by: return "order_by";
    case HeadId::limit: return "limit";
    case HeadId::iue: return "iue";
    case HeadId::connective: return "connective";
  }
  return "";
}

std::size_t SketchLimits::classes(HeadId head) const {
  switch (head) {
    case HeadId::select: return static_cast<std::size_t>(max_select);
    case HeadId::where: return static_cast<std::size_t>(max_where) + 1;
    case HeadId::group_by: return static_cast<std::size_t>(max_group_by) + 1;
    case HeadId::having: return static_cast<std::size_t>(max_having) + 1;
    case HeadId::order_by: return static_cast<std::size_t>(max_order_by) + 1;
    case HeadId::limit: return 2;
    case HeadId::iue: return sql::kSetOpCount;
    case HeadId::connective: return sql::kConnectiveCount;
  }
  return 2;
}

bool Sketch::valid(const SketchLimits& limits) const {
  return num_select >= 1 && num_select <= limits.max_select && num_where >= 0 &&
         num_where <= limits.max_where && num_group_by >= 0 &&
         num_group_by <= limits.max_group_by && num_having >= 0 &&
         num_having <= limits.max_having && num_order_by >= 0 &&
         num_order_by <= limits.max_order_by && (num_having == 0 || num_group_by > 0);
}

std::size_t Sketch::class_of(HeadId head) const {
  switch (head) {
    case HeadId::select: return static_cast<std::size_t>(num_select - 1);
    case HeadId::where: return static_cast<std::size_t>(num_where);
    case HeadId::group_by: return static_cast<std::size_t>(num_group_by);
    case HeadId::having: return static_cast<std::size_t>(num_having);
    case HeadId::order_by: return static_cast<std::size_t>(num_order_by);
    case HeadId::limit: return has_limit ? 1 : 0;
    case HeadId::iue: return sql::index_of(iue);
    case HeadId::connective: return sql::index_of(where_connective);
  }
  return 0;
}

Sketch sketch_from_classes(const std::array<std::size_t, 8>& classes) {
  Sketch s;
  s.num_select = static_cast<int>(classes[0]) + 1;
  s.num_where = static_cast<int>(classes[1]);
  s.num_group_by = static_cast<int>(classes[2]);
  s.num_having = static_cast<int>(classes[3]);
  s.num_order_by = static_cast<int>(classes[4]);
  s.has_limit = classes[5] == 1;
  s.iue = sql::from_index<sql::SetOp>(classes[6]);
  s.where_connective = sql::from_index<sql::Connective>(classes[7]);
  if (s.num_group_by == 0) s.num_having = 0;
  return s;
}

void init_sketch_params(core::ParamStore& store, std::size_t d, const SketchLimits& limits,
                        core::Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  for (HeadId head : kHeads) {
    const std::string prefix = "sketch." + std::string(head_name(head));
    store.add_uniform(prefix + ".w", d, 1, bound, rng);
    store.add_uniform(prefix + ".W", limits.classes(head), d, bound, rng);
    store.add(prefix + ".b", core::Matrix(limits.classes(head), 1));
  }
}

Var head_forward(Tape& t, const encoders::QuestionEncoding& question, HeadId head) {
  const std::string prefix = "sketch." + std::string(head_name(head));
  Var w = t.param(prefix + ".w");
  Var weights = t.param(prefix + ".W");
  Var bias = t.param(prefix + ".b");
  const auto& hq = t.value(question.states);
  if (t.value(w).rows() != hq.rows() || t.value(weights).cols() != hq.rows()) {
    throw DimensionError("sketch head '" + prefix + "' does not match the encoder width");
  }
  Var scores = ops::matvec_transposed(t, ops::tanh(t, question.states), w);
  Var alpha = ops::softmax(t, scores);
  Var summary = ops::matvec(t, question.states, alpha);
  return ops::softmax(t, ops::add(t, ops::matvec(t, weights, summary), bias));
}

Sketch predict_sketch(Tape& t, const QuestionForHead& question) {
  std::array<std::size_t, 8> classes{};
  for (std::size_t i = 0; i < kHeads.size(); ++i) {
    Var p = head_forward(t, question(kHeads[i]), kHeads[i]);
    classes[i] = core::argmax(t.value(p).values());
  }
  return sketch_from_classes(classes);
}

Sketch predict_sketch(Tape& t, const encoders::QuestionEncoding& question) {
  return predict_sketch(t, [&](HeadId) -> const encoders::QuestionEncoding& { return question; });
}

Var sketch_loss(Tape& t, const QuestionForHead& question, const Sketch& gold) {
  std::vector<Var> terms;
  for (HeadId head : kHeads) {
    Var p = head_forward(t, question(head), head);
    terms.push_back(ops::cross_entropy(t, p, gold.class_of(head)));
  }
  return ops::sum(t, terms);
}

Var sketch_loss(Tape& t, const encoders::QuestionEncoding& question, const Sketch& gold) {
  return sketch_loss(t, [&](HeadId) -> const encoders::QuestionEncoding& { return question; },
                     gold);
}

}  // namespace recsql::sketch
