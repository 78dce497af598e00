#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "recsql/core/tape.hpp"
#include "recsql/encoders/encoders.hpp"
#include "recsql/eval/evaluator.hpp"
#include "recsql/pipeline/config.hpp"
#include "recsql/pipeline/dataset.hpp"
#include "recsql/pipeline/model.hpp"
#include "recsql/pipeline/predictor.hpp"
#include "recsql/sql/assembler.hpp"

namespace recsql::pipeline {

/// One supervised query level: the top-level question, or a nested position
/// whose input is question [SEP] partial SQL.
struct TrainingInstance {
  std::vector<int> ids;
  const Schema* schema = nullptr;
  sql::GoldLevel gold;
  bool nested = false;
};

/// Top level plus, when the sub-query module is selected, every nested
/// position down to the depth cap.
std::vector<TrainingInstance> make_instances(const Example& example, const Schema& schema,
                                             const ModelBundle& bundle);

/// Sketch loss plus the clause losses of the selected modules.
core::Var instance_loss(core::Tape& t, const ModelBundle& bundle, const TrainingInstance& instance,
                        const encoders::DropoutSpec& dropout = {});

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
};

/// Holds out whole schemas (at least one when holdout > 0 and there are at
/// least two schemas). With nothing held out, validation uses the training set.
Split split_by_schema(const Dataset& dataset, double holdout, std::uint64_t seed);

/// Exact-match rate of `predictor` on the selected examples, scored in
/// parallel. `matches` receives one flag per index when given.
double exact_match_rate(const Predictor& predictor, const Dataset& dataset,
                        const std::vector<std::size_t>& indices,
                        std::vector<bool>* matches = nullptr);

/// Predictions for every example, made in parallel. A level that cannot be
/// assembled yields an empty query, which matches nothing.
std::vector<sql::SqlAst> predict_all(const Predictor& predictor, const Dataset& dataset);

/// Predicts and scores every example; hardness comes from the gold query.
eval::EvalReport evaluate_model(const Predictor& predictor, const Dataset& dataset);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double valid_exact = 0.0;
};

struct TrainResult {
  ModelBundle bundle;
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_valid = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Adam on summed per-instance losses with global-norm clipping and early
/// stopping on validation exact match; the best epoch's parameters are
/// returned. Deterministic for a given seed. Throws NumericError when the
/// loss stops being finite.
TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace recsql::pipeline
