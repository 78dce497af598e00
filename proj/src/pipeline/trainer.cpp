#include "recsql/pipeline/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <set>

#include "recsql/core/ops.hpp"
#include "recsql/core/optim.hpp"
#include "recsql/errors.hpp"
#include "recsql/eval/evaluator.hpp"
#include "recsql/log.hpp"
#include "recsql/sketch/sketch.hpp"

namespace recsql::pipeline {

using decoders::ClauseId;

namespace {

void add_instances(std::vector<TrainingInstance>& out, const std::vector<std::string>& words,
                   const sql::SqlAst& ast, const Schema& schema, const ModelBundle& bundle,
                   int depth, bool nested) {
  TrainingInstance inst;
  inst.ids = bundle.vocab.ids(words);
  if (inst.ids.empty()) inst.ids.push_back(encoders::Vocabulary::kPad);
  inst.schema = &schema;
  inst.gold = sql::extract_gold(ast, bundle.config.limits);
  inst.nested = nested;
  out.push_back(std::move(inst));
  if (!bundle.config.modules.sub || depth <= 0) return;
  for (const auto& nt : sql::nested_targets(ast)) {
    const auto input = sql::subquery_input(words, nt.context, schema);
    add_instances(out, input, nt.target, schema, bundle, depth - 1, true);
  }
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  Dataset out;
  out.schemas = dataset.schemas;
  for (auto i : indices) out.examples.push_back(dataset.examples[i]);
  return out;
}

}  // namespace

std::vector<TrainingInstance> make_instances(const Example& example, const Schema& schema,
                                             const ModelBundle& bundle) {
  std::vector<TrainingInstance> out;
  add_instances(out, example.words, example.ast, schema, bundle, bundle.config.depth, false);
  return out;
}

core::Var instance_loss(core::Tape& t, const ModelBundle& bundle, const TrainingInstance& inst,
                        const encoders::DropoutSpec& dropout) {
  const auto& config = bundle.config;
  const auto& modules = config.modules;
  std::map<std::string, encoders::QuestionEncoding> questions;
  std::map<std::string, encoders::SchemaEncoding> schemas;
  auto question = [&](const encoders::EncoderScope& scope) -> const encoders::QuestionEncoding& {
    auto it = questions.find(scope.question);
    if (it == questions.end()) {
      it = questions.emplace(scope.question, encoders::encode_question(t, inst.ids, scope, dropout)).first;
    }
    return it->second;
  };
  auto schema = [&](const encoders::EncoderScope& scope) -> const encoders::SchemaEncoding& {
    auto it = schemas.find(scope.column);
    if (it == schemas.end()) {
      it = schemas
               .emplace(scope.column, encoders::encode_schema(t, *inst.schema, bundle.vocab, scope,
                                                              config.type_token))
               .first;
    }
    return it->second;
  };

  std::vector<core::Var> parts;
  if (modules.sketch) {
    parts.push_back(sketch::sketch_loss(
        t,
        [&](sketch::HeadId head) -> const encoders::QuestionEncoding& {
          return question(scope_for(config, head));
        },
        inst.gold.sketch));
  }
  const decoders::LossTerms terms{modules.col, modules.op, modules.sub};
  if (terms.columns || terms.operators || terms.subquery_flags) {
    for (ClauseId clause : decoders::kClauses) {
      const auto& gold = inst.gold.clauses[static_cast<std::size_t>(clause)];
      if (gold.size() == 0) continue;
      const auto scope = scope_for(config, clause);
      parts.push_back(decoders::decoder_loss(t, question(scope), schema(scope), gold, terms));
    }
  }
  if (parts.empty()) return t.constant(core::Matrix(1, 1));
  return core::ops::sum(t, parts);
}

Split split_by_schema(const Dataset& dataset, double holdout, std::uint64_t seed) {
  Split split;
  std::vector<std::string> ids;
  for (const auto& ex : dataset.examples) {
    if (std::find(ids.begin(), ids.end(), ex.db_id) == ids.end()) ids.push_back(ex.db_id);
  }
  std::set<std::string> held;
  if (holdout > 0.0 && ids.size() >= 2) {
    core::Rng rng(seed ^ 0x5eedull);
    std::shuffle(ids.begin(), ids.end(), rng);
    auto n = static_cast<std::size_t>(std::llround(holdout * static_cast<double>(ids.size())));
    n = std::clamp<std::size_t>(n, 1, ids.size() - 1);
    held.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n));
  }
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    (held.count(dataset.examples[i].db_id) ? split.valid : split.train).push_back(i);
  }
  if (split.valid.empty()) split.valid = split.train;
  return split;
}

double exact_match_rate(const Predictor& predictor, const Dataset& dataset,
                        const std::vector<std::size_t>& indices, std::vector<bool>* matches) {
  if (indices.empty()) return 0.0;
  const auto n = static_cast<long>(indices.size());
  std::vector<char> ok(indices.size(), 0);
  std::vector<std::exception_ptr> failure(indices.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      const auto& ex = dataset.examples[indices[i]];
      const auto& schema = dataset.schema(ex.db_id);
      ok[i] = eval::exact_match(predictor.predict_ast(ex.words, schema), ex.ast) ? 1 : 0;
    } catch (...) {
      failure[i] = std::current_exception();
    }
  }
  for (const auto& f : failure)
    if (f) std::rethrow_exception(f);
  if (matches) matches->assign(ok.begin(), ok.end());
  const auto hits = static_cast<double>(std::count(ok.begin(), ok.end(), 1));
  return hits / static_cast<double>(indices.size());
}

std::vector<sql::SqlAst> predict_all(const Predictor& predictor, const Dataset& dataset) {
  const auto n = static_cast<long>(dataset.examples.size());
  std::vector<sql::SqlAst> out(dataset.examples.size());
  std::vector<std::exception_ptr> failure(out.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const auto& ex = dataset.examples[i];
    try {
      out[i] = predictor.predict_ast(ex.words, dataset.schema(ex.db_id));
    } catch (const AssemblyError& e) {
      log::warn("no query for \"", ex.question, "\": ", e.what());
    } catch (...) {
      failure[i] = std::current_exception();
    }
  }
  for (const auto& f : failure)
    if (f) std::rethrow_exception(f);
  return out;
}

eval::EvalReport evaluate_model(const Predictor& predictor, const Dataset& dataset) {
  auto preds = predict_all(predictor, dataset);
  std::vector<eval::EvalItem> items;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    items.push_back({std::move(preds[i]), dataset.examples[i].ast, std::nullopt});
  }
  return eval::evaluate(items);
}

TrainResult train(const Dataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch) {
  validate(config);
  if (dataset.examples.empty()) throw ParameterError("train: dataset has no examples");
  const Split split = split_by_schema(dataset, config.holdout, config.seed);

  TrainResult result;
  {
    const Dataset training = subset(dataset, split.train);
    result.bundle = make_bundle(config.model, build_vocabulary(training, config.model),
                                dataset.schemas, config.seed);
  }
  ModelBundle& bundle = result.bundle;
  const auto& modules = bundle.config.modules;

  std::vector<TrainingInstance> instances;
  for (auto i : split.train) {
    const auto& ex = dataset.examples[i];
    auto more = make_instances(ex, bundle.schemas.at(ex.db_id), bundle);
    for (auto& inst : more) instances.push_back(std::move(inst));
  }
  log::info("training on ", split.train.size(), " examples (", instances.size(),
            " instances), validating on ", split.valid.size());

  core::Rng rng(config.seed);
  const core::ParamFilter selected = [&](const std::string& name) { return modules.selects(name); };
  Predictor predictor(bundle);
  core::ParamStore best = bundle.params;
  result.best_valid = -1.0;
  int since_best = 0;

  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      core::Gradients batch;
      for (std::size_t k = start; k < end; ++k) {
        core::Tape t(&bundle.params);
        const encoders::DropoutSpec dropout{config.dropout, &rng, config.dropout > 0.0};
        const core::Var loss = instance_loss(t, bundle, instances[order[k]], dropout);
        const double value = t.scalar(loss);
        if (!std::isfinite(value)) {
          throw NumericError("loss is not finite at epoch " + std::to_string(epoch) +
                             ", instance " + std::to_string(order[k]));
        }
        total += value;
        t.backward(loss);
        for (auto& [name, g] : t.parameter_gradients()) {
          auto it = batch.find(name);
          if (it == batch.end()) {
            batch.emplace(name, std::move(g));
          } else {
            auto dst = it->second.values();
            const auto src = g.values();
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
          }
        }
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      if (scale != 1.0) {
        for (auto& [name, g] : batch)
          for (double& x : g.values()) x *= scale;
      }
      const double norm = core::clip_global_norm(batch, config.clip);
      if (!std::isfinite(norm)) {
        throw NumericError("gradient is not finite at epoch " + std::to_string(epoch));
      }
      core::adam_step(bundle.params, batch, config.learning_rate, {}, selected);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = instances.empty() ? 0.0 : total / static_cast<double>(instances.size());
    stats.valid_exact = exact_match_rate(predictor, dataset, split.valid);
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    log::info("epoch ", epoch, " loss ", stats.mean_loss, " valid exact ", stats.valid_exact);

    if (stats.valid_exact > result.best_valid) {
      result.best_valid = stats.valid_exact;
      result.best_epoch = epoch;
      best = bundle.params;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (stats.valid_exact >= config.target || since_best >= config.patience) break;
  }
  bundle.params = std::move(best);
  return result;
}

}  // namespace recsql::pipeline
