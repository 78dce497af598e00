#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "recsql/errors.hpp"
#include "recsql/eval/evaluator.hpp"
#include "recsql/log.hpp"
#include "recsql/pipeline/config.hpp"
#include "recsql/pipeline/dataset.hpp"
#include "recsql/pipeline/gradcheck.hpp"
#include "recsql/pipeline/model.hpp"
#include "recsql/pipeline/predictor.hpp"
#include "recsql/pipeline/toy.hpp"
#include "recsql/pipeline/trainer.hpp"
#include "recsql/sql/text.hpp"

using namespace recsql;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct TrainArgs {
  std::string data, out, config;
  pipeline::KeyValues overrides;  // command-line settings, applied after the file
};

// Every configuration key is also a flag: --batch-size sets batch_size.
const std::pair<const char*, const char*> kConfigKeys[] = {
    {"lr", "Adam learning rate"},
    {"dropout", "Dropout rate on question embeddings"},
    {"epochs", "Maximum epochs"},
    {"patience", "Epochs without validation gain before stopping"},
    {"batch_size", "Examples per update"},
    {"seed", "Random seed"},
    {"holdout", "Fraction of schemas held out for early stopping"},
    {"clip", "Global gradient-norm cap"},
    {"target", "Stop once validation exact match reaches this"},
    {"d", "Hidden size (even)"},
    {"depth", "Sub-query recursion cap"},
    {"separate_encoders", "One encoder pair per head (true/false)"},
    {"type_token", "Append the column type token (true/false)"},
    {"modules", "Trainable modules: all or encoder,sketch,col,op,sub"},
    {"max_select", "SELECT count limit"},
    {"max_where", "WHERE count limit"},
    {"max_group_by", "GROUP BY count limit"},
    {"max_having", "HAVING count limit"},
    {"max_order_by", "ORDER BY count limit"}};

int run_train(const TrainArgs& a) {
  pipeline::TrainConfig config;
  if (!a.config.empty()) pipeline::apply_settings(config, pipeline::read_key_values(a.config));
  pipeline::apply_settings(config, a.overrides);
  const auto dataset = pipeline::load_dataset_dir(a.data);
  if (dataset.skipped > 0) log::warn("skipped ", dataset.skipped, " unsupported examples");
  const auto result = pipeline::train(dataset, config, [](const pipeline::EpochStats& s) {
    std::printf("epoch %3d  loss %.4f  validation exact %.3f\n", s.epoch, s.mean_loss, s.valid_exact);
    std::fflush(stdout);
  });
  pipeline::save_bundle(result.bundle, a.out);
  std::cout << "best epoch " << result.best_epoch << ", validation exact match "
            << result.best_valid << "\n";
  return kOk;
}

int run_predict(const std::string& model, const std::string& db, const std::string& question) {
  const auto bundle = pipeline::load_bundle(model);
  const pipeline::Predictor predictor(bundle);
  std::cout << predictor.predict(question, db) << "\n";
  return kOk;
}

int run_evaluate(const std::string& model, const std::string& data, const std::string& fixture,
                 const std::string& report_path) {
  eval::EvalReport report;
  if (!fixture.empty()) {
    // score stored prediction/truth pairs; no model involved
    const auto schemas = pipeline::load_tables(data + "/tables.json");
    std::vector<eval::EvalItem> items;
    for (const auto& row : pipeline::load_fixture(fixture)) {
      const auto it = schemas.find(row.db_id);
      if (it == schemas.end()) throw DataError("unknown db_id '" + row.db_id + "'");
      items.push_back({sql::parse(row.pred, it->second), sql::parse(row.truth, it->second),
                       eval::parse_hardness(row.hardness)});
    }
    report = eval::evaluate(items);
  } else {
    const auto bundle = pipeline::load_bundle(model);
    const pipeline::Predictor predictor(bundle);
    const auto dataset = pipeline::load_dataset_dir(data);
    report = pipeline::evaluate_model(predictor, dataset);
  }
  std::cout << eval::format_report(report);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw DataError("cannot write " + report_path);
    out << eval::format_key_values(report);
  }
  return kOk;
}

int run_gen_toy(std::uint64_t seed, int schemas, int examples, const std::string& out) {
  const auto dataset = pipeline::generate_toy(seed, schemas, examples);
  pipeline::write_dataset_dir(dataset, out);
  std::cout << "wrote " << dataset.examples.size() << " examples over " << dataset.schemas.size()
            << " schemas to " << out << "\n";
  return kOk;
}

int run_gradcheck(const std::string& module) {
  bool ok = true;
  for (const auto& c : pipeline::run_gradcheck(module)) {
    std::printf("%-20s %s  max rel err %.3e over %zu entries\n", c.module.c_str(),
                c.passed ? "ok  " : "FAIL", c.result.max_relative_error, c.result.entries_checked);
    if (!c.passed) {
      std::printf("  worst %s[%zu]: analytic %.9e numeric %.9e\n", c.result.worst_parameter.c_str(),
                  c.result.worst_index, c.result.worst_analytic, c.result.worst_numeric);
    }
    ok = ok && c.passed;
  }
  return ok ? kOk : kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive text-to-SQL: train, predict, evaluate"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "Train a model bundle");
  tr->add_option("--data", train.data, "Dataset directory")->required();
  tr->add_option("--out", train.out, "Output model file")->required();
  tr->add_option("--config", train.config, "key = value configuration file");
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> config_flags;
  for (const auto& [key, help] : kConfigKeys) {
    std::string flag = std::string("--") + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    config_flags.emplace_back(key, tr->add_option(flag, flag_values[key], help));
  }

  std::string model, db, question;
  auto* pr = app.add_subcommand("predict", "Translate one question");
  pr->add_option("--model", model)->required();
  pr->add_option("--db", db)->required();
  pr->add_option("--question", question)->required();

  std::string data, fixture, report;
  auto* ev = app.add_subcommand("evaluate", "Exact match and component F1 on a dataset");
  auto* model_opt = ev->add_option("--model", model);
  ev->add_option("--data", data)->required();
  auto* fixture_opt = ev->add_option("--fixture", fixture, "Score stored prediction/truth pairs instead");
  model_opt->excludes(fixture_opt);
  ev->add_option("--report", report, "Write key = value metrics here");

  std::uint64_t toy_seed = 0;
  int schemas = 5, examples = 200;
  std::string out;
  auto* gt = app.add_subcommand("gen-toy", "Generate a synthetic dataset");
  gt->add_option("--seed", toy_seed)->required();
  gt->add_option("--schemas", schemas)->required();
  gt->add_option("--examples", examples)->required();
  gt->add_option("--out", out)->required();

  std::string module;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check at d = 8");
  gc->add_option("--module", module, "Module name or prefix, e.g. sketch or op.where.cmp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (quiet) log::set_threshold(log::Level::warn);

  try {
    if (*tr) {
      for (const auto& [key, opt] : config_flags)
        if (opt->count() > 0) train.overrides[key] = flag_values[key];
      return run_train(train);
    }
    if (*pr) return run_predict(model, db, question);
    if (*ev) {
      if (model.empty() && fixture.empty()) {
        std::cerr << "evaluate: one of --model or --fixture is required\n";
        return kUsage;
      }
      return run_evaluate(model, data, fixture, report);
    }
    if (*gt) return run_gen_toy(toy_seed, schemas, examples, out);
    if (*gc) return run_gradcheck(module);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
