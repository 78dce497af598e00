#include "recsql/pipeline/model.hpp"

#include <fstream>
#include <sstream>

#include "recsql/core/binary_io.hpp"
#include "recsql/errors.hpp"
#include "recsql/sql/assembler.hpp"

namespace recsql::pipeline {

namespace {

constexpr std::uint32_t kMagic = 0x4c515352;  // "RSQL"
constexpr std::uint32_t kVersion = 1;

void add_words(encoders::Vocabulary& vocab, const std::vector<std::string>& words) {
  for (const auto& w : words) vocab.add(w);
}

void add_nested_inputs(encoders::Vocabulary& vocab, const std::vector<std::string>& words,
                       const sql::SqlAst& ast, const Schema& schema, int depth) {
  if (depth <= 0) return;
  for (const auto& nt : sql::nested_targets(ast)) {
    const auto input = sql::subquery_input(words, nt.context, schema);
    add_words(vocab, input);
    add_nested_inputs(vocab, input, nt.target, schema, depth - 1);
  }
}

}  // namespace

std::vector<std::string> encoder_owners() {
  std::vector<std::string> out;
  for (auto head : sketch::kHeads) out.push_back("sketch." + std::string(sketch::head_name(head)));
  for (auto clause : decoders::kClauses) out.emplace_back(decoders::clause_name(clause));
  return out;
}

encoders::EncoderScope scope_for(const ModelConfig& config, sketch::HeadId head) {
  if (!config.separate_encoders) return encoders::EncoderScope::shared();
  return encoders::EncoderScope::owned_by("sketch." + std::string(sketch::head_name(head)));
}

encoders::EncoderScope scope_for(const ModelConfig& config, decoders::ClauseId clause) {
  if (!config.separate_encoders) return encoders::EncoderScope::shared();
  return encoders::EncoderScope::owned_by(std::string(decoders::clause_name(clause)));
}

encoders::Vocabulary build_vocabulary(const Dataset& dataset, const ModelConfig& config) {
  encoders::Vocabulary vocab;
  for (const auto& [id, schema] : dataset.schemas) {
    for (const auto& d : encoders::describe_columns(schema)) {
      add_words(vocab, d.table_name);
      add_words(vocab, d.column_name);
    }
  }
  for (const auto& ex : dataset.examples) {
    add_words(vocab, ex.words);
    if (config.modules.sub) {
      add_nested_inputs(vocab, ex.words, ex.ast, dataset.schema(ex.db_id), config.depth);
    }
  }
  return vocab;
}

void init_parameters(core::ParamStore& store, const ModelConfig& config, std::size_t vocab_size,
                     core::Rng& rng) {
  encoders::init_embeddings(store, config.d, vocab_size, rng);
  if (config.separate_encoders) {
    for (const auto& owner : encoder_owners()) {
      encoders::init_encoder_scope(store, encoders::EncoderScope::owned_by(owner), config.d, rng);
    }
  } else {
    encoders::init_encoder_scope(store, encoders::EncoderScope::shared(), config.d, rng);
  }
  sketch::init_sketch_params(store, config.d, config.limits, rng);
  decoders::init_decoder_params(store, config.d, rng);
}

ModelBundle make_bundle(const ModelConfig& config, encoders::Vocabulary vocab,
                        std::map<std::string, Schema> schemas, std::uint64_t seed) {
  ModelBundle b;
  b.config = config;
  b.vocab = std::move(vocab);
  b.schemas = std::move(schemas);
  core::Rng rng(seed);
  init_parameters(b.params, config, static_cast<std::size_t>(b.vocab.size()), rng);
  return b;
}

std::uint64_t config_hash(const ModelConfig& c, std::size_t vocab_size) {
  std::ostringstream os;
  os << "d=" << c.d << ";depth=" << c.depth << ";sep=" << c.separate_encoders
     << ";type=" << c.type_token << ";limits=" << c.limits.max_select << ','
     << c.limits.max_where << ',' << c.limits.max_group_by << ',' << c.limits.max_having << ','
     << c.limits.max_order_by << ";modules=" << c.modules.to_string() << ";vocab=" << vocab_size;
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void save_bundle(const ModelBundle& b, const std::string& path) {
  namespace bin = core::binary;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  bin::write_u32(out, kMagic);
  bin::write_u32(out, kVersion);
  const auto& c = b.config;
  bin::write_u64(out, c.d);
  bin::write_i64(out, c.depth);
  bin::write_u32(out, c.separate_encoders ? 1 : 0);
  bin::write_u32(out, c.type_token ? 1 : 0);
  for (int v : {c.limits.max_select, c.limits.max_where, c.limits.max_group_by,
                c.limits.max_having, c.limits.max_order_by}) {
    bin::write_i64(out, v);
  }
  bin::write_string(out, c.modules.to_string());
  bin::write_u64(out, static_cast<std::uint64_t>(b.vocab.size()));
  bin::write_u64(out, config_hash(c, static_cast<std::size_t>(b.vocab.size())));
  bin::write_params(out, b.params);
  for (const auto& w : b.vocab.words()) bin::write_string(out, w);
  bin::write_string(out, tables_to_json(b.schemas));
  if (!out) throw DataError("failed writing model file " + path);
}

ModelBundle load_bundle(const std::string& path) {
  namespace bin = core::binary;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file " + path);
  try {
    if (bin::read_u32(in) != kMagic) throw DataError("not a model file");
    if (const auto v = bin::read_u32(in); v != kVersion) {
      throw DataError("unsupported model version " + std::to_string(v));
    }
    ModelBundle b;
    auto& c = b.config;
    c.d = bin::read_u64(in);
    c.depth = static_cast<int>(bin::read_i64(in));
    c.separate_encoders = bin::read_u32(in) != 0;
    c.type_token = bin::read_u32(in) != 0;
    c.limits.max_select = static_cast<int>(bin::read_i64(in));
    c.limits.max_where = static_cast<int>(bin::read_i64(in));
    c.limits.max_group_by = static_cast<int>(bin::read_i64(in));
    c.limits.max_having = static_cast<int>(bin::read_i64(in));
    c.limits.max_order_by = static_cast<int>(bin::read_i64(in));
    c.modules = ModuleSelection::parse(bin::read_string(in));
    const auto vocab_size = bin::read_u64(in);
    const auto hash = bin::read_u64(in);
    if (hash != config_hash(c, vocab_size)) throw DataError("configuration hash mismatch");
    b.params = bin::read_params(in);

    std::vector<std::string> words;
    for (std::uint64_t i = 0; i < vocab_size; ++i) words.push_back(bin::read_string(in));
    for (std::size_t i = static_cast<std::size_t>(encoders::Vocabulary::kReservedCount); i < words.size(); ++i) {
      b.vocab.add(words[i]);
    }
    if (b.vocab.words() != words) throw DataError("vocabulary does not match the reserved layout");
    b.schemas = parse_tables(bin::read_string(in));

    // parameter names and shapes must be exactly what the configuration implies
    core::ParamStore expected;
    core::Rng rng(0);
    init_parameters(expected, c, vocab_size, rng);
    if (expected.parameter_count() != b.params.parameter_count()) {
      throw DataError("parameter set does not match the configuration");
    }
    for (const auto& [name, entry] : expected.entries()) {
      if (!b.params.contains(name) || !b.params.value(name).same_shape(entry.value)) {
        throw DataError("parameter '" + name + "' does not match the configuration");
      }
    }
    return b;
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  } catch (const std::exception& e) {
    throw DataError(path + ": corrupt model file (" + e.what() + ")");
  }
}

}  // namespace recsql::pipeline
