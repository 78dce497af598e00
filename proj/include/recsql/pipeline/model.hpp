#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "recsql/core/param_store.hpp"
#include "recsql/decoders/clause_decoders.hpp"
#include "recsql/encoders/encoders.hpp"
#include "recsql/encoders/vocabulary.hpp"
#include "recsql/pipeline/config.hpp"
#include "recsql/pipeline/dataset.hpp"
#include "recsql/schema.hpp"
#include "recsql/sketch/sketch.hpp"

namespace recsql::pipeline {

struct ModelBundle {
  ModelConfig config;
  encoders::Vocabulary vocab;
  core::ParamStore params;
  std::map<std::string, Schema> schemas;
};

/// Encoder owners when every head has its own encoders: one per sketch head
/// ("sketch.<head>") and one per clause ("<clause>").
std::vector<std::string> encoder_owners();
encoders::EncoderScope scope_for(const ModelConfig& config, sketch::HeadId head);
encoders::EncoderScope scope_for(const ModelConfig& config, decoders::ClauseId clause);

/// Words of questions, schema identifiers, and (up to the depth cap) the
/// question/SQL inputs of nested positions.
encoders::Vocabulary build_vocabulary(const Dataset& dataset, const ModelConfig& config);

/// Registers every parameter for `config` with fresh random values.
void init_parameters(core::ParamStore& store, const ModelConfig& config, std::size_t vocab_size,
                     core::Rng& rng);
ModelBundle make_bundle(const ModelConfig& config, encoders::Vocabulary vocab,
                        std::map<std::string, Schema> schemas, std::uint64_t seed);

/// FNV-1a over the configuration and vocabulary size.
std::uint64_t config_hash(const ModelConfig& config, std::size_t vocab_size);

void save_bundle(const ModelBundle& bundle, const std::string& path);
/// Throws DataError on a malformed file, a hash mismatch, or parameters that
/// do not match the stored configuration.
ModelBundle load_bundle(const std::string& path);

}  // namespace recsql::pipeline
