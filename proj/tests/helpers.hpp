#pragma once

#include <string>

#include "recsql/core/param_store.hpp"
#include "recsql/decoders/clause_decoders.hpp"
#include "recsql/encoders/encoders.hpp"
#include "recsql/pipeline/dataset.hpp"
#include "recsql/schema.hpp"
#include "recsql/sketch/sketch.hpp"

namespace testing_support {

inline std::string source_path(const std::string& relative) {
  return std::string(RECSQL_SOURCE_DIR) + "/" + relative;
}

inline std::map<std::string, recsql::Schema> appendix_schemas() {
  return recsql::pipeline::load_tables(source_path("data/appendix_a/tables.json"));
}

/// Every learned parameter for a shared-encoder model.
inline recsql::core::ParamStore make_store(std::size_t d, std::size_t vocab, std::uint64_t seed) {
  recsql::core::Rng rng(seed);
  recsql::core::ParamStore store;
  recsql::encoders::init_embeddings(store, d, vocab, rng);
  recsql::encoders::init_encoder_scope(store, recsql::encoders::EncoderScope::shared(), d, rng);
  recsql::sketch::init_sketch_params(store, d, {}, rng);
  recsql::decoders::init_decoder_params(store, d, rng);
  return store;
}

/// student(student_id, name, age), course(course_id, title, student_id).
inline recsql::Schema school_schema() {
  using recsql::ColumnType;
  return recsql::make_schema("school", {"student", "course"},
                             {{0, "student_id", ColumnType::number},
                              {0, "name", ColumnType::text},
                              {0, "age", ColumnType::number},
                              {1, "course_id", ColumnType::number},
                              {1, "title", ColumnType::text},
                              {1, "student_id", ColumnType::number}},
                             {{5, 0}});  // indices before "*" is prepended
}

}  // namespace testing_support
