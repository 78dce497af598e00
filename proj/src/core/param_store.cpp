#include "recsql/core/param_store.hpp"

#include "recsql/errors.hpp"

namespace recsql::core {

Matrix& ParamStore::add(const std::string& name, Matrix value) {
  if (entries_.count(name)) throw ParameterError("duplicate parameter '" + name + "'");
  Entry e;
  e.m = Matrix(value.rows(), value.cols());
  e.v = Matrix(value.rows(), value.cols());
  e.value = std::move(value);
  return entries_.emplace(name, std::move(e)).first->second.value;
}

Matrix& ParamStore::add_uniform(const std::string& name, std::size_t rows, std::size_t cols,
                                double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (auto& x : m.storage()) x = dist(rng);
  return add(name, std::move(m));
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ParameterError("unknown parameter '" + name + "'");
  return it->second;
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ParameterError("unknown parameter '" + name + "'");
  return it->second;
}

Matrix& ParamStore::value(const std::string& name) { return entry(name).value; }
const Matrix& ParamStore::value(const std::string& name) const { return entry(name).value; }

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, _] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamStore::entry_count() const {
  std::size_t n = 0;
  for (const auto& [_, e] : entries_) n += e.value.size();
  return n;
}

void ParamStore::reset_optimizer() {
  for (auto& [_, e] : entries_) {
    e.m.fill(0.0);
    e.v.fill(0.0);
  }
  step_ = 0;
}

bool ParamStore::same_values(const ParamStore& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (const auto& [name, e] : entries_) {
    auto it = other.entries_.find(name);
    if (it == other.entries_.end() || !(it->second.value == e.value)) return false;
  }
  return true;
}

}  // namespace recsql::core
