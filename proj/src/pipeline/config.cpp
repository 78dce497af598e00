#include "recsql/pipeline/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "recsql/errors.hpp"

namespace recsql::pipeline {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParameterError("config: bad value '" + text + "' for " + key);
  }
  return value;
}

template <>
double number<double>(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ParameterError("config: bad value '" + text + "' for " + key);
  }
  return value;
}

bool boolean(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ParameterError("config: bad boolean '" + text + "' for " + key);
}

}  // namespace

ModuleSelection ModuleSelection::parse(std::string_view list) {
  const std::string all = trim(list);
  if (all.empty() || all == "all") return {};
  ModuleSelection m{false, false, false, false, false};
  std::stringstream ss(all);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "encoder") m.encoder = true;
    else if (item == "sketch") m.sketch = true;
    else if (item == "col") m.col = true;
    else if (item == "op") m.op = true;
    else if (item == "sub") m.sub = true;
    else throw ParameterError("unknown module '" + item + "' (encoder, sketch, col, op, sub)");
  }
  return m;
}

std::string ModuleSelection::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(encoder, "encoder");
  add(sketch, "sketch");
  add(col, "col");
  add(op, "op");
  add(sub, "sub");
  return out;
}

std::string module_of(const std::string& name) {
  if (name == "emb" || name.rfind("qenc", 0) == 0 || name.rfind("cenc", 0) == 0) return "encoder";
  if (name.rfind("sketch.", 0) == 0) return "sketch";
  if (name.rfind("col.", 0) == 0) return "col";
  if (name.rfind("op.", 0) == 0) {
    // op.<clause>.<kind>.<param>
    const auto a = name.find('.', 3);
    const auto b = a == std::string::npos ? a : name.find('.', a + 1);
    if (a != std::string::npos && b != std::string::npos && name.compare(a + 1, b - a - 1, "sub") == 0) {
      return "sub";
    }
    return "op";
  }
  throw ParameterError("parameter '" + name + "' belongs to no module");
}

bool ModuleSelection::selects(const std::string& name) const {
  const std::string m = module_of(name);
  if (m == "encoder") return encoder;
  if (m == "sketch") return sketch;
  if (m == "col") return col;
  if (m == "op") return op;
  return sub;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::stringstream ss{std::string(text)};
  std::string line;
  int number_of_line = 0;
  while (std::getline(ss, line)) {
    ++number_of_line;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(number_of_line) + ": expected key = value");
    }
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

void apply_settings(TrainConfig& c, const KeyValues& values) {
  for (const auto& [key, value] : values) {
    if (key == "learning_rate" || key == "lr") c.learning_rate = number<double>(key, value);
    else if (key == "dropout") c.dropout = number<double>(key, value);
    else if (key == "epochs" || key == "max_epochs") c.max_epochs = number<int>(key, value);
    else if (key == "patience") c.patience = number<int>(key, value);
    else if (key == "batch_size") c.batch_size = number<std::size_t>(key, value);
    else if (key == "seed") c.seed = number<std::uint64_t>(key, value);
    else if (key == "holdout") c.holdout = number<double>(key, value);
    else if (key == "clip") c.clip = number<double>(key, value);
    else if (key == "target") c.target = number<double>(key, value);
    else if (key == "d") c.model.d = number<std::size_t>(key, value);
    else if (key == "depth") c.model.depth = number<int>(key, value);
    else if (key == "separate_encoders") c.model.separate_encoders = boolean(key, value);
    else if (key == "type_token") c.model.type_token = boolean(key, value);
    else if (key == "modules") c.model.modules = ModuleSelection::parse(value);
    else if (key == "max_select") c.model.limits.max_select = number<int>(key, value);
    else if (key == "max_where") c.model.limits.max_where = number<int>(key, value);
    else if (key == "max_group_by") c.model.limits.max_group_by = number<int>(key, value);
    else if (key == "max_having") c.model.limits.max_having = number<int>(key, value);
    else if (key == "max_order_by") c.model.limits.max_order_by = number<int>(key, value);
    else throw ParameterError("config: unknown key '" + key + "'");
  }
}

void validate(const TrainConfig& c) {
  if (c.model.d == 0 || c.model.d % 2 != 0) throw ParameterError("d must be even and positive");
  if (!(c.learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ParameterError("dropout must be in [0, 1)");
  if (c.max_epochs < 1) throw ParameterError("epochs must be at least 1");
  if (c.patience < 1) throw ParameterError("patience must be at least 1");
  if (c.batch_size < 1) throw ParameterError("batch_size must be at least 1");
  if (!(c.holdout >= 0.0 && c.holdout < 1.0)) throw ParameterError("holdout must be in [0, 1)");
  if (!(c.clip > 0.0)) throw ParameterError("clip must be positive");
  if (c.model.depth < 0) throw ParameterError("depth must be non-negative");
  const auto& l = c.model.limits;
  if (l.max_select < 1 || l.max_where < 0 || l.max_group_by < 0 || l.max_having < 0 ||
      l.max_order_by < 0) {
    throw ParameterError("sketch limits out of range");
  }
}

}  // namespace recsql::pipeline
