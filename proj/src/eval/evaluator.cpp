#include "recsql/eval/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <sstream>
#include <tuple>

#include "recsql/errors.hpp"
#include "recsql/schema.hpp"

namespace recsql::eval {

using sql::Condition;
using sql::Rhs;
using sql::SqlAst;

std::string_view to_string(Hardness h) {
  switch (h) {
    case Hardness::easy: return "easy";
    case Hardness::medium: return "medium";
    case Hardness::hard: return "hard";
    case Hardness::extra: return "extra";
  }
  return "";
}

std::optional<Hardness> parse_hardness(std::string_view name) {
  for (Hardness h : kHardness)
    if (iequals(name, to_string(h))) return h;
  if (iequals(name, "extra hard") || iequals(name, "extra_hard") || iequals(name, "extrahard")) {
    return Hardness::extra;
  }
  return std::nullopt;
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::select: return "SELECT";
    case Component::where: return "WHERE";
    case Component::group_by: return "GROUP BY";
    case Component::order_by: return "ORDER BY";
    case Component::keywords: return "KEYWORDS";
  }
  return "";
}

namespace {

void check_columns(const SqlAst& ast) {
  auto check = [](int c) {
    if (c < 0) throw DataError("unresolved column in query");
  };
  for (const auto& s : ast.select) check(s.column);
  for (const auto& c : ast.where) check(c.column);
  for (int c : ast.group_by) check(c);
  for (const auto& c : ast.having) check(c.column);
  for (const auto& o : ast.order_by) check(o.column);
}

bool rhs_match(const Rhs& a, const Rhs& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Rhs::Kind::query) return exact_match(*a.query, *b.query);
  return true;
}

bool condition_match(const Condition& a, const Condition& b) {
  return a.agg == b.agg && a.column == b.column && a.cmp == b.cmp && rhs_match(a.rhs, b.rhs);
}

/// Multiset equality under an equivalence relation.
template <typename T, typename Eq>
bool same_multiset(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && eq(x, b[j])) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// Component items flattened to comparable tuples: (tag, agg, column, op, rhs kind).
using Item = std::tuple<int, int, int, int, int>;

Item condition_item(int tag, const Condition& c) {
  return {tag, static_cast<int>(c.agg), c.column, static_cast<int>(c.cmp),
          static_cast<int>(c.rhs.kind == Rhs::Kind::value ? 0 : 1)};
}

std::vector<Item> items(const SqlAst& ast, Component component) {
  std::vector<Item> out;
  switch (component) {
    case Component::select:
      for (const auto& s : ast.select) out.push_back({0, static_cast<int>(s.agg), s.column, 0, 0});
      break;
    case Component::where:
      for (const auto& c : ast.where) out.push_back(condition_item(0, c));
      if (ast.where.size() >= 2 && ast.where_connective == sql::Connective::or_) {
        out.push_back({1, 0, 0, 0, 0});
      }
      break;
    case Component::group_by:
      for (int c : ast.group_by) out.push_back({0, 0, c, 0, 0});
      for (const auto& c : ast.having) out.push_back(condition_item(1, c));
      break;
    case Component::order_by:
      for (const auto& o : ast.order_by) {
        out.push_back({0, static_cast<int>(o.agg), o.column, static_cast<int>(o.dir), 0});
      }
      if (ast.limit) out.push_back({1, 0, 0, 0, 0});
      break;
    case Component::keywords:
      if (!ast.where.empty()) out.push_back({0, 0, 0, 0, 0});
      if (!ast.group_by.empty()) out.push_back({1, 0, 0, 0, 0});
      if (!ast.having.empty()) out.push_back({2, 0, 0, 0, 0});
      if (!ast.order_by.empty()) out.push_back({3, 0, 0, 0, 0});
      if (ast.limit) out.push_back({4, 0, 0, 0, 0});
      if (ast.set_op != sql::SetOp::none) out.push_back({5, static_cast<int>(ast.set_op), 0, 0, 0});
      break;
  }
  return out;
}

std::size_t overlap(std::vector<Item> a, std::vector<Item> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<Item> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return common.size();
}

int aggregator_count(const SqlAst& ast) {
  int n = 0;
  auto add = [&](sql::Aggregator a) { n += a != sql::Aggregator::none ? 1 : 0; };
  for (const auto& s : ast.select) add(s.agg);
  for (const auto& c : ast.where) add(c.agg);
  for (const auto& c : ast.having) add(c.agg);
  for (const auto& o : ast.order_by) add(o.agg);
  return n;
}

}  // namespace

bool exact_match(const SqlAst& pred, const SqlAst& gold) {
  check_columns(pred);
  check_columns(gold);
  auto select_eq = [](const sql::SelectItem& a, const sql::SelectItem& b) { return a == b; };
  if (!same_multiset(pred.select, gold.select, select_eq)) return false;
  if (!same_multiset(pred.where, gold.where, condition_match)) return false;
  if (pred.where.size() >= 2 && pred.where_connective != gold.where_connective) return false;
  if (pred.group_by != gold.group_by) return false;
  if (!same_multiset(pred.having, gold.having, condition_match)) return false;
  if (pred.order_by != gold.order_by || pred.limit != gold.limit) return false;
  if (pred.set_op != gold.set_op) return false;
  if (pred.set_op != sql::SetOp::none && !rhs_match(pred.set_rhs, gold.set_rhs)) return false;
  auto tables = [](const SqlAst& a) {
    std::vector<int> t = a.from.tables;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
  };
  return tables(pred) == tables(gold);
}

std::optional<double> component_f1(const SqlAst& pred, const SqlAst& gold, Component component) {
  const auto p = items(pred, component);
  const auto g = items(gold, component);
  if (p.empty() && g.empty()) return std::nullopt;
  if (p.empty() || g.empty()) return 0.0;
  const double common = static_cast<double>(overlap(p, g));
  if (common == 0.0) return 0.0;
  const double precision = common / static_cast<double>(p.size());
  const double recall = common / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

std::array<double, 5> component_f1(const std::vector<PairRef>& pairs) {
  std::array<double, 5> out{};
  for (std::size_t k = 0; k < kComponents.size(); ++k) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& pair : pairs) {
      if (const auto f = component_f1(*pair.pred, *pair.gold, kComponents[k])) {
        sum += *f;
        ++n;
      }
    }
    out[k] = n == 0 ? 1.0 : sum / static_cast<double>(n);
  }
  return out;
}

HardnessCounts hardness_counts(const SqlAst& gold, const HardnessConfig& config) {
  HardnessCounts h;
  if (!gold.where.empty()) ++h.component1;
  if (!gold.group_by.empty()) ++h.component1;
  if (config.having_is_component && !gold.having.empty()) ++h.component1;
  if (!gold.order_by.empty()) ++h.component1;
  if (gold.limit) ++h.component1;
  if (gold.from.tables.size() > 1) h.component1 += static_cast<int>(gold.from.tables.size()) - 1;
  if (gold.where.size() >= 2 && gold.where_connective == sql::Connective::or_) {
    h.component1 += static_cast<int>(gold.where.size()) - 1;
  }
  for (const auto& c : gold.where) h.component1 += c.cmp == sql::Comparison::like ? 1 : 0;
  for (const auto& c : gold.having) h.component1 += c.cmp == sql::Comparison::like ? 1 : 0;

  h.component2 = static_cast<int>(sql::nested_count(gold));

  if (aggregator_count(gold) >= config.agg_threshold && aggregator_count(gold) > 0) ++h.others;
  if (gold.select.size() > 1) ++h.others;
  if (gold.where.size() > 1) ++h.others;
  if (gold.group_by.size() > 1) ++h.others;
  return h;
}

Hardness hardness(const SqlAst& gold, const HardnessConfig& config) {
  const auto h = hardness_counts(gold, config);
  const int c1 = h.component1;
  const int c2 = h.component2;
  const int o = h.others;
  if (c1 <= 1 && o == 0 && c2 == 0) return Hardness::easy;
  if ((o <= 2 && c1 <= 1 && c2 == 0) || (c1 <= 2 && o < 2 && c2 == 0)) return Hardness::medium;
  if ((o > 2 && c1 <= 2 && c2 == 0) || (c1 > 2 && c1 <= 3 && o <= 2 && c2 == 0) ||
      (c1 <= 1 && o == 0 && c2 <= 1)) {
    return Hardness::hard;
  }
  return Hardness::extra;
}

EvalReport evaluate(const std::vector<EvalItem>& items, const HardnessConfig& config) {
  if (items.empty()) throw ParameterError("evaluate: no items");
  const auto n = static_cast<long>(items.size());
  std::vector<char> match(items.size(), 0);
  std::vector<int> bucket(items.size(), 0);
  std::vector<std::exception_ptr> failure(items.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      match[k] = exact_match(items[k].pred, items[k].gold) ? 1 : 0;
      bucket[k] = static_cast<int>(items[k].label ? *items[k].label : hardness(items[k].gold, config));
    } catch (...) {
      failure[k] = std::current_exception();
    }
  }
  for (const auto& f : failure)
    if (f) std::rethrow_exception(f);

  EvalReport r;
  r.total = items.size();
  std::vector<PairRef> pairs;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto b = static_cast<std::size_t>(bucket[i]);
    ++r.count[b];
    r.matches.push_back(match[i] != 0);
    if (match[i]) {
      ++r.correct;
      ++r.correct_by_hardness[b];
    }
    pairs.push_back({&items[i].pred, &items[i].gold});
  }
  r.exact_all = static_cast<double>(r.correct) / static_cast<double>(r.total);
  for (std::size_t b = 0; b < 4; ++b) {
    r.exact_by_hardness[b] =
        r.count[b] ? static_cast<double>(r.correct_by_hardness[b]) / static_cast<double>(r.count[b])
                   : 0.0;
  }
  r.component_f1 = component_f1(pairs);
  return r;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %8s %8s %8s %8s %8s\n", "", "easy", "medium", "hard",
                "extra", "all");
  os << line;
  std::snprintf(line, sizeof line, "%-14s %8zu %8zu %8zu %8zu %8zu\n", "count", r.count[0],
                r.count[1], r.count[2], r.count[3], r.total);
  os << line;
  os << "exact match   ";
  for (std::size_t b = 0; b < 4; ++b) {
    if (r.count[b]) {
      std::snprintf(line, sizeof line, " %8.3f", r.exact_by_hardness[b]);
    } else {
      std::snprintf(line, sizeof line, " %8s", "-");
    }
    os << line;
  }
  std::snprintf(line, sizeof line, " %8.3f\n\n", r.exact_all);
  os << line;
  os << "component F1\n";
  for (std::size_t k = 0; k < kComponents.size(); ++k) {
    std::snprintf(line, sizeof line, "  %-12s %8.3f\n", std::string(to_string(kComponents[k])).c_str(),
                  r.component_f1[k]);
    os << line;
  }
  return os.str();
}

std::string format_key_values(const EvalReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << "total=" << r.total << "\n";
  os << "exact.all=" << r.exact_all << "\n";
  for (std::size_t b = 0; b < 4; ++b) {
    const std::string name(to_string(kHardness[b]));
    os << "count." << name << "=" << r.count[b] << "\n";
    os << "exact." << name << "=" << r.exact_by_hardness[b] << "\n";
  }
  for (std::size_t k = 0; k < kComponents.size(); ++k) {
    std::string name(to_string(kComponents[k]));
    std::replace(name.begin(), name.end(), ' ', '_');
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    os << "f1." << name << "=" << r.component_f1[k] << "\n";
  }
  return os.str();
}

}  // namespace recsql::eval
