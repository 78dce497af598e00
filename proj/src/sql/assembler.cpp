#include "recsql/sql/assembler.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "recsql/encoders/vocabulary.hpp"
#include "recsql/errors.hpp"
#include "recsql/log.hpp"
#include "recsql/sql/text.hpp"

namespace recsql::sql {

using decoders::ClauseId;
using decoders::ClausePrediction;

namespace {

std::size_t slot(ClauseId clause) { return static_cast<std::size_t>(clause); }

Rhs rhs_for(SubqueryFlag flag) {
  return flag == SubqueryFlag::subquery ? Rhs::placeholder() : Rhs::value();
}

SubqueryFlag flag_for(const Rhs& rhs) {
  return rhs.kind == Rhs::Kind::value ? SubqueryFlag::value : SubqueryFlag::subquery;
}

int owner(const Schema& schema, int column) {
  return schema.columns[static_cast<std::size_t>(column)].table;
}

}  // namespace

ClausePredictions empty_predictions() {
  ClausePredictions p;
  for (ClauseId c : decoders::kClauses) p[slot(c)].clause = c;
  return p;
}

SqlAst assemble(const sketch::Sketch& sketch, const ClausePredictions& predictions,
                const Schema& schema) {
  for (ClauseId c : decoders::kClauses) {
    const auto& p = predictions[slot(c)];
    if (!p.consistent()) {
      throw AssemblyError("inconsistent operator lists for " +
                          std::string(decoders::clause_name(c)));
    }
    const int expected = decoders::steps_for(sketch, c);
    if (static_cast<int>(p.size()) != expected) {
      throw AssemblyError(std::string(decoders::clause_name(c)) + " has " +
                          std::to_string(p.size()) + " columns, sketch says " +
                          std::to_string(expected));
    }
    for (int col : p.columns) {
      if (col < 0 || col >= schema.column_count()) {
        throw AssemblyError("predicted column " + std::to_string(col) + " outside the schema");
      }
    }
  }
  if (sketch.num_select < 1) throw AssemblyError("sketch has no SELECT column");
  if (sketch.num_having > 0 && sketch.num_group_by == 0) {
    throw AssemblyError("sketch has HAVING without GROUP BY");
  }

  SqlAst ast;
  const auto& sel = predictions[slot(ClauseId::select)];
  for (std::size_t i = 0; i < sel.size(); ++i) ast.select.push_back({sel.aggregators[i], sel.columns[i]});

  const auto& where = predictions[slot(ClauseId::where)];
  for (std::size_t i = 0; i < where.size(); ++i) {
    ast.where.push_back({Aggregator::none, where.columns[i], where.comparisons[i],
                         rhs_for(where.subquery_flags[i])});
  }
  if (ast.where.size() >= 2) ast.where_connective = sketch.where_connective;

  ast.group_by = predictions[slot(ClauseId::group_by)].columns;

  const auto& having = predictions[slot(ClauseId::having)];
  for (std::size_t i = 0; i < having.size(); ++i) {
    ast.having.push_back({having.aggregators[i], having.columns[i], having.comparisons[i],
                          rhs_for(having.subquery_flags[i])});
  }

  const auto& order = predictions[slot(ClauseId::order_by)];
  for (std::size_t i = 0; i < order.size(); ++i) {
    ast.order_by.push_back({order.aggregators[i], order.columns[i], order.directions[i]});
  }
  ast.limit = sketch.has_limit;
  ast.set_op = sketch.iue;
  if (ast.set_op != SetOp::none) ast.set_rhs = Rhs::placeholder();
  return ast;
}

std::vector<int> required_tables(const SqlAst& ast, const Schema& schema) {
  std::vector<int> out;
  auto note = [&](int column) {
    const int t = owner(schema, column);
    if (t >= 0 && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  for (const auto& s : ast.select) note(s.column);
  for (const auto& c : ast.where) note(c.column);
  for (int c : ast.group_by) note(c);
  for (const auto& c : ast.having) note(c.column);
  for (const auto& o : ast.order_by) note(o.column);
  return out;
}

int best_matching_table(const Schema& schema, const std::vector<std::string>& question_words) {
  const std::set<std::string> question(question_words.begin(), question_words.end());
  int best = 0;
  std::size_t best_score = 0;
  for (int t = 0; t < schema.table_count(); ++t) {
    std::set<std::string> words;
    for (auto& w : encoders::split_words(schema.tables[static_cast<std::size_t>(t)])) words.insert(w);
    for (int c : schema.columns_of(t)) {
      for (auto& w : encoders::split_words(schema.columns[static_cast<std::size_t>(c)].name)) {
        words.insert(w);
      }
    }
    std::size_t score = 0;
    for (const auto& w : words) score += question.count(w);
    if (score > best_score) {
      best_score = score;
      best = t;
    }
  }
  return best;
}

JoinTree infer_from(const SqlAst& ast, const Schema& schema,
                    const std::vector<std::string>& question_words) {
  JoinTree tree;
  if (schema.table_count() == 0) throw SchemaError("schema has no tables");
  auto required = required_tables(ast, schema);
  if (required.empty()) required.push_back(best_matching_table(schema, question_words));

  const auto n = static_cast<std::size_t>(schema.table_count());
  std::vector<std::vector<int>> adjacent(n);
  for (const auto& [a, b] : schema.foreign_keys) {
    const int ta = owner(schema, a);
    const int tb = owner(schema, b);
    if (ta < 0 || tb < 0 || ta == tb) continue;
    adjacent[static_cast<std::size_t>(ta)].push_back(tb);
    adjacent[static_cast<std::size_t>(tb)].push_back(ta);
  }
  for (auto& list : adjacent) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  auto fk_between = [&](int u, int v) -> JoinCondition {
    for (const auto& [a, b] : schema.foreign_keys) {
      if (owner(schema, a) == u && owner(schema, b) == v) return {a, b};
      if (owner(schema, b) == u && owner(schema, a) == v) return {b, a};
    }
    return {};
  };
  auto contains = [&](int t) {
    return std::find(tree.tables.begin(), tree.tables.end(), t) != tree.tables.end();
  };

  tree.tables.push_back(required.front());
  for (std::size_t r = 1; r < required.size(); ++r) {
    const int target = required[r];
    if (contains(target)) continue;
    // multi-source BFS from the current tree, in alias order
    std::vector<int> parent(n, -2);
    std::deque<int> queue;
    for (int t : tree.tables) {
      parent[static_cast<std::size_t>(t)] = -1;
      queue.push_back(t);
    }
    while (!queue.empty() && parent[static_cast<std::size_t>(target)] == -2) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adjacent[static_cast<std::size_t>(u)]) {
        if (parent[static_cast<std::size_t>(v)] != -2) continue;
        parent[static_cast<std::size_t>(v)] = u;
        queue.push_back(v);
      }
    }
    if (parent[static_cast<std::size_t>(target)] == -2) {
      log::warn("infer_from: table '", schema.tables[static_cast<std::size_t>(target)],
                "' is not reachable through foreign keys; using a cross join");
      tree.tables.push_back(target);
      continue;
    }
    std::vector<int> path;  // target back to the tree
    for (int t = target; parent[static_cast<std::size_t>(t)] != -1;
         t = parent[static_cast<std::size_t>(t)]) {
      path.push_back(t);
    }
    std::reverse(path.begin(), path.end());
    for (int t : path) {
      const int from = parent[static_cast<std::size_t>(t)];
      tree.tables.push_back(t);
      tree.conditions.push_back(fk_between(from, t));
    }
  }
  return tree;
}

std::vector<std::string> subquery_input(const std::vector<std::string>& question_words,
                                        const SqlAst& ast, const Schema& schema) {
  std::vector<std::string> out = question_words;
  out.emplace_back("[SEP]");
  for (auto& w : encoders::split_words(serialize(ast, schema))) out.push_back(std::move(w));
  return out;
}

SqlAst expand_subqueries(SqlAst ast, const Schema& schema,
                         const std::vector<std::string>& question_words, int depth,
                         const InnerPredictor& predict) {
  for (;;) {
    auto refs = placeholders(ast);
    if (refs.empty()) break;
    if (depth <= 0) {
      log::warn("expand_subqueries: depth exhausted; inserting a fallback query");
      SqlAst fallback;
      fallback.select.push_back({Aggregator::none, Schema::kStar});
      fallback.from.tables.push_back(ast.from.tables.empty() ? 0 : ast.from.tables.front());
      *refs.front() = Rhs::nested(std::move(fallback));
      continue;
    }
    const auto input = subquery_input(question_words, ast, schema);
    SqlAst inner = predict(input, depth - 1);
    if (!finalized(inner)) {
      inner = expand_subqueries(std::move(inner), schema, input, 0, predict);
    }
    *placeholders(ast).front() = Rhs::nested(std::move(inner));
  }
  return ast;
}

GoldLevel extract_gold(const SqlAst& ast, const sketch::SketchLimits& limits) {
  GoldLevel g;
  g.clauses = empty_predictions();
  auto& sel = g.clauses[slot(ClauseId::select)];
  for (const auto& s : ast.select) {
    sel.push(s.column);
    sel.aggregators.back() = s.agg;
  }
  auto& where = g.clauses[slot(ClauseId::where)];
  for (const auto& c : ast.where) {
    where.push(c.column);
    where.comparisons.back() = c.cmp;
    where.subquery_flags.back() = flag_for(c.rhs);
  }
  auto& group = g.clauses[slot(ClauseId::group_by)];
  for (int c : ast.group_by) group.push(c);
  auto& having = g.clauses[slot(ClauseId::having)];
  for (const auto& c : ast.having) {
    having.push(c.column);
    having.aggregators.back() = c.agg;
    having.comparisons.back() = c.cmp;
    having.subquery_flags.back() = flag_for(c.rhs);
  }
  auto& order = g.clauses[slot(ClauseId::order_by)];
  for (const auto& o : ast.order_by) {
    order.push(o.column);
    order.aggregators.back() = o.agg;
    order.directions.back() = o.dir;
  }
  auto& s = g.sketch;
  s.num_select = static_cast<int>(ast.select.size());
  s.num_where = static_cast<int>(ast.where.size());
  s.num_group_by = static_cast<int>(ast.group_by.size());
  s.num_having = static_cast<int>(ast.having.size());
  s.num_order_by = static_cast<int>(ast.order_by.size());
  s.has_limit = ast.limit;
  s.iue = ast.set_op;
  s.where_connective = ast.where.size() >= 2 ? ast.where_connective : Connective::and_;
  if (!s.valid(limits)) throw AssemblyError("gold query exceeds the sketch limits");
  return g;
}

std::vector<NestedTarget> nested_targets(const SqlAst& ast) {
  std::vector<NestedTarget> out;
  // positions in left-to-right order: WHERE, HAVING, set operand
  std::vector<const Rhs*> gold;
  for (const auto& c : ast.where) gold.push_back(&c.rhs);
  for (const auto& c : ast.having) gold.push_back(&c.rhs);
  if (ast.set_op != SetOp::none) gold.push_back(&ast.set_rhs);

  auto rhs_at = [](SqlAst& a, std::size_t k) -> Rhs& {
    if (k < a.where.size()) return a.where[k].rhs;
    k -= a.where.size();
    if (k < a.having.size()) return a.having[k].rhs;
    return a.set_rhs;
  };
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i]->kind != Rhs::Kind::query) continue;
    NestedTarget nt;
    nt.context = ast;
    for (std::size_t k = i; k < gold.size(); ++k) {
      Rhs& r = rhs_at(nt.context, k);
      if (r.kind != Rhs::Kind::value) r = Rhs::placeholder();
    }
    nt.target = *gold[i]->query;
    out.push_back(std::move(nt));
  }
  return out;
}

}  // namespace recsql::sql
