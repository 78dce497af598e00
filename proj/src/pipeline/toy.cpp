#include "recsql/pipeline/toy.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "recsql/encoders/vocabulary.hpp"
#include "recsql/errors.hpp"
#include "recsql/sql/assembler.hpp"
#include "recsql/sql/text.hpp"

namespace recsql::pipeline {

using core::Rng;
using sql::Aggregator;
using sql::Comparison;
using sql::Condition;
using sql::Rhs;
using sql::SqlAst;

namespace {

const std::vector<std::string> kTableNames = {
    "singer", "concert", "stadium", "album",   "track",   "artist",  "student", "course",
    "teacher", "library", "book",   "author",  "airport", "flight",  "hotel",   "guest",
    "museum", "painting", "team",   "player",  "ship",    "captain", "company", "employee",
    "product", "store",   "customer", "school", "club",   "festival"};

const std::vector<std::string> kTextAttrs = {"name",   "title",    "country",     "city",
                                             "genre",  "category", "status",      "color",
                                             "nationality", "language"};
const std::vector<std::string> kNumberAttrs = {"age",    "price",  "capacity", "rating",
                                               "salary", "weight", "budget",   "score",
                                               "height", "population", "year"};

const std::map<std::string, std::vector<std::string>> kTextValues = {
    {"name", {"alice", "bob", "carol", "dave", "erin"}},
    {"title", {"dawn", "echo", "horizon", "river", "summit"}},
    {"country", {"france", "japan", "brazil", "canada", "kenya"}},
    {"city", {"paris", "tokyo", "lima", "oslo", "cairo"}},
    {"genre", {"rock", "jazz", "pop", "folk", "blues"}},
    {"category", {"basic", "premium", "deluxe", "standard", "special"}},
    {"status", {"active", "closed", "pending", "open", "retired"}},
    {"color", {"red", "blue", "green", "white", "black"}},
    {"nationality", {"french", "german", "italian", "spanish", "dutch"}},
    {"language", {"english", "arabic", "hindi", "swahili", "korean"}}};

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

template <typename T>
std::vector<T> sample(Rng& rng, std::vector<T> v, std::size_t n) {
  std::shuffle(v.begin(), v.end(), rng);
  v.resize(std::min(n, v.size()));
  return v;
}

/// Literal of one value slot: words for the question and SQL text per [VAR].
struct Literal {
  std::vector<std::string> words;
  std::vector<std::string> sql;
};

class Generator {
 public:
  Generator(Rng& rng, const Schema& schema) : rng_(rng), s_(schema) {
    for (int t = 0; t < s_.table_count(); ++t) {
      Columns c;
      for (int col : s_.columns_of(t)) {
        const auto& name = s_.columns[static_cast<std::size_t>(col)].name;
        if (name.size() > 3 && name.compare(name.size() - 3, 3, "_id") == 0) {
          c.keys.push_back(col);
        } else if (s_.columns[static_cast<std::size_t>(col)].type == ColumnType::number) {
          c.numbers.push_back(col);
        } else {
          c.texts.push_back(col);
        }
      }
      columns_.push_back(std::move(c));
    }
  }

  /// Builds the gold AST for `plan`, then its question and SQL text.
  Example make(int plan, sql::SetOp iue) {
    literals_.clear();
    SqlAst ast = build(plan, iue);
    ast.from = sql::infer_from(ast, s_, {});
    Example ex;
    ex.db_id = s_.db_id;
    std::vector<std::string> words = question(ast);
    ex.question = join(words);
    ex.words = encoders::split_words(ex.question);
    // the FROM of a "*"-only query depends on the question wording
    fix_from(ast, ex.words);
    ex.sql = with_values(ast);
    ex.ast = sql::parse(ex.sql, s_);
    return ex;
  }

 private:
  struct Columns {
    std::vector<int> keys;
    std::vector<int> texts;
    std::vector<int> numbers;
    std::vector<int> attributes() const {
      std::vector<int> a = texts;
      a.insert(a.end(), numbers.begin(), numbers.end());
      return a;
    }
  };

  const Columns& cols(int table) const { return columns_[static_cast<std::size_t>(table)]; }
  int table_of(int column) const { return s_.columns[static_cast<std::size_t>(column)].table; }
  int random_table() { return uniform(rng_, 0, s_.table_count() - 1); }
  bool is_number(int column) const {
    return s_.columns[static_cast<std::size_t>(column)].type == ColumnType::number;
  }

  void fix_from(SqlAst& ast, const std::vector<std::string>& words) {
    ast.from = sql::infer_from(ast, s_, words);
    auto fix_rhs = [&](Rhs& r) {
      if (r.kind == Rhs::Kind::query) fix_from(*r.query, words);
    };
    for (auto& c : ast.where) fix_rhs(c.rhs);
    for (auto& c : ast.having) fix_rhs(c.rhs);
    fix_rhs(ast.set_rhs);
  }

  // ---- values ------------------------------------------------------------

  std::string text_value(int column) {
    const auto& name = s_.columns[static_cast<std::size_t>(column)].name;
    const auto it = kTextValues.find(name);
    return it == kTextValues.end() ? "alpha" : pick(rng_, it->second);
  }

  std::string number_value(int column) {
    const auto& name = s_.columns[static_cast<std::size_t>(column)].name;
    if (name == "year") return std::to_string(uniform(rng_, 1950, 2020));
    return std::to_string(uniform(rng_, 1, 99));
  }

  Literal value_for(int column, Comparison cmp) {
    Literal lit;
    if (cmp == Comparison::between) {
      int a = std::stoi(number_value(column));
      int b = std::stoi(number_value(column));
      if (a > b) std::swap(a, b);
      if (a == b) ++b;
      lit.words = {std::to_string(a), "to", std::to_string(b)};
      lit.sql = {std::to_string(a), std::to_string(b)};
      return lit;
    }
    if (cmp == Comparison::in || cmp == Comparison::not_in) {
      auto values = sample(rng_, kTextValues.count(s_.columns[static_cast<std::size_t>(column)].name)
                                     ? kTextValues.at(s_.columns[static_cast<std::size_t>(column)].name)
                                     : std::vector<std::string>{"alpha", "beta", "gamma"},
                           2);
      lit.words = {values[0], "or", values[1]};
      lit.sql = {"('" + values[0] + "', '" + values[1] + "')"};
      return lit;
    }
    if (column == Schema::kStar || is_number(column)) {
      // counts get small thresholds
      const std::string v =
          column == Schema::kStar ? std::to_string(uniform(rng_, 1, 9)) : number_value(column);
      lit.words = {v};
      lit.sql = {v};
      return lit;
    }
    const std::string v = text_value(column);
    lit.words = {v};
    lit.sql = {cmp == Comparison::like ? "'%" + v + "%'" : "'" + v + "'"};
    return lit;
  }

  Condition value_condition(int column, Comparison cmp) {
    Condition c{Aggregator::none, column, cmp, Rhs::value()};
    return c;
  }

  Comparison comparison_for(int column) {
    static const std::vector<Comparison> numeric = {Comparison::eq, Comparison::ne, Comparison::gt,
                                                    Comparison::lt, Comparison::ge, Comparison::le};
    static const std::vector<Comparison> text = {Comparison::eq, Comparison::ne};
    return pick(rng_, is_number(column) ? numeric : text);
  }

  Aggregator numeric_aggregator() {
    static const std::vector<Aggregator> aggs = {Aggregator::max, Aggregator::min, Aggregator::sum,
                                                 Aggregator::avg};
    return pick(rng_, aggs);
  }

  // ---- plans -------------------------------------------------------------

  std::vector<sql::SelectItem> select_attrs(int table, int n) {
    std::vector<sql::SelectItem> out;
    for (int c : sample(rng_, cols(table).attributes(), static_cast<std::size_t>(n))) {
      out.push_back({Aggregator::none, c});
    }
    return out;
  }

  /// n distinct value conditions on attributes of `table`, avoiding `used`.
  std::vector<Condition> conditions(int table, int n, std::set<int> used = {}) {
    std::vector<int> pool;
    for (int c : cols(table).attributes())
      if (!used.count(c)) pool.push_back(c);
    std::vector<Condition> out;
    for (int c : sample(rng_, pool, static_cast<std::size_t>(n))) {
      out.push_back(value_condition(c, comparison_for(c)));
    }
    return out;
  }

  /// A table adjacent to `table` in the foreign-key chain.
  int neighbour(int table) {
    std::vector<int> n;
    if (table > 0) n.push_back(table - 1);
    if (table + 1 < s_.table_count()) n.push_back(table + 1);
    return pick(rng_, n);
  }

  /// Key columns linking adjacent tables a and b: (column of a, column of b).
  std::pair<int, int> link(int a, int b) {
    for (const auto& [x, y] : s_.foreign_keys) {
      if (table_of(x) == a && table_of(y) == b) return {x, y};
      if (table_of(y) == a && table_of(x) == b) return {y, x};
    }
    throw SchemaError("tables are not linked");
  }

  SqlAst build(int plan, sql::SetOp iue) {
    SqlAst a;
    const int t = random_table();
    const auto& c = cols(t);
    switch (plan) {
      case 0: a.select = select_attrs(t, 1); break;
      case 1: a.select = select_attrs(t, 2); break;
      case 2: a.select = {{numeric_aggregator(), pick(rng_, c.numbers)}}; break;
      case 3: a.select = {{Aggregator::count, Schema::kStar}}; break;
      case 4:
        a.select = select_attrs(t, 1);
        a.where = conditions(t, 1);
        break;
      case 5:
        a.select = select_attrs(t, 2);
        a.where = conditions(t, 1);
        break;
      case 6:
      case 7:
        a.select = select_attrs(t, 1);
        a.where = conditions(t, 2);
        a.where_connective = plan == 6 ? sql::Connective::and_ : sql::Connective::or_;
        break;
      case 8:
        a.select = select_attrs(t, 1);
        a.where = {value_condition(pick(rng_, c.numbers), Comparison::between)};
        break;
      case 9:
        a.select = select_attrs(t, 1);
        a.where = {value_condition(pick(rng_, c.texts), Comparison::like)};
        break;
      case 10:
        a.select = select_attrs(t, 1);
        a.where = {value_condition(pick(rng_, c.texts),
                                   uniform(rng_, 0, 1) ? Comparison::in : Comparison::not_in)};
        break;
      case 11:
      case 12: {
        const int u = plan == 12 && s_.table_count() > 2 && uniform(rng_, 0, 1) ? far_table(t)
                                                                                 : neighbour(t);
        a.select = {{Aggregator::none, pick(rng_, c.attributes())},
                    {Aggregator::none, pick(rng_, cols(u).attributes())}};
        if (plan == 12) a.where = conditions(u, 1);
        break;
      }
      case 13:
      case 14:
      case 15: {
        const int g = pick(rng_, c.texts);
        a.group_by = {g};
        if (plan == 15) {
          const int n = pick(rng_, c.numbers);
          const Aggregator agg = numeric_aggregator();
          a.select = {{Aggregator::none, g}, {agg, n}};
          a.having = {{agg, n, comparison_for(n), Rhs::value()}};
        } else {
          a.select = {{Aggregator::none, g}, {Aggregator::count, Schema::kStar}};
          if (plan == 14) {
            a.having = {{Aggregator::count, Schema::kStar,
                         pick(rng_, std::vector<Comparison>{Comparison::gt, Comparison::lt,
                                                            Comparison::ge, Comparison::eq}),
                         Rhs::value()}};
          }
        }
        break;
      }
      case 16: {
        a.select = select_attrs(t, 1);
        const int n = uniform(rng_, 1, 2);
        for (int col : sample(rng_, c.attributes(), static_cast<std::size_t>(n))) {
          a.order_by.push_back({Aggregator::none, col,
                                uniform(rng_, 0, 1) ? sql::Direction::desc : sql::Direction::asc});
        }
        break;
      }
      case 17:
        a.select = select_attrs(t, 1);
        a.order_by = {{Aggregator::none, pick(rng_, c.numbers),
                       uniform(rng_, 0, 1) ? sql::Direction::desc : sql::Direction::asc}};
        a.limit = true;
        break;
      case 18: {
        const int g = pick(rng_, c.texts);
        a.select = {{Aggregator::none, g}};
        a.group_by = {g};
        a.order_by = {{Aggregator::count, Schema::kStar,
                       uniform(rng_, 0, 1) ? sql::Direction::desc : sql::Direction::asc}};
        a.limit = true;
        break;
      }
      case 19: a.select = select_attrs(t, 3); break;
      case 20:
        a.select = select_attrs(t, 1);
        a.where = conditions(t, 3);
        break;
      case 21: {
        // set operation: same projection, different filters
        a.select = select_attrs(t, 1);
        a.where = conditions(t, 1);
        SqlAst inner;
        inner.select = a.select;
        inner.where = conditions(t, 1, {a.where[0].column});
        inner.from = sql::infer_from(inner, s_);
        a.set_op = iue;
        a.set_rhs = Rhs::nested(std::move(inner));
        break;
      }
      case 22:
      case 23: {
        const int u = neighbour(t);
        const auto [outer_key, inner_key] = link(t, u);
        a.select = select_attrs(t, 1);
        SqlAst inner;
        inner.select = {{Aggregator::none, inner_key}};
        inner.from = sql::infer_from(inner, s_);
        Condition nested{Aggregator::none, outer_key,
                         uniform(rng_, 0, 1) ? Comparison::in : Comparison::not_in,
                         Rhs::nested(std::move(inner))};
        if (plan == 22) {
          auto extra = conditions(t, 1);
          if (uniform(rng_, 0, 1)) {
            a.where = {extra[0], nested};
          } else {
            a.where = {nested, extra[0]};
          }
        } else {
          a.where = {nested};
        }
        break;
      }
      case 24: {
        const int n = pick(rng_, c.numbers);
        std::vector<int> others;
        for (int col : c.attributes())
          if (col != n) others.push_back(col);
        a.select = {{Aggregator::none, pick(rng_, others)}};
        SqlAst inner;
        inner.select = {{pick(rng_, std::vector<Aggregator>{Aggregator::avg, Aggregator::max,
                                                            Aggregator::min}),
                         n}};
        inner.from = sql::infer_from(inner, s_);
        a.where = {{Aggregator::none, n, uniform(rng_, 0, 1) ? Comparison::gt : Comparison::lt,
                    Rhs::nested(std::move(inner))}};
        break;
      }
      default: throw ParameterError("unknown plan");
    }
    return a;
  }

  /// A table two steps away along the chain, so joining needs a bridge.
  int far_table(int table) {
    std::vector<int> n;
    if (table >= 2) n.push_back(table - 2);
    if (table + 2 < s_.table_count()) n.push_back(table + 2);
    return n.empty() ? neighbour(table) : pick(rng_, n);
  }

  // ---- question text -----------------------------------------------------

  std::vector<std::string> mention(int column) const {
    const auto& col = s_.columns[static_cast<std::size_t>(column)];
    const std::string& table = s_.tables[static_cast<std::size_t>(col.table)];
    std::vector<std::string> words = encoders::split_words(table);
    auto name = encoders::split_words(col.name);
    // "singer_id" in table singer reads "singer id", not "singer singer id"
    if (name.size() > words.size() && std::equal(words.begin(), words.end(), name.begin())) {
      return name;
    }
    words.insert(words.end(), name.begin(), name.end());
    return words;
  }

  std::vector<std::string> expression(Aggregator agg, int column, int table_hint) const {
    std::vector<std::string> out;
    auto append = [&](const std::vector<std::string>& w) { out.insert(out.end(), w.begin(), w.end()); };
    if (column == Schema::kStar) {
      out = {"the", "number", "of"};
      append(encoders::split_words(s_.tables[static_cast<std::size_t>(table_hint)]));
      out.push_back("records");
      return out;
    }
    switch (agg) {
      case Aggregator::none: out = {"the"}; break;
      case Aggregator::max: out = {"the", "maximum"}; break;
      case Aggregator::min: out = {"the", "minimum"}; break;
      case Aggregator::count: out = {"the", "count", "of"}; break;
      case Aggregator::sum: out = {"the", "total"}; break;
      case Aggregator::avg: out = {"the", "average"}; break;
    }
    append(mention(column));
    return out;
  }

  static std::vector<std::string> comparison_words(Comparison cmp) {
    switch (cmp) {
      case Comparison::eq: return {"is"};
      case Comparison::ne: return {"is", "not"};
      case Comparison::gt: return {"is", "greater", "than"};
      case Comparison::lt: return {"is", "less", "than"};
      case Comparison::ge: return {"is", "at", "least"};
      case Comparison::le: return {"is", "at", "most"};
      case Comparison::like: return {"contains"};
      case Comparison::in: return {"is", "one", "of"};
      case Comparison::not_in: return {"is", "none", "of"};
      case Comparison::between: return {"is", "within"};
    }
    return {};
  }

  int primary_table(const SqlAst& a) const {
    const auto req = sql::required_tables(a, s_);
    return req.empty() ? (a.from.tables.empty() ? 0 : a.from.tables.front()) : req.front();
  }

  void condition_words(const Condition& c, int table_hint, std::vector<std::string>& out) {
    auto append = [&](const std::vector<std::string>& w) { out.insert(out.end(), w.begin(), w.end()); };
    if (c.agg == Aggregator::none && c.column != Schema::kStar) {
      append(mention(c.column));
    } else {
      append(expression(c.agg, c.column, table_hint));
    }
    if (c.rhs.kind == Rhs::Kind::query) {
      const SqlAst& inner = *c.rhs.query;
      const auto& item = inner.select.front();
      if (item.agg == Aggregator::none) {
        append(c.cmp == Comparison::not_in ? std::vector<std::string>{"does", "not", "appear", "in"}
                                           : std::vector<std::string>{"appears", "in"});
        append(mention(item.column));
      } else {
        append(comparison_words(c.cmp));
        append(expression(item.agg, item.column, table_hint));
      }
      return;
    }
    append(comparison_words(c.cmp));
    Literal lit = value_for(c.column, c.cmp);
    append(lit.words);
    literals_[&c] = std::move(lit);
  }

  std::vector<std::string> question(const SqlAst& a) {
    std::vector<std::string> out;
    auto append = [&](const std::vector<std::string>& w) { out.insert(out.end(), w.begin(), w.end()); };
    const int hint = primary_table(a);
    static const std::vector<std::string> verbs = {"show", "list", "find", "give"};
    out.push_back(pick(rng_, verbs));
    for (std::size_t i = 0; i < a.select.size(); ++i) {
      if (i > 0) out.push_back(i + 1 == a.select.size() ? "and" : ",");
      append(expression(a.select[i].agg, a.select[i].column, hint));
    }
    if (!a.where.empty()) {
      out.push_back("where");
      for (std::size_t i = 0; i < a.where.size(); ++i) {
        if (i > 0) out.push_back(a.where_connective == sql::Connective::or_ ? "or" : "and");
        condition_words(a.where[i], hint, out);
      }
    }
    if (!a.group_by.empty()) {
      out.insert(out.end(), {"for", "each"});
      for (std::size_t i = 0; i < a.group_by.size(); ++i) {
        if (i > 0) out.push_back("and");
        append(mention(a.group_by[i]));
      }
    }
    if (!a.having.empty()) {
      out.push_back("having");
      for (std::size_t i = 0; i < a.having.size(); ++i) {
        if (i > 0) out.push_back("and");
        condition_words(a.having[i], hint, out);
      }
    }
    if (!a.order_by.empty()) {
      out.insert(out.end(), {"ordered", "by"});
      for (std::size_t i = 0; i < a.order_by.size(); ++i) {
        if (i > 0) out.insert(out.end(), {"then", "by"});
        append(expression(a.order_by[i].agg, a.order_by[i].column, hint));
        out.insert(out.end(), {"in", a.order_by[i].dir == sql::Direction::asc ? "ascending"
                                                                               : "descending",
                               "order"});
      }
    }
    if (a.limit) {
      const std::string n = std::to_string(uniform(rng_, 1, 10));
      out.insert(out.end(), {"limited", "to", n, "results"});
      limit_literals_[&a] = n;
    }
    if (a.set_op != sql::SetOp::none) {
      const SqlAst& inner = *a.set_rhs.query;
      switch (a.set_op) {
        case sql::SetOp::intersect: out.insert(out.end(), {"intersected", "with", "those"}); break;
        case sql::SetOp::union_: out.insert(out.end(), {"together", "with", "those"}); break;
        case sql::SetOp::except: out.insert(out.end(), {"except", "those"}); break;
        case sql::SetOp::none: break;
      }
      out.push_back("where");
      for (std::size_t i = 0; i < inner.where.size(); ++i) {
        if (i > 0) out.push_back("and");
        condition_words(inner.where[i], hint, out);
      }
    }
    return out;
  }

  static std::string join(const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
      if (!s.empty() && w != ",") s += ' ';
      s += w;
    }
    return s;
  }

  // ---- SQL text with values ----------------------------------------------

  void collect(const SqlAst& a, std::vector<std::string>& out) const {
    auto cond = [&](const Condition& c) {
      if (c.rhs.kind == Rhs::Kind::query) {
        collect(*c.rhs.query, out);
      } else {
        const auto& lit = literals_.at(&c);
        out.insert(out.end(), lit.sql.begin(), lit.sql.end());
      }
    };
    for (const auto& c : a.where) cond(c);
    for (const auto& c : a.having) cond(c);
    if (a.limit) out.push_back(limit_literals_.at(&a));
    if (a.set_op != sql::SetOp::none) collect(*a.set_rhs.query, out);
  }

  std::string with_values(const SqlAst& a) const {
    std::vector<std::string> values;
    collect(a, values);
    const std::string canonical = sql::serialize(a, s_);
    const std::string var = "\"[VAR]\"";
    std::string out;
    std::size_t pos = 0;
    std::size_t k = 0;
    for (auto hit = canonical.find(var); hit != std::string::npos; hit = canonical.find(var, pos)) {
      out.append(canonical, pos, hit - pos);
      out += values.at(k++);
      pos = hit + var.size();
    }
    out.append(canonical, pos, std::string::npos);
    if (k != values.size()) throw AssemblyError("value slots do not match the query");
    return out;
  }

  Rng& rng_;
  const Schema& s_;
  std::vector<Columns> columns_;
  std::map<const Condition*, Literal> literals_;
  std::map<const SqlAst*, std::string> limit_literals_;
};

}  // namespace

bool toy_plan_is_nested(int plan) { return plan >= kToyPlanCount - 4 && plan < kToyPlanCount; }

Schema random_toy_schema(Rng& rng, const std::string& db_id) {
  const int n = uniform(rng, 2, 4);
  const auto names = sample(rng, kTableNames, static_cast<std::size_t>(n));
  std::vector<SchemaColumn> columns = {{-1, "*", ColumnType::text}};
  std::vector<std::pair<int, int>> fks;
  std::vector<int> ids;
  const auto text = sample(rng, kTextAttrs, kTextAttrs.size());
  const auto number = sample(rng, kNumberAttrs, kNumberAttrs.size());
  std::size_t next_text = 0;
  std::size_t next_number = 0;
  for (int t = 0; t < n; ++t) {
    const auto& name = names[static_cast<std::size_t>(t)];
    ids.push_back(static_cast<int>(columns.size()));
    columns.push_back({t, name + "_id", ColumnType::number});
    if (t > 0) {
      fks.emplace_back(static_cast<int>(columns.size()), ids[static_cast<std::size_t>(t - 1)]);
      columns.push_back({t, names[static_cast<std::size_t>(t - 1)] + "_id", ColumnType::number});
    }
    // attribute names are unique within a schema
    columns.push_back({t, text[next_text++], ColumnType::text});
    columns.push_back({t, number[next_number++], ColumnType::number});
    if (uniform(rng, 0, 1)) {
      columns.push_back({t, text[next_text++], ColumnType::text});
    } else {
      columns.push_back({t, number[next_number++], ColumnType::number});
    }
  }
  return make_schema(db_id, names, std::move(columns), std::move(fks));
}

Dataset generate_toy(std::uint64_t seed, int schemas, int examples) {
  if (schemas < 1 || examples < 1) throw ParameterError("generate_toy: counts must be at least 1");
  Rng rng(seed);
  Dataset ds;
  std::vector<std::string> ids;
  for (int i = 0; i < schemas; ++i) {
    const std::string id = "toy_" + std::to_string(i);
    ds.schemas.emplace(id, random_toy_schema(rng, id));
    ids.push_back(id);
  }
  static const sql::SetOp rotation[] = {sql::SetOp::intersect, sql::SetOp::union_,
                                        sql::SetOp::except};
  std::set<std::string> seen;
  for (int i = 0; i < examples; ++i) {
    const int plan = i % kToyPlanCount;
    const sql::SetOp iue = rotation[(i / kToyPlanCount) % 3];
    // redraw on a duplicate question so every question has one gold query
    for (int attempt = 0;; ++attempt) {
      const Schema& schema = ds.schemas.at(pick(rng, ids));
      Generator gen(rng, schema);
      Example ex = gen.make(plan, iue);
      if (seen.insert(ex.question).second || attempt >= 20) {
        ds.examples.push_back(std::move(ex));
        break;
      }
    }
  }
  return ds;
}

}  // namespace recsql::pipeline
