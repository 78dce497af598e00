#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "recsql/errors.hpp"
#include "recsql/sql/text.hpp"

namespace recsql::sql {

namespace {

enum class Kind { word, number, string, symbol, reserved, end };

struct Tok {
  Kind kind = Kind::end;
  std::string text;
};

bool is_ident(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Tok> lex(std::string_view s) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '"' || c == '\'') {
      const auto close = s.find(c, i + 1);
      if (close == std::string_view::npos) {
        throw ParseError("unterminated string literal", std::string(s.substr(i)));
      }
      out.push_back({Kind::string, std::string(s.substr(i + 1, close - i - 1))});
      i = close + 1;
    } else if (c == '[') {
      const auto close = s.find(']', i);
      if (close == std::string_view::npos) throw ParseError("unterminated bracket", "[");
      std::string word(s.substr(i, close - i + 1));
      for (auto& ch : word) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      if (word != "[VAR]" && word != "[SUB_QUERY]") {
        throw ParseError("unknown bracketed token", word);
      }
      out.push_back({Kind::reserved, word});
      i = close + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      // identifiers may start with a digit in some schemas
      if (j < s.size() && is_ident(s[j])) {
        while (j < s.size() && is_ident(s[j])) ++j;
        out.push_back({Kind::word, std::string(s.substr(i, j - i))});
      } else {
        out.push_back({Kind::number, std::string(s.substr(i, j - i))});
      }
      i = j;
    } else if (is_ident(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident(s[j])) ++j;
      out.push_back({Kind::word, std::string(s.substr(i, j - i))});
      i = j;
    } else {
      static const char* two[] = {"!=", "<>", ">=", "<="};
      std::string sym(1, c);
      if (i + 1 < s.size()) {
        const std::string pair(s.substr(i, 2));
        for (const char* t : two)
          if (pair == t) sym = pair;
      }
      out.push_back({Kind::symbol, sym});
      i += sym.size();
    }
  }
  out.push_back({Kind::end, "<end>"});
  return out;
}

bool is_keyword(std::string_view w) {
  static const char* kws[] = {"select", "from",   "where",  "group",  "by",       "having",
                              "order",  "limit",  "join",   "on",     "as",       "and",
                              "or",     "not",    "in",     "like",   "between",  "asc",
                              "desc",   "union",  "intersect", "except", "inner", "distinct"};
  for (const char* k : kws)
    if (iequals(w, k)) return true;
  return false;
}

struct Scope {
  std::vector<int> tables;
  std::vector<std::string> aliases;  // parallel to tables; may be empty strings
};

class Parser {
 public:
  Parser(std::string_view sql, const Schema& schema) : toks_(lex(sql)), schema_(schema) {}

  SqlAst run() {
    SqlAst ast = query();
    if (is_symbol(";")) ++pos_;
    if (peek().kind != Kind::end) fail("unexpected token after query");
    return ast;
  }

 private:
  const Tok& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Kind::word && iequals(peek(ahead).text, w);
  }
  bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Kind::symbol && peek(ahead).text == s;
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message + " at '" + peek().text + "'", peek().text);
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("expected " + std::string(w));
    ++pos_;
  }
  void expect_symbol(std::string_view s) {
    if (!is_symbol(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }

  SqlAst query() {
    SqlAst ast = core();
    std::optional<SetOp> op;
    if (is_word("intersect")) op = SetOp::intersect;
    if (is_word("union")) op = SetOp::union_;
    if (is_word("except")) op = SetOp::except;
    if (!op) return ast;
    ++pos_;
    if (is_word("all")) fail("UNION ALL is not supported");
    ast.set_op = *op;
    if (peek().kind == Kind::reserved && peek().text == "[SUB_QUERY]") {
      ++pos_;
      ast.set_rhs = Rhs::placeholder();
    } else if (is_symbol("(")) {
      ++pos_;
      ast.set_rhs = Rhs::nested(query());
      expect_symbol(")");
    } else if (is_word("select")) {
      ast.set_rhs = Rhs::nested(query());
    } else {
      fail("expected a query after set operator");
    }
    return ast;
  }

  SqlAst core() {
    expect_word("select");
    if (is_word("distinct")) fail("DISTINCT is not supported");
    if (is_word("from")) fail("empty SELECT list");
    const std::size_t select_begin = pos_;
    // locate FROM at this nesting depth so aliases are known before columns
    std::size_t from_pos = pos_;
    for (int depth = 0;; ++from_pos) {
      const Tok& t = toks_[from_pos];
      if (t.kind == Kind::end) {
        pos_ = from_pos;
        fail("missing FROM");
      }
      if (t.kind == Kind::symbol && t.text == "(") ++depth;
      if (t.kind == Kind::symbol && t.text == ")") {
        if (depth == 0) {
          pos_ = from_pos;
          fail("missing FROM");
        }
        --depth;
      }
      if (depth == 0 && t.kind == Kind::word && iequals(t.text, "from")) break;
    }
    SqlAst ast;
    Scope saved = scope_;
    pos_ = from_pos + 1;
    ast.from = from_clause();
    const std::size_t after_from = pos_;

    pos_ = select_begin;
    for (;;) {
      const auto [agg, column] = expr();
      ast.select.push_back({agg, column});
      if (!is_symbol(",")) break;
      ++pos_;
    }
    if (pos_ != from_pos) fail("unexpected token in SELECT list");
    pos_ = after_from;

    if (is_word("where")) {
      ++pos_;
      ast.where_connective = conditions(ast.where, false);
      if (ast.where.size() < 2) ast.where_connective = Connective::and_;
    }
    if (is_word("group")) {
      ++pos_;
      expect_word("by");
      for (;;) {
        ast.group_by.push_back(column_ref());
        if (!is_symbol(",")) break;
        ++pos_;
      }
    }
    if (is_word("having")) {
      ++pos_;
      if (ast.group_by.empty()) fail("HAVING without GROUP BY");
      conditions(ast.having, true);
    }
    if (is_word("order")) {
      ++pos_;
      expect_word("by");
      for (;;) {
        const auto [agg, column] = expr();
        OrderItem item{agg, column, Direction::asc};
        if (is_word("asc")) {
          ++pos_;
        } else if (is_word("desc")) {
          item.dir = Direction::desc;
          ++pos_;
        }
        ast.order_by.push_back(item);
        if (!is_symbol(",")) break;
        ++pos_;
      }
    }
    if (is_word("limit")) {
      ++pos_;
      literal();
      ast.limit = true;
    }
    scope_ = std::move(saved);
    return ast;
  }

  JoinTree from_clause() {
    scope_ = {};
    struct RawOn {
      std::string left, right;
      std::size_t at;
    };
    std::vector<RawOn> raw;
    table_ref();
    for (;;) {
      if (is_symbol(",")) {
        ++pos_;
        table_ref();
        continue;
      }
      if (is_word("inner") && is_word("join", 1)) ++pos_;
      if (!is_word("join")) break;
      ++pos_;
      table_ref();
      if (is_word("on")) {
        ++pos_;
        for (;;) {
          const std::size_t at = pos_;
          if (peek().kind != Kind::word) fail("expected a column in ON");
          std::string left = peek().text;
          ++pos_;
          expect_symbol("=");
          if (peek().kind != Kind::word) fail("expected a column in ON");
          std::string right = peek().text;
          ++pos_;
          raw.push_back({left, right, at});
          if (!is_word("and")) break;
          ++pos_;
        }
      }
    }
    JoinTree tree;
    tree.tables = scope_.tables;
    const std::size_t resume = pos_;
    for (const auto& r : raw) {
      pos_ = r.at;
      JoinCondition j{resolve(r.left), resolve(r.right)};
      if (j.left == Schema::kStar || j.right == Schema::kStar) fail("'*' in a join condition");
      if (position(j.left) > position(j.right)) std::swap(j.left, j.right);
      tree.conditions.push_back(j);
    }
    pos_ = resume;
    std::stable_sort(tree.conditions.begin(), tree.conditions.end(),
                     [&](const JoinCondition& a, const JoinCondition& b) {
                       return position(a.right) < position(b.right);
                     });
    return tree;
  }

  int position(int column) const {
    const int table = schema_.columns[static_cast<std::size_t>(column)].table;
    const auto it = std::find(scope_.tables.begin(), scope_.tables.end(), table);
    return static_cast<int>(it - scope_.tables.begin());
  }

  void table_ref() {
    if (is_symbol("(")) fail("sub-queries in FROM are not supported");
    if (peek().kind != Kind::word || is_keyword(peek().text)) fail("expected a table name");
    const auto table = schema_.find_table(peek().text);
    if (!table) fail("unknown table");
    if (std::find(scope_.tables.begin(), scope_.tables.end(), *table) != scope_.tables.end()) {
      fail("table appears twice in FROM");
    }
    ++pos_;
    std::string alias;
    if (is_word("as")) {
      ++pos_;
      if (peek().kind != Kind::word) fail("expected an alias");
      alias = peek().text;
      ++pos_;
    } else if (peek().kind == Kind::word && !is_keyword(peek().text)) {
      alias = peek().text;
      ++pos_;
    }
    scope_.tables.push_back(*table);
    scope_.aliases.push_back(alias);
  }

  int resolve(const std::string& ref) {
    const auto dot = ref.find('.');
    if (dot != std::string::npos) {
      const std::string qualifier = ref.substr(0, dot);
      const std::string name = ref.substr(dot + 1);
      std::optional<int> table;
      for (std::size_t i = 0; i < scope_.tables.size() && !table; ++i) {
        if (!scope_.aliases[i].empty() && iequals(scope_.aliases[i], qualifier)) {
          table = scope_.tables[i];
        }
      }
      for (std::size_t i = 0; i < scope_.tables.size() && !table; ++i) {
        if (iequals(schema_.tables[static_cast<std::size_t>(scope_.tables[i])], qualifier)) {
          table = scope_.tables[i];
        }
      }
      if (!table) fail("unknown table qualifier");
      if (name == "*") return Schema::kStar;
      const auto column = schema_.find_column(*table, name);
      if (!column) fail("unknown column");
      return *column;
    }
    for (int table : scope_.tables) {
      if (const auto column = schema_.find_column(table, ref)) return *column;
    }
    fail("unknown column");
  }

  int column_ref() {
    if (is_symbol("*")) {
      ++pos_;
      return Schema::kStar;
    }
    if (peek().kind != Kind::word || is_keyword(peek().text)) fail("expected a column");
    // "T1.*" lexes as "T1." followed by "*"
    if (peek().text.back() == '.' && is_symbol("*", 1)) {
      const std::string ref = peek().text + "*";
      pos_ += 2;
      return resolve(ref);
    }
    const std::string ref = peek().text;
    const int column = resolve(ref);
    ++pos_;
    return column;
  }

  std::pair<Aggregator, int> expr() {
    if (peek().kind == Kind::word && is_symbol("(", 1)) {
      const auto agg = parse_aggregator(peek().text);
      if (!agg) fail("unsupported function");
      pos_ += 2;
      if (is_word("distinct")) fail("DISTINCT is not supported");
      const int column = column_ref();
      expect_symbol(")");
      return {*agg, column};
    }
    return {Aggregator::none, column_ref()};
  }

  void literal() {
    if (is_symbol("-") && peek(1).kind == Kind::number) {
      pos_ += 2;
      return;
    }
    const Kind k = peek().kind;
    if (k == Kind::number || k == Kind::string ||
        (k == Kind::reserved && peek().text == "[VAR]")) {
      ++pos_;
      return;
    }
    fail("expected a literal value");
  }

  bool at_nested_query() const {
    return (is_symbol("(") && is_word("select", 1)) ||
           (peek().kind == Kind::reserved && peek().text == "[SUB_QUERY]");
  }

  Rhs nested_rhs() {
    if (peek().kind == Kind::reserved && peek().text == "[SUB_QUERY]") {
      ++pos_;
      return Rhs::placeholder();
    }
    expect_symbol("(");
    Scope saved = scope_;
    Rhs r = Rhs::nested(query());
    scope_ = std::move(saved);
    expect_symbol(")");
    return r;
  }

  Rhs rhs(Comparison cmp) {
    if (at_nested_query()) return nested_rhs();
    if (cmp == Comparison::between) {
      literal();
      expect_word("and");
      literal();
      return Rhs::value();
    }
    if (is_symbol("(")) {
      ++pos_;
      for (;;) {
        literal();
        if (!is_symbol(",")) break;
        ++pos_;
      }
      expect_symbol(")");
      return Rhs::value();
    }
    if (peek().kind == Kind::word && !is_keyword(peek().text)) {
      fail("column-to-column predicates are not supported");
    }
    literal();
    return Rhs::value();
  }

  Comparison comparison() {
    const Tok& t = peek();
    if (t.kind == Kind::symbol) {
      static const std::pair<const char*, Comparison> table[] = {
          {"=", Comparison::eq}, {"!=", Comparison::ne}, {"<>", Comparison::ne},
          {">", Comparison::gt}, {"<", Comparison::lt},  {">=", Comparison::ge},
          {"<=", Comparison::le}};
      for (const auto& [s, c] : table) {
        if (t.text == s) {
          ++pos_;
          return c;
        }
      }
    }
    if (is_word("like")) {
      ++pos_;
      return Comparison::like;
    }
    if (is_word("in")) {
      ++pos_;
      return Comparison::in;
    }
    if (is_word("between")) {
      ++pos_;
      return Comparison::between;
    }
    if (is_word("not") && is_word("in", 1)) {
      pos_ += 2;
      return Comparison::not_in;
    }
    fail("unsupported comparison");
  }

  Connective conditions(std::vector<Condition>& out, bool having) {
    std::optional<Connective> connective;
    for (;;) {
      if (is_word("not")) fail("NOT before a condition is not supported");
      if (is_symbol("(") && !is_word("select", 1)) fail("parenthesized conditions are not supported");
      Condition c;
      std::tie(c.agg, c.column) = expr();
      if (!having && c.agg != Aggregator::none) fail("aggregate in WHERE is not supported");
      c.cmp = comparison();
      c.rhs = rhs(c.cmp);
      out.push_back(std::move(c));
      std::optional<Connective> next;
      if (is_word("and")) next = Connective::and_;
      if (is_word("or")) next = Connective::or_;
      if (!next) break;
      if (having && *next == Connective::or_) fail("OR in HAVING is not supported");
      if (connective && *connective != *next) fail("mixed AND/OR is not supported");
      connective = next;
      ++pos_;
    }
    return connective.value_or(Connective::and_);
  }

  std::vector<Tok> toks_;
  const Schema& schema_;
  std::size_t pos_ = 0;
  Scope scope_;
};

}  // namespace

SqlAst parse(std::string_view sql, const Schema& schema) { return Parser(sql, schema).run(); }

}  // namespace recsql::sql
