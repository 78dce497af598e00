#pragma once

#include <memory>
#include <vector>

#include "recsql/schema.hpp"
#include "recsql/sql/operators.hpp"

// Query tree over global schema column indices (0 is "*"). Literals are not
// stored: every value is the [VAR] placeholder.

namespace recsql::sql {

/// Owning pointer with value semantics, used for recursive members.
template <typename T>
class Boxed {
 public:
  Boxed() = default;
  explicit Boxed(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Boxed(const Boxed& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Boxed(Boxed&&) noexcept = default;
  Boxed& operator=(const Boxed& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Boxed& operator=(Boxed&&) noexcept = default;
  ~Boxed() = default;

  explicit operator bool() const noexcept { return static_cast<bool>(ptr_); }
  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }
  T* get() noexcept { return ptr_.get(); }
  const T* get() const noexcept { return ptr_.get(); }
  void reset() noexcept { ptr_.reset(); }

  friend bool operator==(const Boxed& a, const Boxed& b) {
    if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
    return *a.ptr_ == *b.ptr_;
  }

 private:
  std::unique_ptr<T> ptr_;
};

struct SqlAst;

/// Right-hand side of a condition or set operation.
struct Rhs {
  enum class Kind { value, placeholder, query };
  Kind kind = Kind::value;
  Boxed<SqlAst> query;  // set iff kind == query

  static Rhs value();
  static Rhs placeholder();
  static Rhs nested(SqlAst ast);
  friend bool operator==(const Rhs&, const Rhs&) = default;
};

struct SelectItem {
  Aggregator agg = Aggregator::none;
  int column = Schema::kStar;
  friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

struct Condition {
  Aggregator agg = Aggregator::none;  // HAVING only
  int column = Schema::kStar;
  Comparison cmp = Comparison::eq;
  Rhs rhs;
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct OrderItem {
  Aggregator agg = Aggregator::none;
  int column = Schema::kStar;
  Direction dir = Direction::asc;
  friend bool operator==(const OrderItem&, const OrderItem&) = default;
};

/// left = right, with `left` owned by the table that comes first in FROM.
struct JoinCondition {
  int left = 0;
  int right = 0;
  friend bool operator==(const JoinCondition&, const JoinCondition&) = default;
};

/// Tables in alias order (T1..Tn) and join conditions sorted by the position
/// of the later table they touch.
struct JoinTree {
  std::vector<int> tables;
  std::vector<JoinCondition> conditions;
  friend bool operator==(const JoinTree&, const JoinTree&) = default;
};

struct SqlAst {
  std::vector<SelectItem> select;
  JoinTree from;
  std::vector<Condition> where;
  Connective where_connective = Connective::and_;  // and_ unless >= 2 conditions
  std::vector<int> group_by;
  std::vector<Condition> having;  // always joined with AND
  std::vector<OrderItem> order_by;
  bool limit = false;
  SetOp set_op = SetOp::none;
  Rhs set_rhs;  // value when set_op == none

  friend bool operator==(const SqlAst&, const SqlAst&) = default;
};

/// Placeholders at this level in left-to-right order: WHERE, HAVING, set operation.
std::vector<Rhs*> placeholders(SqlAst& ast);
std::size_t placeholder_count(const SqlAst& ast);  // recursive
/// Number of nested queries (condition sub-queries and set-operation operands), recursive.
std::size_t nested_count(const SqlAst& ast);

/// True when no placeholder remains anywhere in the tree.
bool finalized(const SqlAst& ast);

/// Checks the structural invariants (non-empty SELECT, resolvable columns,
/// HAVING implies GROUP BY, consistent set operation). Throws AssemblyError.
/// FROM is checked only when non-empty.
void validate(const SqlAst& ast, const Schema& schema);

}  // namespace recsql::sql
