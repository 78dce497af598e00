#pragma once

#include <string>
#include <string_view>

#include "recsql/schema.hpp"
#include "recsql/sql/ast.hpp"

namespace recsql::sql {

/// Canonical text: uppercase keywords, lowercase aggregate functions, single
/// spaces, "T<k>.col" qualification when FROM has more than one table,
/// literals as "[VAR]", placeholders as [SUB_QUERY], explicit ASC/DESC.
/// Nested queries number their aliases from T1 again.
std::string serialize(const SqlAst& ast, const Schema& schema);

/// Parses the supported subset: SELECT / FROM with JOIN [ON] / WHERE /
/// GROUP BY / HAVING / ORDER BY / LIMIT, nesting in conditions, INTERSECT /
/// UNION / EXCEPT. Literals become [VAR]. Throws ParseError naming the
/// offending token for anything outside the subset (DISTINCT, mixed AND/OR,
/// OR in HAVING, aggregates in WHERE, column-to-column predicates, self joins).
SqlAst parse(std::string_view sql, const Schema& schema);

/// serialize(parse(sql)).
std::string canonicalize(std::string_view sql, const Schema& schema);

}  // namespace recsql::sql
