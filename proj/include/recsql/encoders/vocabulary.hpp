#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recsql/schema.hpp"

namespace recsql::encoders {

struct Token {
  std::string surface;
  int id = 0;
  friend bool operator==(const Token&, const Token&) = default;
};

/// Lowercased words split on whitespace, punctuation, '_' and camelCase
/// boundaries. "*" and the bracketed reserved tokens ([SEP], [SUB_QUERY],
/// [VAR], case-insensitive) survive as single words.
std::vector<std::string> split_words(std::string_view text);

/// Word <-> id table with reserved entries at fixed ids.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOov = 1;
  static constexpr int kSep = 2;
  static constexpr int kSubQuery = 3;
  static constexpr int kVar = 4;
  static constexpr int kStar = 5;
  static constexpr int kFirstType = 6;  // one reserved id per ColumnType
  static constexpr int kReservedCount = kFirstType + 5;

  Vocabulary();

  /// Returns the id of `word`, inserting it if new.
  int add(std::string_view word);
  int id(std::string_view word) const;
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  int size() const noexcept { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const noexcept { return words_; }

  static int type_token(ColumnType type) { return kFirstType + static_cast<int>(type); }

  std::vector<Token> encode(const std::vector<std::string>& words) const;
  std::vector<int> ids(const std::vector<std::string>& words) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

/// split_words followed by vocabulary lookup; unknown words map to OOV.
std::vector<Token> tokenize(std::string_view text, const Vocabulary& vocab);

}  // namespace recsql::encoders
