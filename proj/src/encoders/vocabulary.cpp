#include "recsql/encoders/vocabulary.hpp"

#include <array>
#include <cctype>

namespace recsql::encoders {

namespace {

constexpr std::array<std::string_view, 3> kBracketed = {"[SEP]", "[SUB_QUERY]", "[VAR]"};

bool is_word_char(unsigned char ch) { return std::isalnum(ch) || ch >= 0x80; }
bool is_upper(unsigned char ch) { return ch < 0x80 && std::isupper(ch); }
bool is_lower(unsigned char ch) { return ch < 0x80 && std::islower(ch); }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// camelCase / PascalCase / ACRONYMWord split of one alphanumeric run.
void split_camel(std::string_view run, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < run.size(); ++i) {
    const auto prev = static_cast<unsigned char>(run[i - 1]);
    const auto cur = static_cast<unsigned char>(run[i]);
    const bool lower_to_upper = is_lower(prev) && is_upper(cur);
    const bool acronym_end = is_upper(prev) && is_upper(cur) && i + 1 < run.size() &&
                             is_lower(static_cast<unsigned char>(run[i + 1]));
    if (lower_to_upper || acronym_end) {
      out.push_back(lower(run.substr(start, i - start)));
      start = i;
    }
  }
  out.push_back(lower(run.substr(start)));
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto ch = static_cast<unsigned char>(text[i]);
    if (ch == '[') {
      bool matched = false;
      for (auto reserved : kBracketed) {
        if (text.size() - i >= reserved.size() && iequals(text.substr(i, reserved.size()), reserved)) {
          out.emplace_back(reserved);
          i += reserved.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      ++i;
    } else if (ch == '*') {
      out.emplace_back("*");
      ++i;
    } else if (is_word_char(ch)) {
      std::size_t j = i;
      while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
      split_camel(text.substr(i, j - i), out);
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

Vocabulary::Vocabulary() {
  for (std::string_view w : {"[PAD]", "[OOV]", "[SEP]", "[SUB_QUERY]", "[VAR]", "*", "[TYPE_TEXT]",
                             "[TYPE_NUMBER]", "[TYPE_TIME]", "[TYPE_BOOLEAN]", "[TYPE_OTHER]"}) {
    add(w);
  }
}

int Vocabulary::add(std::string_view word) {
  std::string key(word);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const int id = size();
  words_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

int Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kOov : it->second;
}

std::vector<Token> Vocabulary::encode(const std::vector<std::string>& words) const {
  std::vector<Token> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back({w, id(w)});
  return out;
}

std::vector<int> Vocabulary::ids(const std::vector<std::string>& words) const {
  std::vector<int> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(id(w));
  return out;
}

std::vector<Token> tokenize(std::string_view text, const Vocabulary& vocab) {
  return vocab.encode(split_words(text));
}

}  // namespace recsql::encoders
