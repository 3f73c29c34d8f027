#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mer::text {

struct TokenSequence {
  std::vector<std::string> tokens;  // lowercased surface forms
  std::vector<std::string> lemmas;  // same length as tokens

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

/// Splits text into lowercase word tokens and lemmatizes each one.
///
/// Word characters are ASCII letters and any non-ASCII UTF-8 byte, so
/// accented words stay whole. An apostrophe (ASCII, or U+2019 rewritten to
/// ASCII) is kept only between two word characters; everything else
/// separates tokens.
TokenSequence tokenize_lemmatize(std::string_view text);

/// Lemma of one lowercase word: an exception dictionary of irregular forms,
/// then English suffix rules (plural -s/-es/-ies, -ing, -ed, comparative
/// -er/-est) applied until the word stops changing. The result is always a
/// fixed point, so lemmatizing a lemma returns it unchanged.
std::string lemmatize_word(std::string_view word);

}  // namespace mer::text
