#pragma once

#include "mer/common.hpp"
#include "mer/text/tokenize.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mer::text {

// Word-level valence/arousal norms on the source 1-9 scale.
class AffectLexicon {
 public:
  struct Entry {
    std::string word;
    double valence;
    double arousal;
  };

  // CSV with a header naming at least `word`, `valence_mean` and
  // `arousal_mean` (any order, extra columns ignored).
  static AffectLexicon load(const std::filesystem::path& path);
  static AffectLexicon parse(std::string_view csv);
  static AffectLexicon from_entries(std::vector<Entry> entries);

  Index size() const { return static_cast<Index>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }
  const Vector& valence() const { return valence_; }
  const Vector& arousal() const { return arousal_; }
  // Column of `word`, or -1.
  Index find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
  }

 private:
  std::vector<std::string> words_;  // sorted
  std::unordered_map<std::string, Index> index_;
  Vector valence_;
  Vector arousal_;
};

struct AffectFeatures {
  Vector valence;  // count(w) * valence(w), one entry per lexicon word
  Vector arousal;  // count(w) * arousal(w)
};

/// Counts lexicon words in a document and weights the counts by the word
/// norms. A token matches through its lemma, or its surface form when the
/// lemma is not a lexicon entry.
AffectFeatures xanew_features(const TokenSequence& doc, const AffectLexicon& lexicon);

}  // namespace mer::text
