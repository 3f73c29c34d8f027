#pragma once

#include "mer/common.hpp"
#include "mer/text/tokenize.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mer::text {

struct VocabularyModel {
  std::vector<std::string> terms;  // column order, sorted lexicographically
  std::unordered_map<std::string, Index> index;
  Vector idf;
  std::size_t n_docs = 0;

  Index size() const { return static_cast<Index>(terms.size()); }

  nlohmann::json to_json() const;
  static VocabularyModel from_json(const nlohmann::json& j);
};

inline constexpr std::size_t kDefaultMaxVocabulary = 20000;

/// Builds a lemma-unigram vocabulary with smoothed inverse document
/// frequency idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1.
///
/// When more than `max_vocab` distinct lemmas occur, the ones with the
/// highest document frequency are kept (lexicographically smaller term
/// first on ties). Throws InvalidArgument if every document is empty.
VocabularyModel fit_tfidf(std::span<const TokenSequence> train_docs, std::size_t max_vocab = kDefaultMaxVocabulary);

/// Raw count times idf per vocabulary term, then L2-normalised.
/// Out-of-vocabulary lemmas are ignored; a document with no in-vocabulary
/// lemma maps to the zero vector.
Vector transform_tfidf(const TokenSequence& doc, const VocabularyModel& vocabulary);

/// Row-stacked transform_tfidf over many documents.
Matrix transform_tfidf(std::span<const TokenSequence> docs, const VocabularyModel& vocabulary);

}  // namespace mer::text
