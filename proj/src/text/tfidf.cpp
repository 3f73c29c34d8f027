#include "mer/text/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace mer::text {

VocabularyModel fit_tfidf(std::span<const TokenSequence> train_docs, std::size_t max_vocab) {
  if (max_vocab == 0) throw InvalidArgument("max_vocab must be positive");
  std::unordered_map<std::string, std::size_t> df;
  bool any_token = false;
  for (const auto& doc : train_docs) {
    std::unordered_set<std::string_view> seen;
    for (const auto& lemma : doc.lemmas) {
      any_token = true;
      if (seen.insert(lemma).second) ++df[lemma];
    }
  }
  if (!any_token) throw InvalidArgument("cannot fit TF-IDF: every training document is empty");

  std::vector<std::pair<std::string, std::size_t>> entries(df.begin(), df.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (entries.size() > max_vocab) entries.resize(max_vocab);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  VocabularyModel model;
  model.n_docs = train_docs.size();
  model.idf.resize(static_cast<Index>(entries.size()));
  const double n = static_cast<double>(model.n_docs);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto col = static_cast<Index>(i);
    model.index.emplace(entries[i].first, col);
    model.idf(col) = std::log((1.0 + n) / (1.0 + static_cast<double>(entries[i].second))) + 1.0;
    model.terms.push_back(std::move(entries[i].first));
  }
  return model;
}

Vector transform_tfidf(const TokenSequence& doc, const VocabularyModel& vocabulary) {
  Vector row = Vector::Zero(vocabulary.size());
  for (const auto& lemma : doc.lemmas) {
    if (auto it = vocabulary.index.find(lemma); it != vocabulary.index.end()) row(it->second) += 1.0;
  }
  row.array() *= vocabulary.idf.array();
  const double norm = row.norm();
  if (norm > 0.0) row /= norm;
  return row;
}

Matrix transform_tfidf(std::span<const TokenSequence> docs, const VocabularyModel& vocabulary) {
  Matrix out(static_cast<Index>(docs.size()), vocabulary.size());
  for (std::size_t i = 0; i < docs.size(); ++i) out.row(static_cast<Index>(i)) = transform_tfidf(docs[i], vocabulary).transpose();
  return out;
}

nlohmann::json VocabularyModel::to_json() const {
  nlohmann::json j;
  j["format"] = "mer.tfidf_vocabulary";
  j["version"] = 1;
  j["n_docs"] = n_docs;
  j["terms"] = terms;
  j["idf"] = std::vector<double>(idf.data(), idf.data() + idf.size());
  return j;
}

VocabularyModel VocabularyModel::from_json(const nlohmann::json& j) {
  if (j.at("format") != "mer.tfidf_vocabulary" || j.at("version") != 1) {
    throw InvalidArgument("not a version-1 TF-IDF vocabulary artifact");
  }
  VocabularyModel m;
  m.n_docs = j.at("n_docs").get<std::size_t>();
  m.terms = j.at("terms").get<std::vector<std::string>>();
  const auto idf = j.at("idf").get<std::vector<double>>();
  if (idf.size() != m.terms.size()) throw InvalidArgument("vocabulary artifact has inconsistent lengths");
  m.idf = Eigen::Map<const Vector>(idf.data(), static_cast<Index>(idf.size()));
  for (std::size_t i = 0; i < m.terms.size(); ++i) {
    if (!m.index.emplace(m.terms[i], static_cast<Index>(i)).second) {
      throw InvalidArgument("vocabulary artifact repeats term '" + m.terms[i] + "'");
    }
  }
  return m;
}

}  // namespace mer::text
