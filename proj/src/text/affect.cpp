#include "mer/text/affect.hpp"

#include "mer/util/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace mer::text {
namespace {

std::string lower_trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

double parse_score(const std::string& field, std::size_t line) {
  double v = 0.0;
  const std::string f = lower_trim(field);
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
    throw IngestError("affect lexicon line " + std::to_string(line) + ": bad score '" + field + "'");
  }
  return v;
}

}  // namespace

AffectLexicon AffectLexicon::parse(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw IngestError("affect lexicon is empty");
  const auto& header = rows.front().fields;
  auto column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (lower_trim(header[i]) == name) return i;
    throw IngestError("affect lexicon header lacks column '" + std::string(name) + "'");
  };
  const std::size_t word_col = column("word");
  const std::size_t val_col = column("valence_mean");
  const std::size_t aro_col = column("arousal_mean");
  const std::size_t needed = std::max({word_col, val_col, aro_col}) + 1;

  std::vector<Entry> entries;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() < needed) {
      throw IngestError("affect lexicon line " + std::to_string(rows[r].line) + ": expected at least " +
                        std::to_string(needed) + " fields");
    }
    entries.push_back({lower_trim(f[word_col]), parse_score(f[val_col], rows[r].line),
                       parse_score(f[aro_col], rows[r].line)});
  }
  return from_entries(std::move(entries));
}

AffectLexicon AffectLexicon::load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

AffectLexicon AffectLexicon::from_entries(std::vector<Entry> entries) {
  if (entries.empty()) throw InvalidArgument("affect lexicon has no entries");
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.word < b.word; });
  AffectLexicon lex;
  lex.valence_.resize(static_cast<Index>(entries.size()));
  lex.arousal_.resize(static_cast<Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& e = entries[i];
    if (e.word.empty()) throw InvalidArgument("affect lexicon has an empty word");
    if (!std::isfinite(e.valence) || !std::isfinite(e.arousal)) {
      throw InvalidArgument("affect lexicon has non-finite scores for '" + e.word + "'");
    }
    const auto col = static_cast<Index>(i);
    if (!lex.index_.emplace(e.word, col).second) throw InvalidArgument("affect lexicon repeats '" + e.word + "'");
    lex.valence_(col) = e.valence;
    lex.arousal_(col) = e.arousal;
    lex.words_.push_back(std::move(e.word));
  }
  return lex;
}

AffectFeatures xanew_features(const TokenSequence& doc, const AffectLexicon& lexicon) {
  Vector counts = Vector::Zero(lexicon.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    Index col = lexicon.find(doc.lemmas[i]);
    if (col < 0) col = lexicon.find(doc.tokens[i]);
    if (col >= 0) counts(col) += 1.0;
  }
  return {counts.cwiseProduct(lexicon.valence()), counts.cwiseProduct(lexicon.arousal())};
}

}  // namespace mer::text
