#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace mer::text {

struct SentimentScores {
  double neg = 0.0;
  double neu = 0.0;
  double pos = 0.0;
  double compound = 0.0;
};

/// Word valences plus the booster and negation vocabularies used by the
/// rule-based scorer.
///
/// File format: one `word<TAB>rating` entry per line (extra tab-separated
/// columns are ignored, as in the public VADER lexicon). A line `[boosters]`
/// switches to `word<TAB>increment` entries and `[negations]` to one word per
/// line; either section, when present, replaces the built-in defaults.
/// Lexicon keys are stored verbatim and looked up in lowercase.
class SentimentLexicon {
 public:
  static SentimentLexicon load(const std::filesystem::path& path);
  static SentimentLexicon parse(std::string_view contents);
  static SentimentLexicon from_ratings(std::unordered_map<std::string, double> ratings);

  const std::unordered_map<std::string, double>& ratings() const { return ratings_; }
  const std::unordered_map<std::string, double>& boosters() const { return boosters_; }
  const std::unordered_set<std::string>& negations() const { return negations_; }

  const double* rating(const std::string& word) const {
    auto it = ratings_.find(word);
    return it == ratings_.end() ? nullptr : &it->second;
  }
  bool contains(const std::string& word) const { return ratings_.contains(word); }

  static const std::unordered_map<std::string, double>& default_boosters();
  static const std::unordered_set<std::string>& default_negations();

 private:
  std::unordered_map<std::string, double> ratings_;
  std::unordered_map<std::string, double> boosters_;
  std::unordered_set<std::string> negations_;
};

/// Rule-based lexicon sentiment in the VADER formulation.
///
/// Per-token valence from the lexicon, adjusted by booster/dampener words up
/// to three tokens back (scaled 1, 0.95, 0.9), ALL-CAPS emphasis when only
/// some tokens are capitalised, negation in the same window (x -0.74), the
/// "but" contrast rule, "least" and idiom special cases, and exclamation or
/// question-mark emphasis. compound = S / sqrt(S^2 + 15) clamped to [-1, 1];
/// neg/neu/pos are proportions of negative, neutral and positive mass.
/// Scores are returned unrounded. Empty or whitespace-only text scores all
/// zero.
SentimentScores vader_sentiment(std::string_view text, const SentimentLexicon& lexicon);

}  // namespace mer::text
