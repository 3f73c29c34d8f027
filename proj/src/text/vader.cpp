#include "mer/text/vader.hpp"

#include "mer/common.hpp"
#include "mer/util/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace mer::text {
namespace {

constexpr double kBoosterIncrement = 0.293;
constexpr double kBoosterDecrement = -0.293;
constexpr double kCapsIncrement = 0.733;
constexpr double kNegationScalar = -0.74;
constexpr double kNormalizationAlpha = 15.0;

const std::unordered_map<std::string, double>& special_cases() {
  static const std::unordered_map<std::string, double> table = {
      {"the shit", 3.0}, {"the bomb", 3.0},      {"bad ass", 1.5},       {"badass", 1.5},
      {"bus stop", 0.0}, {"yeah right", -2.0},   {"kiss of death", -1.5}, {"to die for", 3.0},
      {"beating heart", 3.5},
  };
  return table;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' ||
         (c >= '\x1c' && c <= '\x1f');
}

bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// At least one uppercase letter and no lowercase ones.
bool is_upper(std::string_view s) {
  bool cased = false;
  for (char c : s) {
    if (c >= 'a' && c <= 'z') return false;
    if (c >= 'A' && c <= 'Z') cased = true;
  }
  return cased;
}

// Strip surrounding punctuation unless that leaves two or fewer characters,
// which keeps emoticons such as ":)" intact.
std::string strip_punctuation_if_word(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && is_ascii_punct(token[b])) ++b;
  while (e > b && is_ascii_punct(token[e - 1])) --e;
  const std::string_view stripped = token.substr(b, e - b);
  if (code_points(stripped) <= 2) return std::string(token);
  return std::string(stripped);
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) words.push_back(strip_punctuation_if_word(text.substr(start, i - start)));
  }
  return words;
}

bool cap_differential(const std::vector<std::string>& words) {
  const auto caps = static_cast<std::size_t>(std::count_if(words.begin(), words.end(), [](const auto& w) { return is_upper(w); }));
  const std::size_t diff = words.size() - caps;
  return diff > 0 && diff < words.size();
}

class Scorer {
 public:
  Scorer(const SentimentLexicon& lexicon, std::vector<std::string> words)
      : lex_(lexicon), words_(std::move(words)), caps_diff_(cap_differential(words_)) {
    lower_.reserve(words_.size());
    for (const auto& w : words_) lower_.push_back(to_lower(w));
  }

  std::vector<double> token_valences() const {
    std::vector<double> sentiments;
    sentiments.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (lex_.boosters().contains(lower_[i])) {
        sentiments.push_back(0.0);
        continue;
      }
      if (i + 1 < words_.size() && lower_[i] == "kind" && lower_[i + 1] == "of") {
        sentiments.push_back(0.0);
        continue;
      }
      sentiments.push_back(valence_at(i));
    }
    but_rule(sentiments);
    return sentiments;
  }

 private:
  bool negated(const std::string& lower_word) const {
    return lex_.negations().contains(lower_word) || lower_word.find("n't") != std::string::npos;
  }

  double booster_scalar(std::size_t j, double valence) const {
    auto it = lex_.boosters().find(lower_[j]);
    if (it == lex_.boosters().end()) return 0.0;
    double scalar = it->second;
    if (valence < 0.0) scalar = -scalar;
    if (is_upper(words_[j]) && caps_diff_) scalar += valence > 0.0 ? kCapsIncrement : -kCapsIncrement;
    return scalar;
  }

  double valence_at(std::size_t i) const {
    const double* rating = lex_.rating(lower_[i]);
    if (rating == nullptr) return 0.0;
    double valence = *rating;
    const std::size_t n = words_.size();

    if (lower_[i] == "no" && i + 1 != n && lex_.contains(lower_[i + 1])) valence = 0.0;
    if ((i > 0 && lower_[i - 1] == "no") || (i > 1 && lower_[i - 2] == "no") ||
        (i > 2 && lower_[i - 3] == "no" && (lower_[i - 1] == "or" || lower_[i - 1] == "nor"))) {
      valence = *rating * kNegationScalar;
    }

    if (is_upper(words_[i]) && caps_diff_) valence += valence > 0.0 ? kCapsIncrement : -kCapsIncrement;

    for (std::size_t start = 0; start < 3; ++start) {
      if (i > start && !lex_.contains(lower_[i - (start + 1)])) {
        double s = booster_scalar(i - (start + 1), valence);
        if (start == 1 && s != 0.0) s *= 0.95;
        if (start == 2 && s != 0.0) s *= 0.9;
        valence += s;
        valence = negation_rule(valence, start, i);
        if (start == 2) valence = idiom_rule(valence, i);
      }
    }
    return least_rule(valence, i);
  }

  double negation_rule(double valence, std::size_t start, std::size_t i) const {
    const auto& w = lower_;
    if (start == 0) {
      if (negated(w[i - 1])) valence *= kNegationScalar;
    } else if (start == 1) {
      if (w[i - 2] == "never" && (w[i - 1] == "so" || w[i - 1] == "this")) {
        valence *= 1.25;
      } else if (w[i - 2] == "without" && w[i - 1] == "doubt") {
      } else if (negated(w[i - 2])) {
        valence *= kNegationScalar;
      }
    } else {
      // Grouping mirrors the reference: (never && (so|this)) || (so|this one back).
      if ((w[i - 3] == "never" && (w[i - 2] == "so" || w[i - 2] == "this")) || (w[i - 1] == "so" || w[i - 1] == "this")) {
        valence *= 1.25;
      } else if (w[i - 3] == "without" && (w[i - 2] == "doubt" || w[i - 1] == "doubt")) {
      } else if (negated(w[i - 3])) {
        valence *= kNegationScalar;
      }
    }
    return valence;
  }

  double idiom_rule(double valence, std::size_t i) const {
    const auto& w = lower_;
    const auto& cases = special_cases();
    const std::string onezero = w[i - 1] + " " + w[i];
    const std::string twoonezero = w[i - 2] + " " + w[i - 1] + " " + w[i];
    const std::string twoone = w[i - 2] + " " + w[i - 1];
    const std::string threetwoone = w[i - 3] + " " + w[i - 2] + " " + w[i - 1];
    const std::string threetwo = w[i - 3] + " " + w[i - 2];
    for (const std::string* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
      if (auto it = cases.find(*seq); it != cases.end()) {
        valence = it->second;
        break;
      }
    }
    if (w.size() - 1 > i) {
      if (auto it = cases.find(w[i] + " " + w[i + 1]); it != cases.end()) valence = it->second;
    }
    if (w.size() - 1 > i + 1) {
      if (auto it = cases.find(w[i] + " " + w[i + 1] + " " + w[i + 2]); it != cases.end()) valence = it->second;
    }
    for (const std::string* gram : {&threetwoone, &threetwo, &twoone}) {
      if (auto it = lex_.boosters().find(*gram); it != lex_.boosters().end()) valence += it->second;
    }
    return valence;
  }

  double least_rule(double valence, std::size_t i) const {
    const auto& w = lower_;
    if (i > 1 && !lex_.contains(w[i - 1]) && w[i - 1] == "least") {
      if (w[i - 2] != "at" && w[i - 2] != "very") valence *= kNegationScalar;
    } else if (i > 0 && !lex_.contains(w[i - 1]) && w[i - 1] == "least") {
      valence *= kNegationScalar;
    }
    return valence;
  }

  // Halve sentiment before the first "but" and amplify it after. Each value
  // is rewritten at the first position holding an equal value, which is
  // how the reference implementation behaves when values repeat.
  void but_rule(std::vector<double>& s) const {
    auto it = std::find(lower_.begin(), lower_.end(), "but");
    if (it == lower_.end()) return;
    const auto bi = static_cast<std::size_t>(it - lower_.begin());
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double value = s[k];
      const auto si = static_cast<std::size_t>(std::find(s.begin(), s.end(), value) - s.begin());
      if (si < bi) {
        s[si] = value * 0.5;
      } else if (si > bi) {
        s[si] = value * 1.5;
      }
    }
  }

  const SentimentLexicon& lex_;
  std::vector<std::string> words_;
  std::vector<std::string> lower_;
  bool caps_diff_;
};

double punctuation_emphasis(std::string_view text) {
  const auto bangs = std::min<std::ptrdiff_t>(std::count(text.begin(), text.end(), '!'), 4);
  const auto questions = std::count(text.begin(), text.end(), '?');
  double amplifier = static_cast<double>(bangs) * 0.292;
  if (questions > 1) amplifier += questions <= 3 ? static_cast<double>(questions) * 0.18 : 0.96;
  return amplifier;
}

double normalize(double score) {
  const double norm = score / std::sqrt(score * score + kNormalizationAlpha);
  return std::clamp(norm, -1.0, 1.0);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto f = trim(field);
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(value)) {
    throw IngestError("sentiment lexicon line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

const std::unordered_map<std::string, double>& SentimentLexicon::default_boosters() {
  constexpr double up = kBoosterIncrement;
  constexpr double down = kBoosterDecrement;
  static const std::unordered_map<std::string, double> table = {
      {"absolutely", up}, {"amazingly", up}, {"awfully", up}, {"completely", up}, {"considerable", up},
      {"considerably", up}, {"decidedly", up}, {"deeply", up}, {"effing", up}, {"enormous", up},
      {"enormously", up}, {"entirely", up}, {"especially", up}, {"exceptional", up}, {"exceptionally", up},
      {"extreme", up}, {"extremely", up}, {"fabulously", up}, {"flipping", up}, {"flippin", up},
      {"frackin", up}, {"fracking", up}, {"fricking", up}, {"frickin", up}, {"frigging", up},
      {"friggin", up}, {"fully", up}, {"fuckin", up}, {"fucking", up}, {"fuggin", up}, {"fugging", up},
      {"greatly", up}, {"hella", up}, {"highly", up}, {"hugely", up}, {"incredible", up},
      {"incredibly", up}, {"intensely", up}, {"major", up}, {"majorly", up}, {"more", up}, {"most", up},
      {"particularly", up}, {"purely", up}, {"quite", up}, {"really", up}, {"remarkably", up}, {"so", up},
      {"substantially", up}, {"thoroughly", up}, {"total", up}, {"totally", up}, {"tremendous", up},
      {"tremendously", up}, {"uber", up}, {"unbelievably", up}, {"unusually", up}, {"utter", up},
      {"utterly", up}, {"very", up},
      {"almost", down}, {"barely", down}, {"hardly", down}, {"just enough", down}, {"kind of", down},
      {"kinda", down}, {"kindof", down}, {"kind-of", down}, {"less", down}, {"little", down},
      {"marginal", down}, {"marginally", down}, {"occasional", down}, {"occasionally", down},
      {"partly", down}, {"scarce", down}, {"scarcely", down}, {"slight", down}, {"slightly", down},
      {"somewhat", down}, {"sort of", down}, {"sorta", down}, {"sortof", down}, {"sort-of", down},
  };
  return table;
}

const std::unordered_set<std::string>& SentimentLexicon::default_negations() {
  static const std::unordered_set<std::string> words = {
      "aint",    "arent",    "cannot",   "cant",    "couldnt", "darent",  "didnt",   "doesnt",
      "ain't",   "aren't",   "can't",    "couldn't", "daren't", "didn't", "doesn't", "dont",
      "hadnt",   "hasnt",    "havent",   "isnt",    "mightnt", "mustnt",  "neither", "don't",
      "hadn't",  "hasn't",   "haven't",  "isn't",   "mightn't", "mustn't", "neednt", "needn't",
      "never",   "none",     "nope",     "nor",     "not",     "nothing", "nowhere", "oughtnt",
      "shant",   "shouldnt", "uhuh",     "wasnt",   "werent",  "oughtn't", "shan't", "shouldn't",
      "uh-uh",   "wasn't",   "weren't",  "without", "wont",    "wouldnt", "won't",   "wouldn't",
      "rarely",  "seldom",   "despite",
  };
  return words;
}

SentimentLexicon SentimentLexicon::parse(std::string_view contents) {
  SentimentLexicon lex;
  enum class Section { ratings, boosters, negations } section = Section::ratings;
  bool saw_boosters = false;
  bool saw_negations = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = trim(contents.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == contents.size()) break;
      continue;
    }
    if (line == "[boosters]") {
      section = Section::boosters;
      saw_boosters = true;
      continue;
    }
    if (line == "[negations]") {
      section = Section::negations;
      saw_negations = true;
      continue;
    }
    if (line == "[ratings]") {
      section = Section::ratings;
      continue;
    }
    if (section == Section::negations) {
      lex.negations_.insert(to_lower(line));
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw IngestError("sentiment lexicon line " + std::to_string(line_no) + ": expected word<TAB>value");
    }
    const std::string word(line.substr(0, tab));
    std::string_view rest = line.substr(tab + 1);
    rest = rest.substr(0, rest.find('\t'));
    const double value = parse_number(rest, line_no);
    if (section == Section::ratings) {
      lex.ratings_[word] = value;
    } else {
      lex.boosters_[to_lower(word)] = value;
    }
  }
  if (lex.ratings_.empty()) throw IngestError("sentiment lexicon has no ratings");
  if (!saw_boosters) lex.boosters_ = default_boosters();
  if (!saw_negations) lex.negations_ = default_negations();
  return lex;
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  return parse(read_text_file(path));
}

SentimentLexicon SentimentLexicon::from_ratings(std::unordered_map<std::string, double> ratings) {
  if (ratings.empty()) throw InvalidArgument("sentiment lexicon has no ratings");
  for (const auto& [word, value] : ratings) {
    if (!std::isfinite(value)) throw InvalidArgument("non-finite rating for '" + word + "'");
  }
  SentimentLexicon lex;
  lex.ratings_ = std::move(ratings);
  lex.boosters_ = default_boosters();
  lex.negations_ = default_negations();
  return lex;
}

SentimentScores vader_sentiment(std::string_view text, const SentimentLexicon& lexicon) {
  text = trim(text);
  auto words = split_words(text);
  if (words.empty()) return {};

  const Scorer scorer(lexicon, std::move(words));
  const std::vector<double> sentiments = scorer.token_valences();

  double sum = 0.0;
  for (double s : sentiments) sum += s;
  const double emphasis = punctuation_emphasis(text);
  if (sum > 0.0) {
    sum += emphasis;
  } else if (sum < 0.0) {
    sum -= emphasis;
  }

  double pos_sum = 0.0;
  double neg_sum = 0.0;
  double neutral = 0.0;
  for (double s : sentiments) {
    if (s > 0.0) pos_sum += s + 1.0;
    if (s < 0.0) neg_sum += s - 1.0;
    if (s == 0.0) neutral += 1.0;
  }
  if (pos_sum > std::fabs(neg_sum)) {
    pos_sum += emphasis;
  } else if (pos_sum < std::fabs(neg_sum)) {
    neg_sum -= emphasis;
  }
  const double total = pos_sum + std::fabs(neg_sum) + neutral;

  SentimentScores scores;
  scores.compound = normalize(sum);
  scores.pos = std::fabs(pos_sum / total);
  scores.neg = std::fabs(neg_sum / total);
  scores.neu = std::fabs(neutral / total);
  return scores;
}

}  // namespace mer::text
