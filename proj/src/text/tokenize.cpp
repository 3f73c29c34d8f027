#include "mer/text/tokenize.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace mer::text {
namespace {

// Irregular forms. Every value must itself be a fixed point of the rules.
const std::unordered_map<std::string, std::string>& exceptions() {
  static const std::unordered_map<std::string, std::string> table = {
      {"am", "be"}, {"is", "be"}, {"are", "be"}, {"was", "be"}, {"were", "be"}, {"been", "be"},
      {"being", "be"}, {"has", "have"}, {"had", "have"}, {"having", "have"}, {"does", "do"},
      {"did", "do"}, {"done", "do"}, {"doing", "do"}, {"goes", "go"}, {"went", "go"},
      {"gone", "go"}, {"going", "go"}, {"men", "man"}, {"women", "woman"}, {"children", "child"},
      {"feet", "foot"}, {"teeth", "tooth"}, {"mice", "mouse"}, {"wolves", "wolf"}, {"knives", "knife"},
      {"wives", "wife"}, {"ourselves", "ourselves"}, {"themselves", "themselves"},
      {"yourselves", "yourselves"}, {"made", "make"}, {"said", "say"}, {"saw", "see"},
      {"seen", "see"}, {"came", "come"}, {"took", "take"}, {"taken", "take"}, {"gave", "give"},
      {"given", "give"}, {"knew", "know"}, {"known", "know"}, {"thought", "think"},
      {"told", "tell"}, {"felt", "feel"}, {"found", "find"}, {"got", "get"}, {"gotten", "get"},
      {"ran", "run"}, {"began", "begin"}, {"begun", "begin"}, {"broke", "break"},
      {"broken", "break"}, {"fell", "fall"}, {"fallen", "fall"}, {"held", "hold"},
      {"kept", "keep"}, {"lost", "lose"}, {"met", "meet"}, {"paid", "pay"}, {"sang", "sing"},
      {"sung", "sing"}, {"sat", "sit"}, {"spoke", "speak"}, {"spoken", "speak"},
      {"stood", "stand"}, {"wore", "wear"}, {"worn", "wear"}, {"won", "win"}, {"wrote", "write"},
      {"written", "write"}, {"drove", "drive"}, {"driven", "drive"}, {"flew", "fly"},
      {"flown", "fly"}, {"grew", "grow"}, {"grown", "grow"}, {"threw", "throw"},
      {"thrown", "throw"}, {"bought", "buy"}, {"brought", "bring"}, {"caught", "catch"},
      {"fought", "fight"}, {"taught", "teach"}, {"sought", "seek"}, {"heard", "hear"},
      {"meant", "mean"}, {"slept", "sleep"}, {"wept", "weep"}, {"understood", "understand"},
      {"forgot", "forget"}, {"forgotten", "forget"}, {"hid", "hide"}, {"hidden", "hide"},
      {"rode", "ride"}, {"ridden", "ride"}, {"rose", "rise"}, {"risen", "rise"}, {"shook", "shake"},
      {"shaken", "shake"}, {"swore", "swear"}, {"sworn", "swear"}, {"tore", "tear"},
      {"torn", "tear"}, {"woke", "wake"}, {"woken", "wake"}, {"chose", "choose"},
      {"chosen", "choose"}, {"froze", "freeze"}, {"frozen", "freeze"}, {"bled", "bleed"},
      {"fed", "feed"}, {"led", "lead"}, {"built", "build"}, {"sent", "send"}, {"spent", "spend"},
      {"lent", "lend"}, {"bent", "bend"}, {"left", "leave"}, {"dying", "die"}, {"died", "die"},
      {"lying", "lie"}, {"lied", "lie"}, {"tied", "tie"}, {"tying", "tie"}, {"used", "use"},
      {"using", "use"}, {"agreed", "agree"}, {"freed", "free"}, {"changing", "change"},
      {"changed", "change"}, {"better", "good"}, {"best", "good"}, {"worse", "bad"},
      {"worst", "bad"}, {"heroes", "hero"}, {"tomatoes", "tomato"}, {"potatoes", "potato"},
      {"echoes", "echo"}, {"people", "people"}, {"ain't", "ain't"}, {"can't", "can't"},
      {"won't", "won't"}, {"don't", "don't"},
  };
  return table;
}

// Words that look inflected but are not; left untouched.
const std::unordered_set<std::string>& protected_words() {
  static const std::unordered_set<std::string> words = {
      "always", "perhaps", "yes", "this", "his", "hers", "its", "ours", "yours", "theirs",
      "news", "lens", "series", "species", "physics", "christmas", "whereas", "alas", "nothing",
      "something", "anything", "everything", "morning", "evening", "ceiling", "darling",
      "during", "sterling", "pudding", "wedding", "lightning", "awning", "king", "ring",
      "thing", "sing", "wing", "bring", "string", "spring", "swing", "sting", "cling", "fling",
      "wicked", "naked", "sacred", "hundred", "kindred", "wretched", "crooked", "rugged",
      "ragged", "jagged", "beloved", "indeed", "speed", "bleed", "breed", "greed", "proceed",
      "succeed", "exceed", "soldier", "frontier", "barrier", "premier", "cashier", "honest",
      "forest", "interest", "request", "contest", "modest", "harvest", "protest", "tempest",
      "sometimes", "besides", "towards", "afterwards", "upstairs", "downstairs", "chaos",
      "jeans", "pants", "clothes", "lyrics", "less", "unless", "bless", "ourselves",
      "themselves", "yourselves", "people", "ain't", "can't", "won't", "don't", "hundreds",
  };
  return words;
}

// Comparative and superlative stripping is gated on this list; -er/-est is
// far more often part of a noun ("water", "forest") than a comparison.
const std::unordered_set<std::string>& gradable_adjectives() {
  static const std::unordered_set<std::string> words = {
      "fast", "slow", "strong", "long", "old", "young", "high", "low", "cold", "warm", "dark",
      "bright", "deep", "small", "great", "hard", "soft", "sweet", "kind", "loud", "quick",
      "rich", "poor", "bold", "cool", "wild", "tall", "short", "near", "light", "tight",
      "weak", "clear", "close", "late", "nice", "wise", "brave", "pure", "true", "safe",
      "rare", "strange", "large", "wide", "fine", "free", "simple", "big", "hot", "sad",
      "thin", "fat", "wet", "mad", "red", "dim", "fit", "flat", "glad", "happy", "easy",
      "early", "heavy", "busy", "crazy", "lonely", "pretty", "funny", "angry", "hungry",
      "dirty", "lucky", "silly", "holy", "lovely", "ugly", "tiny", "dry", "shy", "sly",
      "fresh", "proud", "calm", "cheap", "clean", "green", "blue", "black", "white", "grey",
      "gray", "harsh", "kind", "mild", "neat", "plain", "quiet", "rough", "sharp", "smart",
      "soon", "steep", "thick", "tough", "vast", "brief", "bitter", "tender", "clever",
      "gentle", "humble", "noble", "cruel", "deadly", "friendly", "gloomy", "heavy", "merry",
      "sorry", "wealthy", "worthy", "dear", "fair", "few", "full", "new", "raw", "slim",
      "hip", "cute", "brave", "dense", "loose", "lame", "pale", "ripe", "rude", "sane",
      "sore", "sure", "tame", "vague", "wide",
  };
  return words;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// 'y' counts as a vowel except in first position.
bool has_vowel(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_vowel(s[i]) || (i > 0 && s[i] == 'y')) return true;
  }
  return false;
}

int vowel_groups(std::string_view s) {
  int groups = 0;
  bool prev = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool v = is_vowel(s[i]) || (i > 0 && s[i] == 'y');
    if (v && !prev) ++groups;
    prev = v;
  }
  return groups;
}

bool is_consonant_at(std::string_view s, std::size_t i) {
  return !(is_vowel(s[i]) || (i > 0 && s[i] == 'y'));
}

// consonant-vowel-consonant ending, last consonant not w/x/y
bool ends_cvc(std::string_view s) {
  if (s.size() < 3) return false;
  const std::size_t n = s.size();
  const char last = s[n - 1];
  if (last == 'w' || last == 'x' || last == 'y') return false;
  return is_consonant_at(s, n - 3) && !is_consonant_at(s, n - 2) && is_consonant_at(s, n - 1);
}

// Repairs a stem left after removing -ing or -ed.
std::string repair_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant_at(stem, n - 1)) {
    const char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z' && c != 'f') stem.pop_back();
    return stem;
  }
  const char last = stem.back();
  if (last == 'v' || last == 'c' || stem.ends_with("dg") || stem.ends_with("rg")) return stem + "e";
  if (ends_cvc(stem) && vowel_groups(stem) == 1) return stem + "e";
  return stem;
}

bool ascii_lower_only(std::string_view w) {
  return std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string comparative_base(std::string_view stem, bool from_i) {
  const auto& adjectives = gradable_adjectives();
  std::string s(stem);
  if (from_i) {
    // happi -> happy
    if (!s.empty() && s.back() == 'i') {
      s.back() = 'y';
      if (adjectives.contains(s)) return s;
    }
    return {};
  }
  if (adjectives.contains(s)) return s;
  if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2]) {
    std::string undoubled = s.substr(0, s.size() - 1);
    if (adjectives.contains(undoubled)) return undoubled;
  }
  if (adjectives.contains(s + "e")) return s + "e";
  return {};
}

// One rule application; returns the input unchanged when nothing applies.
std::string step(const std::string& w) {
  if (auto it = exceptions().find(w); it != exceptions().end()) return it->second;
  if (protected_words().contains(w)) return w;
  if (w.size() > 2 && w.ends_with("'s")) return w.substr(0, w.size() - 2);
  if (!ascii_lower_only(w)) return w;

  const std::size_t n = w.size();

  // comparatives
  if (n >= 6 && w.ends_with("iest")) {
    if (auto b = comparative_base(w.substr(0, n - 3), true); !b.empty()) return b;
  }
  if (n >= 5 && w.ends_with("ier")) {
    if (auto b = comparative_base(w.substr(0, n - 2), true); !b.empty()) return b;
  }
  if (n >= 5 && w.ends_with("est")) {
    if (auto b = comparative_base(w.substr(0, n - 3), false); !b.empty()) return b;
  }
  if (n >= 4 && w.ends_with("er")) {
    if (auto b = comparative_base(w.substr(0, n - 2), false); !b.empty()) return b;
  }

  // plurals and third person
  if (n > 4 && w.ends_with("ies")) return w.substr(0, n - 3) + "y";
  if (w.ends_with("sses") || w.ends_with("shes") || w.ends_with("ches") || w.ends_with("xes") ||
      w.ends_with("zzes")) {
    return w.substr(0, n - 2);
  }
  if (n > 3 && w.back() == 's' && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is")) {
    return w.substr(0, n - 1);
  }

  // progressive
  if (n >= 5 && w.ends_with("ing")) {
    const std::string stem = w.substr(0, n - 3);
    if (has_vowel(stem)) return repair_stem(stem);
    return w;
  }

  // past tense
  if (n >= 4 && w.ends_with("ed") && !w.ends_with("eed")) {
    std::string stem = w.substr(0, n - 2);
    if (stem.size() >= 3 && stem.back() == 'i') {
      stem.back() = 'y';
      return stem;
    }
    if (stem.size() >= 3 && has_vowel(stem)) return repair_stem(stem);
  }
  return w;
}

bool is_word_byte(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80; }

}  // namespace

std::string lemmatize_word(std::string_view word) {
  std::string current(word);
  for (std::size_t guard = 0; guard <= word.size() + 2; ++guard) {
    std::string next = step(current);
    if (next == current || next.empty()) return current;
    current = std::move(next);
  }
  return current;
}

TokenSequence tokenize_lemmatize(std::string_view text) {
  TokenSequence out;
  std::string token;
  auto flush = [&] {
    while (!token.empty() && token.back() == '\'') token.pop_back();
    if (!token.empty()) {
      out.lemmas.push_back(lemmatize_word(token));
      out.tokens.push_back(std::move(token));
    }
    token.clear();
  };

  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    // U+2000..U+207F (general punctuation) and U+00A0 act as separators,
    // except U+2019 which is an apostrophe.
    if (c == 0xE2 && i + 2 < n && (static_cast<unsigned char>(text[i + 1]) & 0xFE) == 0x80) {
      const bool right_quote = static_cast<unsigned char>(text[i + 1]) == 0x80 &&
                               static_cast<unsigned char>(text[i + 2]) == 0x99;
      i += 3;
      if (right_quote && !token.empty() && i < n && is_word_byte(static_cast<unsigned char>(text[i]))) {
        token.push_back('\'');
      } else {
        flush();
      }
      continue;
    }
    if (c == 0xC2 && i + 1 < n && static_cast<unsigned char>(text[i + 1]) == 0xA0) {
      flush();
      i += 2;
      continue;
    }
    if (c == '\'') {
      if (!token.empty() && i + 1 < n && is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
        token.push_back('\'');
      } else {
        flush();
      }
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      token.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else {
      flush();
    }
    ++i;
  }
  flush();
  return out;
}

}  // namespace mer::text
