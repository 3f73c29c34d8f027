// Writes the synthetic corpus used by the end-to-end tests.
//
//   valence = 0.7 danceability + 0.6 energy + 0.3 compound + N(0, sigma_v)
//   arousal = 0.8 energy - 0.3 instrumentalness + 0.4 valence_feature
//             + 0.15 mode + 0.3 topic + N(0, sigma_a)
//
// compound is the VADER compound score of the generated lyrics; topic is a
// 0/1 song label that decides which half of the filler vocabulary the lyrics
// mostly draw from, so only bag-of-words features can see it.

#include "mer/data/dataset.hpp"
#include "mer/text/affect.hpp"
#include "mer/text/vader.hpp"
#include "mer/util/io.hpp"
#include "mer/util/random.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

namespace {

using namespace mer;

constexpr double kDance = 0.7, kEnergy = 0.6, kCompound = 0.3;
constexpr double kArEnergy = 0.8, kArInstr = -0.3, kArValence = 0.4, kArMode = 0.15, kArTopic = 0.3;

std::vector<std::string> pick_words(const text::SentimentLexicon& lex, bool positive, std::size_t n) {
  std::vector<std::string> words;
  for (const auto& [w, r] : lex.ratings()) {
    const bool alpha = std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (!alpha || w.size() < 4 || lex.boosters().count(w) || lex.negations().count(w)) continue;
    if (positive ? r >= 1.8 : r <= -1.8) words.push_back(w);
  }
  std::sort(words.begin(), words.end());
  std::vector<std::string> out;
  const std::size_t step = std::max<std::size_t>(1, words.size() / n);
  for (std::size_t i = 0; i < words.size() && out.size() < n; i += step) out.push_back(words[i]);
  return out;
}

std::vector<std::string> filler_words(const text::SentimentLexicon& lex, const text::AffectLexicon& affect,
                                      std::size_t n) {
  const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "st", "pl"};
  const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  const char* codas[] = {"", "n", "r", "m", "l", "th"};
  std::vector<std::string> all;
  for (const char* o1 : onsets)
    for (const char* v1 : vowels)
      for (const char* o2 : onsets)
        for (const char* v2 : vowels)
          for (const char* c : codas) {
            const std::string w = std::string(o1) + v1 + o2 + v2 + c;
            if (!lex.contains(w) && affect.find(w) < 0) all.push_back(w);
          }
  std::vector<std::string> out;
  const std::size_t step = all.size() / n;
  for (std::size_t i = 0; out.size() < n; i += step) out.push_back(all[i]);
  return out;
}

double variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic fixture corpus"};
  std::string out_dir, data_dir;
  std::uint64_t seed = 20240611;
  int n = 500;
  double sigma_v = 0.08, sigma_a = 0.1;
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--data", data_dir, "directory with vader_lexicon.txt and xanew_stub.csv")->required();
  app.add_option("--seed", seed);
  app.add_option("--songs", n)->check(CLI::PositiveNumber);
  app.add_option("--sigma-valence", sigma_v);
  app.add_option("--sigma-arousal", sigma_a);
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  const auto lex = text::SentimentLexicon::load(fs::path(data_dir) / "vader_lexicon.txt");
  const auto affect = text::AffectLexicon::load(fs::path(data_dir) / "xanew_stub.csv");
  const auto positive = pick_words(lex, true, 60);
  const auto negative = pick_words(lex, false, 60);
  const auto filler = filler_words(lex, affect, 400);

  fs::create_directories(fs::path(out_dir) / "lyrics");
  Rng rng(seed);
  std::string csv = "song_id,artist,title,valence,arousal\n";
  data::AudioStore store;
  std::vector<double> signal_v, signal_a, compounds;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "fx%04d", i + 1);
    data::AudioFeatureVector a;
    a.acousticness = rng.uniform();
    a.danceability = rng.uniform();
    a.energy = rng.uniform();
    a.instrumentalness = rng.uniform();
    a.liveness = rng.uniform();
    a.loudness = rng.uniform(-30.0, 0.0);
    a.speechiness = rng.uniform();
    a.tempo = rng.uniform(60.0, 180.0);
    a.valence = rng.uniform();
    a.mode = rng.uniform() < 0.6 ? 1 : 0;
    a.key = static_cast<int>(rng.below(13)) - 1;

    const double mood = rng.uniform(-1.0, 1.0);
    const int topic = rng.uniform() < 0.5 ? 1 : 0;
    const int n_words = 60 + static_cast<int>(rng.below(61));
    std::string lyrics;
    for (int w = 0; w < n_words; ++w) {
      const double u = rng.uniform();
      std::string word;
      if (u < 0.06) {
        const auto& pool = rng.uniform() < 0.5 * (1.0 + mood) ? positive : negative;
        word = pool[rng.below(pool.size())];
      } else if (u < 0.16) {
        word = affect.words()[rng.below(static_cast<std::uint64_t>(affect.size()))];
      } else {
        // Zipf-like reuse within the topic's half of the filler words.
        const double r = rng.uniform();
        const std::size_t half = filler.size() / 2;
        const std::size_t side = rng.uniform() < 0.8 ? topic : 1 - topic;
        word = filler[side * half + static_cast<std::size_t>(r * r * static_cast<double>(half))];
      }
      lyrics += word;
      lyrics += (w + 1) % 8 == 0 ? "\n" : " ";
    }
    const double compound = text::vader_sentiment(lyrics, lex).compound;
    const double sv = kDance * a.danceability + kEnergy * a.energy + kCompound * compound;
    const double sa = kArEnergy * a.energy + kArInstr * a.instrumentalness + kArValence * a.valence + kArMode * a.mode +
                      kArTopic * topic;
    const double valence = sv + rng.normal(0.0, sigma_v);
    const double arousal = sa + rng.normal(0.0, sigma_a);
    signal_v.push_back(sv);
    signal_a.push_back(sa);
    compounds.push_back(compound);

    write_file_atomic(fs::path(out_dir) / "lyrics" / (std::string(id) + ".txt"), lyrics);
    store[id] = a;
    csv += std::string(id) + ",Fixture Artist " + std::to_string(i % 40 + 1) + ",Song " + std::to_string(i + 1) + "," +
           format_double(valence) + "," + format_double(arousal) + "\n";
  }
  write_file_atomic(fs::path(out_dir) / "dataset.csv", csv);
  data::save_audio_store(fs::path(out_dir) / "audio_store.json", store);

  const double var_v = variance(signal_v), var_a = variance(signal_a);
  nlohmann::ordered_json truth;
  truth["songs"] = n;
  truth["seed"] = seed;
  truth["valence"] = {{"coefficients", {{"danceability", kDance}, {"energy", kEnergy}, {"vader_compound", kCompound}}},
                      {"sigma", sigma_v},
                      {"signal_variance", var_v},
                      {"r2_star", var_v / (var_v + sigma_v * sigma_v)}};
  truth["arousal"] = {{"coefficients",
                       {{"energy", kArEnergy}, {"instrumentalness", kArInstr}, {"valence", kArValence}, {"mode", kArMode}, {"topic", kArTopic}}},
                      {"sigma", sigma_a},
                      {"signal_variance", var_a},
                      {"r2_star", var_a / (var_a + sigma_a * sigma_a)}};
  truth["injected_audio"] = {"danceability", "energy", "instrumentalness", "valence", "mode"};
  truth["compound_variance"] = variance(compounds);
  write_file_atomic(fs::path(out_dir) / "truth.json", truth.dump(2) + "\n");
  std::cout << truth.dump(2) << "\n";
  return 0;
}
