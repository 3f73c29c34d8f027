#include "mer/data/dataset.hpp"

#include "mer/util/io.hpp"
#include "mer/util/random.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

namespace mer::data {
namespace {

constexpr std::array<const char*, 9> kContinuous = {"acousticness", "danceability", "energy",
                                                    "instrumentalness", "liveness", "loudness",
                                                    "speechiness", "tempo", "valence"};

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string row_error(std::size_t line, const std::string& what) {
  return "dataset CSV row at line " + std::to_string(line) + ": " + what;
}

double parse_target(const std::string& raw, std::size_t line, const char* column) {
  const std::string f = trim(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
    throw IngestError(row_error(line, std::string(column) + " '" + raw + "' is not a number"));
  }
  if (!std::isfinite(v)) throw IngestError(row_error(line, std::string(column) + " must be finite, got '" + raw + "'"));
  return v;
}

double* continuous_field(AudioFeatureVector& v, std::size_t i) {
  double* fields[] = {&v.acousticness, &v.danceability, &v.energy, &v.instrumentalness, &v.liveness,
                      &v.loudness,     &v.speechiness,  &v.tempo,  &v.valence};
  return fields[i];
}

const double* continuous_field(const AudioFeatureVector& v, std::size_t i) {
  return continuous_field(const_cast<AudioFeatureVector&>(v), i);
}

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::validation:
      return "validation";
    case Split::test:
      return "test";
  }
  return "?";
}

void AudioFeatureVector::validate() const {
  for (std::size_t i = 0; i < kContinuous.size(); ++i) {
    const double x = *continuous_field(*this, i);
    if (!std::isfinite(x)) throw InvalidArgument(std::string("audio feature ") + kContinuous[i] + " is not finite");
  }
  for (std::size_t i : {0u, 1u, 2u, 3u, 4u, 6u, 8u}) {
    const double x = *continuous_field(*this, i);
    if (x < 0.0 || x > 1.0) {
      throw InvalidArgument(std::string("audio feature ") + kContinuous[i] + " = " + format_double(x) +
                            " outside [0, 1]");
    }
  }
  if (tempo < 0.0) throw InvalidArgument("audio feature tempo must be >= 0, got " + format_double(tempo));
  if (mode != 0 && mode != 1) throw InvalidArgument("audio feature mode must be 0 or 1, got " + std::to_string(mode));
  if (key < -1 || key > 11) throw InvalidArgument("audio feature key must be in -1..11, got " + std::to_string(key));
}

nlohmann::json AudioFeatureVector::to_json() const {
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < kContinuous.size(); ++i) j[kContinuous[i]] = *continuous_field(*this, i);
  j["mode"] = mode;
  j["key"] = key;
  return j;
}

AudioFeatureVector AudioFeatureVector::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw IngestError("audio features must be a JSON object");
  AudioFeatureVector v;
  auto number = [&](const char* name) {
    auto it = j.find(name);
    if (it == j.end() || !it->is_number()) throw IngestError(std::string("audio features lack numeric '") + name + "'");
    return it->get<double>();
  };
  for (std::size_t i = 0; i < kContinuous.size(); ++i) *continuous_field(v, i) = number(kContinuous[i]);
  auto integer = [&](const char* name) {
    const double x = number(name);
    if (x != std::floor(x)) throw IngestError(std::string("audio feature '") + name + "' must be an integer");
    return static_cast<int>(x);
  };
  v.mode = integer("mode");
  v.key = integer("key");
  return v;
}

const std::array<std::string, kAudioColumns>& audio_column_names() {
  static const auto names = [] {
    std::array<std::string, kAudioColumns> n;
    for (std::size_t i = 0; i < kContinuous.size(); ++i) n[i] = kContinuous[i];
    n[9] = "mode";
    const char* keys[] = {"key_none", "key_C", "key_Cs", "key_D", "key_Ds", "key_E", "key_F",
                          "key_Fs",   "key_G", "key_Gs", "key_A", "key_As", "key_B"};
    for (std::size_t i = 0; i < 13; ++i) n[10 + i] = keys[i];
    return n;
  }();
  return names;
}

Vector dummy_encode_audio(const AudioFeatureVector& v) {
  v.validate();
  Vector out = Vector::Zero(kAudioColumns);
  for (std::size_t i = 0; i < kContinuous.size(); ++i) out(static_cast<Index>(i)) = *continuous_field(v, i);
  out(9) = v.mode;
  out(10 + (v.key + 1)) = 1.0;
  return out;
}

AudioStore parse_audio_store(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IngestError(std::string("audio store is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw IngestError("audio store must be a JSON object keyed by song_id");
  AudioStore store;
  for (const auto& [id, value] : j.items()) {
    if (value.is_null()) {
      store.emplace(id, std::nullopt);
      continue;
    }
    try {
      auto v = AudioFeatureVector::from_json(value);
      v.validate();
      store.emplace(id, v);
    } catch (const Error& e) {
      throw IngestError("audio store entry '" + id + "': " + e.what());
    }
  }
  return store;
}

AudioStore load_audio_store(const std::filesystem::path& path) { return parse_audio_store(read_text_file(path)); }

std::string serialize_audio_store(const AudioStore& store) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [id, v] : store) j[id] = v ? nlohmann::ordered_json(v->to_json()) : nlohmann::ordered_json();
  return j.dump(1) + "\n";
}

void save_audio_store(const std::filesystem::path& path, const AudioStore& store) {
  write_file_atomic(path, serialize_audio_store(store));
}

std::vector<std::size_t> Corpus::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].split == s) out.push_back(i);
  return out;
}

std::vector<SongRecord> parse_song_table(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw IngestError("dataset CSV has no header");
  const auto& header = rows.front().fields;
  auto column = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim(header[i]) == name) return i;
    throw IngestError("dataset CSV header lacks column '" + std::string(name) + "'");
  };
  const std::size_t c_id = column("song_id"), c_artist = column("artist"), c_title = column("title"),
                    c_val = column("valence"), c_aro = column("arousal");
  const std::size_t width = header.size();

  std::vector<SongRecord> records;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::size_t line = rows[r].line;
    if (f.size() != width) {
      throw IngestError(row_error(line, "expected " + std::to_string(width) + " fields, got " + std::to_string(f.size())));
    }
    SongRecord rec;
    rec.song_id = trim(f[c_id]);
    if (rec.song_id.empty()) throw IngestError(row_error(line, "empty song_id"));
    if (rec.song_id.find_first_of("/\\") != std::string::npos || rec.song_id == "." || rec.song_id == "..") {
      throw IngestError(row_error(line, "song_id '" + rec.song_id + "' is not a valid file stem"));
    }
    if (!seen.insert(rec.song_id).second) throw IngestError(row_error(line, "duplicate song_id '" + rec.song_id + "'"));
    rec.artist = f[c_artist];
    rec.title = f[c_title];
    rec.valence_target = parse_target(f[c_val], line, "valence");
    rec.arousal_target = parse_target(f[c_aro], line, "arousal");
    records.push_back(std::move(rec));
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.song_id < b.song_id; });
  return records;
}

std::vector<SongRecord> load_song_table(const std::filesystem::path& dataset_csv) {
  return parse_song_table(read_text_file(dataset_csv));
}

Corpus load_corpus(const std::filesystem::path& dataset_csv, const std::filesystem::path& lyrics_dir,
                   const std::filesystem::path& audio_store, LoadStats* stats) {
  auto records = load_song_table(dataset_csv);
  const AudioStore store = load_audio_store(audio_store);
  if (!std::filesystem::is_directory(lyrics_dir)) {
    throw IngestError("lyrics directory '" + lyrics_dir.string() + "' does not exist");
  }

  LoadStats s;
  s.csv_rows = records.size();
  Corpus corpus;
  for (auto& rec : records) {
    const auto audio_it = store.find(rec.song_id);
    const bool has_audio = audio_it != store.end() && audio_it->second.has_value();

    std::optional<std::string> text;
    const auto lyric_path = lyrics_dir / (rec.song_id + ".txt");
    std::error_code ec;
    if (std::filesystem::is_regular_file(lyric_path, ec)) {
      try {
        text = read_text_file(lyric_path);
      } catch (const Error& e) {
        spdlog::warn("dropping {}: {}", rec.song_id, e.what());
      }
    }
    if (!text) ++s.missing_lyrics;
    if (!has_audio) ++s.missing_audio;
    if (!text || !has_audio) continue;

    corpus.audio.emplace(rec.song_id, *audio_it->second);
    corpus.lyrics.emplace(rec.song_id, std::move(*text));
    corpus.records.push_back(std::move(rec));
  }
  s.kept = corpus.records.size();
  spdlog::info("corpus: {} CSV rows, {} without lyrics, {} without audio features, {} kept", s.csv_rows,
               s.missing_lyrics, s.missing_audio, s.kept);
  if (stats) *stats = s;
  return corpus;
}

void assign_splits(Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed) {
  if (corpus.records.empty()) throw InvalidArgument("cannot split an empty corpus");
  for (double r : {ratios.train, ratios.validation, ratios.test}) {
    if (!(r >= 0.0)) throw InvalidArgument("split ratios must be non-negative");
  }
  if (std::fabs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw InvalidArgument("split ratios must sum to 1");
  }
  const std::size_t n = corpus.records.size();
  const auto n_train = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(ratios.train * n)));
  const auto n_val =
      std::min<std::size_t>(n - n_train, static_cast<std::size_t>(std::llround(ratios.validation * n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "splits"));
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t k = 0; k < n; ++k) {
    auto& rec = corpus.records[order[k]];
    rec.split = k < n_train ? Split::train : k < n_train + n_val ? Split::validation : Split::test;
  }
}

}  // namespace mer::data
