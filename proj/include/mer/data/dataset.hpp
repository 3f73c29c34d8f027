#pragma once

#include "mer/common.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mer::data {

enum class Split { train, validation, test };
std::string_view to_string(Split s);

struct SongRecord {
  std::string song_id;
  std::string artist;
  std::string title;
  double valence_target = 0.0;
  double arousal_target = 0.0;
  Split split = Split::train;

  double target(Target t) const { return t == Target::valence ? valence_target : arousal_target; }
};

// The 11 Spotify audio features.
struct AudioFeatureVector {
  double acousticness = 0.0;
  double danceability = 0.0;
  double energy = 0.0;
  double instrumentalness = 0.0;
  double liveness = 0.0;
  double loudness = 0.0;
  double speechiness = 0.0;
  double tempo = 0.0;
  double valence = 0.0;
  int mode = 0;
  int key = -1;

  // Throws InvalidArgument naming the first violated bound.
  void validate() const;

  nlohmann::json to_json() const;
  // Missing or mistyped fields throw IngestError.
  static AudioFeatureVector from_json(const nlohmann::json& j);

  bool operator==(const AudioFeatureVector&) const = default;
};

inline constexpr Index kAudioColumns = 23;

// acousticness, danceability, energy, instrumentalness, liveness, loudness,
// speechiness, tempo, valence, mode, key_none, key_C, key_Cs, ..., key_B
const std::array<std::string, kAudioColumns>& audio_column_names();

/// 9 continuous features, mode, then 13 key indicators (key -1..11).
Vector dummy_encode_audio(const AudioFeatureVector& v);

// song_id -> features; nullopt marks a song known to have no features.
using AudioStore = std::map<std::string, std::optional<AudioFeatureVector>>;

AudioStore load_audio_store(const std::filesystem::path& path);
AudioStore parse_audio_store(std::string_view json_text);
std::string serialize_audio_store(const AudioStore& store);
void save_audio_store(const std::filesystem::path& path, const AudioStore& store);

struct Corpus {
  std::vector<SongRecord> records;  // sorted by song_id
  std::map<std::string, AudioFeatureVector> audio;
  std::map<std::string, std::string> lyrics;

  std::size_t size() const { return records.size(); }
  std::vector<std::size_t> indices(Split s) const;
};

/// Reads the `song_id,artist,title,valence,arousal` CSV without any other
/// source. Row errors throw IngestError naming the line.
std::vector<SongRecord> load_song_table(const std::filesystem::path& dataset_csv);
std::vector<SongRecord> parse_song_table(std::string_view csv);

struct LoadStats {
  std::size_t csv_rows = 0;
  std::size_t missing_lyrics = 0;
  std::size_t missing_audio = 0;
  std::size_t kept = 0;
};

/// Songs present in the CSV, the lyrics directory and the audio store.
Corpus load_corpus(const std::filesystem::path& dataset_csv, const std::filesystem::path& lyrics_dir,
                   const std::filesystem::path& audio_store, LoadStats* stats = nullptr);

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

/// Seeded uniform shuffle; n_train = round(train*N), n_val = round(validation*N),
/// test gets the rest.
void assign_splits(Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace mer::data
