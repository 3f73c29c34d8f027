#include "mer/pipeline/config.hpp"

#include "mer/util/io.hpp"

#include <charconv>
#include <cmath>

namespace mer::pipeline {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto comma = value.find(',', start);
    if (comma == std::string::npos) comma = value.size();
    const auto item = trim(std::string_view(value).substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError("setting '" + key + "': '" + v + "' is not a number");
  }
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("setting '" + key + "': '" + v + "' is not an integer");
  return x;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("setting '" + key + "': '" + v + "' is not a non-negative integer");
  }
  return x;
}

regressors::Family family_of(const std::string& key, const std::string& name) {
  try {
    return regressors::parse_family(name);
  } catch (const Error&) {
    throw ConfigError("setting '" + key + "': unknown model family '" + name + "'");
  }
}

void check_hyperparameter(const std::string& key, regressors::Family f, const std::string& name) {
  if (!regressors::default_hyperparameters(f).count(name)) {
    throw ConfigError("setting '" + key + "': " + std::string(regressors::to_string(f)) +
                      " has no hyperparameter '" + name + "'");
  }
}

}  // namespace

regressors::HyperparameterGrid RunConfig::grid(regressors::Family f) const {
  auto it = grids.find(f);
  return it == grids.end() ? regressors::default_grid(f) : it->second;
}

void RunConfig::set(const std::string& key, const std::string& raw, const std::filesystem::path& base_dir) {
  const std::string value = trim(raw);
  auto path = [&] {
    if (value.empty()) throw ConfigError("setting '" + key + "' needs a path");
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : (base_dir / p).lexically_normal();
  };
  if (key == "dataset_csv") {
    dataset_csv = path();
  } else if (key == "lyrics_dir") {
    lyrics_dir = path();
  } else if (key == "audio_store") {
    audio_store = path();
  } else if (key == "vader_lexicon") {
    vader_lexicon = path();
  } else if (key == "xanew_lexicon") {
    xanew_lexicon = path();
  } else if (key == "output_dir") {
    output_dir = path();
  } else if (key == "features_dir") {
    features_dir = path();
  } else if (key == "seed") {
    seed = to_unsigned(key, value);
  } else if (key == "train_ratio") {
    ratios.train = to_double(key, value);
  } else if (key == "validation_ratio") {
    ratios.validation = to_double(key, value);
  } else if (key == "test_ratio") {
    ratios.test = to_double(key, value);
  } else if (key == "max_vocab") {
    max_vocab = to_unsigned(key, value);
  } else if (key == "pca_k") {
    pca_k = to_integer(key, value);
  } else if (key == "alpha") {
    alpha = to_double(key, value);
  } else if (key == "rfe_n_keep") {
    rfe_n_keep = to_integer(key, value);
  } else if (key == "folds") {
    folds = static_cast<int>(to_integer(key, value));
  } else if (key == "jobs") {
    jobs = static_cast<int>(to_integer(key, value));
  } else if (key == "families") {
    families.clear();
    for (const auto& name : split_list(value)) families.push_back(family_of(key, name));
  } else if (key == "modalities") {
    modalities = split_list(value);
    for (const auto& m : modalities)
      if (m != "audio" && m != "lyrics" && m != "multi") throw ConfigError("setting 'modalities': unknown modality '" + m + "'");
  } else if (key == "combination_ranking") {
    if (value == "mean_rank") {
      ranking = selection::CombinationRanking::mean_rank;
    } else if (value == "mean_r2") {
      ranking = selection::CombinationRanking::mean_r2;
    } else {
      throw ConfigError("setting 'combination_ranking' must be mean_rank or mean_r2");
    }
  } else if (key.rfind("grid.", 0) == 0 || key.rfind("param.", 0) == 0) {
    const bool is_grid = key[0] == 'g';
    const auto rest = key.substr(is_grid ? 5 : 6);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) throw ConfigError("setting '" + key + "' must look like <family>.<name>");
    const auto f = family_of(key, rest.substr(0, dot));
    const auto name = rest.substr(dot + 1);
    check_hyperparameter(key, f, name);
    if (is_grid) {
      std::vector<double> values;
      for (const auto& v : split_list(value)) values.push_back(to_double(key, v));
      if (values.empty()) throw ConfigError("setting '" + key + "' needs at least one value");
      auto g = grid(f);
      bool replaced = false;
      for (auto& [axis, vals] : g) {
        if (axis == name) {
          vals = values;
          replaced = true;
        }
      }
      if (!replaced) g.emplace_back(name, values);
      grids[f] = g;
    } else {
      base_params[f][name] = to_double(key, value);
    }
  } else if (key == "spotify_token_url") {
    spotify_token_url = value;
  } else if (key == "spotify_api_base") {
    spotify_api_base = value;
  } else if (key == "spotify_concurrency") {
    spotify_concurrency = static_cast<int>(to_integer(key, value));
  } else if (key == "match_threshold") {
    match_threshold = to_double(key, value);
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
  settings[key] = value;
}

void RunConfig::validate() const {
  if (!(ratios.train > 0.0) || ratios.validation < 0.0 || ratios.test < 0.0 ||
      std::fabs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative, with a positive train share, and sum to 1");
  }
  if (pca_k < 1) throw ConfigError("pca_k must be at least 1");
  if (max_vocab < 1) throw ConfigError("max_vocab must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
  if (rfe_n_keep < 1) throw ConfigError("rfe_n_keep must be at least 1");
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (families.empty()) throw ConfigError("no model families selected");
  if (modalities.empty()) throw ConfigError("no modalities selected");
  if (spotify_concurrency < 1) throw ConfigError("spotify_concurrency must be at least 1");
  if (!(match_threshold >= 0.0 && match_threshold <= 1.0)) throw ConfigError("match_threshold must be in [0, 1]");
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  static const char* path_keys[] = {"dataset_csv",   "lyrics_dir", "audio_store", "vader_lexicon",
                                    "xanew_lexicon", "output_dir", "features_dir"};
  for (const auto& [k, v] : settings) {
    bool is_path = false;
    for (const char* p : path_keys) is_path = is_path || k == p;
    if (k == "jobs") continue;
    j[k] = is_path ? std::filesystem::path(v).filename().string() : v;
  }
  return j;
}

RunConfig default_config(const std::filesystem::path& data_dir) {
  RunConfig c;
  c.vader_lexicon = data_dir / "vader_lexicon.txt";
  c.xanew_lexicon = data_dir / "xanew_stub.csv";
  c.output_dir = "mer_output";
  return c;
}

void apply_config_text(RunConfig& config, std::string_view text, const std::filesystem::path& base_dir) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    try {
      config.set(trim(line.substr(0, eq)), line.substr(eq + 1), base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  apply_config_text(config, text, std::filesystem::absolute(path).parent_path());
}

}  // namespace mer::pipeline
