#include "mer/evaluation/evaluation.hpp"

#include "mer/numerics/ols.hpp"
#include "mer/util/io.hpp"
#include "mer/util/parallel.hpp"
#include "mer/util/random.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <limits>

namespace mer::evaluation {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::ordered_json num(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); }

nlohmann::ordered_json hp_json(const regressors::Hyperparameters& hp) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : hp) j[k] = v;
  return j;
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

std::string family_label(Family f) {
  switch (f) {
    case Family::mlr:
      return "MLR";
    case Family::rfr:
      return "RFR";
    case Family::svr:
      return "SVR";
    case Family::mlp:
      return "MLP";
  }
  return "?";
}

std::string modality_label(const std::string& m) {
  if (m == "audio") return "Audio";
  if (m == "lyrics") return "Lyrics";
  if (m == "multi") return "Multi-modal";
  return m;
}

const regressors::HyperparameterGrid& grid_for(const EvaluationOptions& o, Family f) {
  auto it = o.grids.find(f);
  return it == o.grids.end() ? regressors::default_grid(f) : it->second;
}

regressors::RegressorSpec base_spec(const EvaluationOptions& o, Family f, std::uint64_t seed) {
  regressors::RegressorSpec s;
  s.family = f;
  s.seed = seed;
  if (auto it = o.base_params.find(f); it != o.base_params.end()) s.hyperparameters = it->second;
  return s;
}

struct FitJob {
  std::vector<std::string> columns;
  Family family;
  Target target;
  std::string tag;
};

struct FitOutcome {
  std::optional<regressors::GridSearchResult> search;
  std::string error;
};

// Fit phase: training rows only.
std::vector<FitOutcome> fit_all(const std::vector<FitJob>& jobs, const selection::FeatureMatrix& features,
                                const TargetStore& targets, const EvaluationOptions& o) {
  const auto& train_rows = targets.rows(Split::train);
  const auto train = features.select_rows(train_rows);
  const Vector y_train[] = {targets.targets(Target::valence, Split::train),
                            targets.targets(Target::arousal, Split::train)};
  std::vector<FitOutcome> out(jobs.size());
  parallel_for(jobs.size(), o.jobs, [&](std::size_t k) {
    const auto& job = jobs[k];
    try {
      if (job.columns.empty()) throw InvalidArgument("no feature columns selected");
      const auto x = train.select_columns(job.columns);
      const auto seed = derive_seed(o.seed, job.tag);
      out[k].search = regressors::grid_search(base_spec(o, job.family, seed), grid_for(o, job.family), x.values,
                                              y_train[static_cast<int>(job.target)], o.folds,
                                              derive_seed(o.seed, "cv"), 1, x.names);
    } catch (const std::exception& e) {
      out[k].error = e.what();
      spdlog::warn("{} failed: {}", job.tag, e.what());
    }
  });
  return out;
}

// Score phase: opens the test split.
std::vector<double> score_all(const std::vector<FitJob>& jobs, std::vector<FitOutcome>& fits,
                              const selection::FeatureMatrix& features, TargetStore& targets) {
  targets.open_test_split();
  const auto test = features.select_rows(targets.rows(Split::test));
  const Vector y_test[] = {targets.targets(Target::valence, Split::test),
                           targets.targets(Target::arousal, Split::test)};
  std::vector<double> scores(jobs.size(), kNaN);
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (!fits[k].search) continue;
    try {
      const auto x = test.select_columns(jobs[k].columns);
      const double s = r2(y_test[static_cast<int>(jobs[k].target)], fits[k].search->model.predict(x.values));
      if (!std::isfinite(s)) throw NumericalError("non-finite test R^2");
      scores[k] = s;
    } catch (const std::exception& e) {
      fits[k].error = e.what();
      spdlog::warn("{} scoring failed: {}", jobs[k].tag, e.what());
    }
  }
  return scores;
}

}  // namespace

double r2(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) throw DimensionMismatch("r2: length mismatch");
  if (y_true.size() < 2) throw InvalidArgument("r2: need at least 2 values");
  const double mean = y_true.mean();
  const double tss = (y_true.array() - mean).square().sum();
  if (tss == 0.0) throw InvalidArgument("r2: y_true has zero variance");
  return 1.0 - (y_true - y_pred).squaredNorm() / tss;
}

TargetStore::TargetStore(std::vector<std::string> row_ids, Matrix targets, std::vector<Split> splits)
    : row_ids_(std::move(row_ids)), targets_(std::move(targets)) {
  if (targets_.cols() != 2 || targets_.rows() != static_cast<Index>(row_ids_.size()) ||
      splits.size() != row_ids_.size()) {
    throw DimensionMismatch("target store: inconsistent sizes");
  }
  if (!targets_.allFinite()) throw InvalidArgument("target store: targets must be finite");
  for (std::size_t i = 0; i < splits.size(); ++i) rows_[static_cast<std::size_t>(splits[i])].push_back(static_cast<Index>(i));
}

Vector TargetStore::targets(Target t, Split s) const {
  if (s == Split::test) {
    if (!test_open_) {
      ++early_requests_;
      throw Error("split audit: test targets requested before scoring");
    }
    ++test_reads_;
  }
  const auto& r = rows(s);
  Vector out(static_cast<Index>(r.size()));
  for (std::size_t k = 0; k < r.size(); ++k) out(static_cast<Index>(k)) = targets_(r[k], static_cast<Index>(t));
  return out;
}

std::vector<std::string> ModalitySubsets::columns(const std::string& modality) const {
  if (modality == "audio") return audio;
  if (modality == "lyrics") return lyrics;
  if (modality == "multi") {
    auto out = audio;
    out.insert(out.end(), lyrics.begin(), lyrics.end());
    return out;
  }
  throw InvalidArgument("unknown modality '" + modality + "' (expected audio, lyrics or multi)");
}

std::vector<GridCell> run_modality_grid(const selection::FeatureMatrix& features, TargetStore& targets,
                                        const ModalitySubsets& subsets, const EvaluationOptions& options) {
  std::vector<FitJob> jobs;
  std::vector<GridCell> cells;
  for (const auto& m : options.modalities) {
    const auto cols = subsets.columns(m);
    for (Family f : options.families) {
      for (Target t : kTargets) {
        jobs.push_back({cols, f, t, "grid/" + m + "/" + std::string(regressors::to_string(f)) + "/" + to_string(t)});
        GridCell c;
        c.modality = m;
        c.family = f;
        c.target = t;
        c.n_features = static_cast<Index>(cols.size());
        cells.push_back(c);
      }
    }
  }
  auto fits = fit_all(jobs, features, targets, options);
  const auto scores = score_all(jobs, fits, features, targets);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    auto& c = cells[k];
    c.error = fits[k].error;
    if (!fits[k].search || !std::isfinite(scores[k])) {
      c.ok = false;
      c.test_r2 = kNaN;
      continue;
    }
    const auto& s = *fits[k].search;
    c.ok = true;
    c.test_r2 = scores[k];
    c.train_r2 = s.model.train_r2();
    c.cv_r2 = s.mean_cv_r2[s.best_index];
    c.best = s.candidates[s.best_index];
  }
  return cells;
}

std::vector<SubsetRow> run_feature_subset_comparison(const selection::FeatureMatrix& features, TargetStore& targets,
                                                     const FeatureSubsetDefinitions& subsets,
                                                     const EvaluationOptions& options,
                                                     const std::vector<GridCell>* grid) {
  auto concat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  const std::vector<SubsetRow> layout = {
      {"audio", "all_features_A", static_cast<Index>(subsets.all_audio.size()), {}},
      {"audio", "selected_A", static_cast<Index>(subsets.selected_audio.size()), {}},
      {"lyrics", "all_features_L", static_cast<Index>(subsets.all_lyrics.size()), {}},
      {"lyrics", "selected_L", static_cast<Index>(subsets.selected_lyrics.size()), {}},
      {"multi", "all_features_A + all_features_L",
       static_cast<Index>(subsets.all_audio.size() + subsets.all_lyrics.size()), {}},
      {"multi", "selected_A + selected_L",
       static_cast<Index>(subsets.selected_audio.size() + subsets.selected_lyrics.size()), {}},
  };
  const std::vector<std::vector<std::string>> columns = {
      subsets.all_audio,    subsets.selected_audio,
      subsets.all_lyrics,   subsets.selected_lyrics,
      concat(subsets.all_audio, subsets.all_lyrics), concat(subsets.selected_audio, subsets.selected_lyrics)};

  std::vector<SubsetRow> rows = layout;
  std::vector<FitJob> jobs;
  std::vector<std::pair<std::size_t, int>> slots;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Target t : kTargets) {
      const bool selected = r % 2 == 1;
      const GridCell* reuse = nullptr;
      if (selected && grid) {
        for (const auto& c : *grid)
          if (c.family == Family::mlp && c.modality == rows[r].modality && c.target == t && c.ok &&
              c.n_features == rows[r].n_features)
            reuse = &c;
      }
      if (reuse) {
        rows[r].r2[static_cast<std::size_t>(t)] = reuse->test_r2;
        continue;
      }
      jobs.push_back({columns[r], Family::mlp, t,
                      (selected ? std::string("grid/") : std::string("subsets/")) + rows[r].modality +
                          (selected ? "/mlp/" : "/all/mlp/") + to_string(t)});
      slots.emplace_back(r, static_cast<int>(t));
    }
  }
  if (!jobs.empty()) {
    auto fits = fit_all(jobs, features, targets, options);
    const auto scores = score_all(jobs, fits, features, targets);
    for (std::size_t k = 0; k < jobs.size(); ++k) rows[slots[k].first].r2[static_cast<std::size_t>(slots[k].second)] = scores[k];
  }
  return rows;
}

const std::vector<std::pair<std::string, std::string>>& coefficient_table_layout() {
  static const std::vector<std::pair<std::string, std::string>> layout = {
      {"Constant", ""},
      {"Danceability", "danceability"},
      {"Energy", "energy"},
      {"Loudness", "loudness"},
      {"Speechiness", "speechiness"},
      {"Acousticness", "acousticness"},
      {"Instrumentalness", "instrumentalness"},
      {"Liveness", "liveness"},
      {"Valence", "valence"},
      {"Tempo", "tempo"},
      {"Mode", "mode"},
      {"Compound sentiment", "vader_compound"},
  };
  return layout;
}

std::array<std::vector<CoefficientRow>, 2> coefficient_report(const selection::FeatureMatrix& features,
                                                             const TargetStore& targets) {
  std::vector<std::string> cols;
  for (const auto& [label, column] : coefficient_table_layout())
    if (!column.empty()) cols.push_back(column);
  const auto x = features.select_rows(targets.rows(Split::train)).select_columns(cols);
  std::array<std::vector<CoefficientRow>, 2> out;
  for (Target t : kTargets) {
    const auto ols = numerics::ols_fit(x.values, targets.targets(t, Split::train));
    if (!ols.inference_available) throw InvalidArgument("coefficient report: too few training rows for inference");
    const auto& layout = coefficient_table_layout();
    for (std::size_t k = 0; k < layout.size(); ++k) {
      const auto c = static_cast<Index>(k);
      CoefficientRow row;
      row.label = layout[k].first;
      row.column = layout[k].second;
      row.coefficient = ols.coefficients(c);
      row.std_error = ols.std_errors(c);
      row.p_value = ols.p_values(c);
      row.significant = row.p_value < 0.05;
      out[static_cast<std::size_t>(t)].push_back(row);
    }
  }
  return out;
}

bool EvaluationReport::any_failed() const {
  for (const auto& c : cells)
    if (!c.ok) return true;
  for (const auto& r : feature_subsets)
    for (double v : r.r2)
      if (!std::isfinite(v)) return true;
  return false;
}

nlohmann::ordered_json EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "mer.evaluation_report";
  j["version"] = 1;
  j["metadata"] = metadata;
  j["split_audit"] = {{"test_targets_requested_before_scoring", early_test_requests},
                      {"test_target_reads", test_reads},
                      {"passed", early_test_requests == 0}};
  if (audio_selection) {
    j["audio_selection"] = {{"columns", audio_selection->columns},
                            {"procedure", audio_selection->procedure},
                            {"provenance", audio_selection->provenance}};
  }
  if (combination) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : combination->rows) {
      nlohmann::ordered_json scores;
      for (std::size_t k = 0; k < 8; ++k) {
        scores[std::string(regressors::to_string(regressors::kFamilies[k / 2])) + "_" +
               to_string(kTargets[k % 2])] = num(r.scores[k]);
      }
      rows.push_back({{"combination", r.name}, {"n_features", r.n_features}, {"validation_r2", scores},
                      {"aggregate", num(r.aggregate)}});
    }
    j["lyric_combinations"] = {{"ranking", combination->subset.provenance.value("ranking", "")},
                               {"rows", rows},
                               {"best", combination->rows[combination->best].name},
                               {"columns", combination->subset.columns}};
  }
  nlohmann::ordered_json cells_json = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json cj = {{"modality", c.modality},
                                 {"family", regressors::to_string(c.family)},
                                 {"target", to_string(c.target)},
                                 {"n_features", c.n_features},
                                 {"ok", c.ok},
                                 {"test_r2", num(c.test_r2)}};
    if (c.ok) {
      cj["train_r2"] = num(c.train_r2);
      cj["cv_r2"] = num(c.cv_r2);
      cj["hyperparameters"] = hp_json(c.best);
    } else {
      cj["error"] = c.error;
    }
    cells_json.push_back(cj);
  }
  j["modality_grid"] = cells_json;
  nlohmann::ordered_json subsets = nlohmann::ordered_json::array();
  for (const auto& r : feature_subsets) {
    subsets.push_back({{"modality", r.modality},
                       {"feature_set", r.feature_set},
                       {"n_features", r.n_features},
                       {"valence_r2", num(r.r2[0])},
                       {"arousal_r2", num(r.r2[1])}});
  }
  j["feature_subsets"] = subsets;
  if (coefficients) {
    nlohmann::ordered_json coef;
    for (Target t : kTargets) {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& r : (*coefficients)[static_cast<std::size_t>(t)]) {
        rows.push_back({{"feature", r.label},
                        {"coefficient", num(r.coefficient)},
                        {"std_error", num(r.std_error)},
                        {"p_value", num(r.p_value)},
                        {"significant", r.significant}});
      }
      coef[to_string(t)] = rows;
    }
    j["coefficients"] = coef;
  }
  nlohmann::ordered_json rfe_json;
  for (Target t : kTargets) {
    const auto& r = rfe[static_cast<std::size_t>(t)];
    if (!r) continue;
    rfe_json[to_string(t)] = {{"survivors", r->survivors.columns}, {"elimination_order", r->elimination_order}};
  }
  if (!rfe_json.is_null()) j["rfe"] = rfe_json;
  return j;
}

std::string table1_markdown(const EvaluationReport& r) {
  std::string out = "| Mode | Model | Valence | Arousal |\n|---|---|---|---|\n";
  for (std::size_t k = 0; k + 1 < r.cells.size(); k += 2) {
    const auto& v = r.cells[k];
    const auto& a = r.cells[k + 1];
    out += "| " + modality_label(v.modality) + " | " + family_label(v.family) + " | " +
           (v.ok ? fixed(v.test_r2, 3) : "failed") + " | " + (a.ok ? fixed(a.test_r2, 3) : "failed") + " |\n";
  }
  return out;
}

std::string table1_csv(const EvaluationReport& r) {
  std::string out = "modality,family,target,n_features,ok,test_r2,train_r2,cv_r2\n";
  for (const auto& c : r.cells) {
    out += c.modality + "," + std::string(regressors::to_string(c.family)) + "," + to_string(c.target) + "," +
           std::to_string(c.n_features) + "," + (c.ok ? "1" : "0") + "," + (c.ok ? format_double(c.test_r2) : "") +
           "," + (c.ok ? format_double(c.train_r2) : "") + "," + (c.ok ? format_double(c.cv_r2) : "") + "\n";
  }
  return out;
}

std::string table2_markdown(const EvaluationReport& r) {
  if (!r.coefficients) return "";
  std::string out = "| Feature | Valence | Arousal |\n|---|---|---|\n";
  const auto& c = *r.coefficients;
  for (std::size_t k = 0; k < c[0].size(); ++k) {
    auto cell = [](const CoefficientRow& row) { return fixed(row.coefficient, 4) + (row.significant ? "*" : ""); };
    out += "| " + c[0][k].label + " | " + cell(c[0][k]) + " | " + cell(c[1][k]) + " |\n";
  }
  out += "\n\\* significant with p < 0.05\n";
  return out;
}

std::string table2_csv(const EvaluationReport& r) {
  if (!r.coefficients) return "";
  std::string out = "target,feature,coefficient,std_error,p_value,significant\n";
  for (Target t : kTargets) {
    for (const auto& row : (*r.coefficients)[static_cast<std::size_t>(t)]) {
      out += std::string(to_string(t)) + "," + row.label + "," + format_double(row.coefficient) + "," +
             format_double(row.std_error) + "," + format_double(row.p_value) + "," + (row.significant ? "1" : "0") +
             "\n";
    }
  }
  return out;
}

std::string table3_markdown(const EvaluationReport& r) {
  std::string out = "| Modality | Feature set | Features | Valence | Arousal |\n|---|---|---|---|---|\n";
  for (const auto& row : r.feature_subsets) {
    out += "| " + modality_label(row.modality) + " | " + row.feature_set + " | " + std::to_string(row.n_features) +
           " | " + fixed(row.r2[0], 3) + " | " + fixed(row.r2[1], 3) + " |\n";
  }
  return out;
}

std::string table3_csv(const EvaluationReport& r) {
  std::string out = "modality,feature_set,n_features,valence_r2,arousal_r2\n";
  for (const auto& row : r.feature_subsets) {
    auto v = [](double x) { return std::isfinite(x) ? format_double(x) : std::string(); };
    out += row.modality + "," + csv_escape(row.feature_set) + "," + std::to_string(row.n_features) + "," + v(row.r2[0]) +
           "," + v(row.r2[1]) + "\n";
  }
  return out;
}

std::string combination_markdown(const selection::CombinationSearchResult& c) {
  std::string out =
      "| Features | MLR valence | MLR arousal | RFR valence | RFR arousal | SVR valence | SVR arousal | MLP valence | "
      "MLP arousal | Aggregate |\n|---|---|---|---|---|---|---|---|---|---|\n";
  for (std::size_t r = 0; r < c.rows.size(); ++r) {
    const auto& row = c.rows[r];
    out += "| " + row.name + (r == c.best ? " (best)" : "");
    for (double s : row.scores) out += " | " + fixed(s, 4);
    out += " | " + fixed(row.aggregate, 3) + " |\n";
  }
  return out;
}

std::string combination_csv(const selection::CombinationSearchResult& c) {
  std::string out = "combination,n_features";
  for (std::size_t k = 0; k < 8; ++k)
    out += "," + std::string(regressors::to_string(regressors::kFamilies[k / 2])) + "_" + to_string(kTargets[k % 2]);
  out += ",aggregate,best\n";
  for (std::size_t r = 0; r < c.rows.size(); ++r) {
    const auto& row = c.rows[r];
    out += row.name + "," + std::to_string(row.n_features);
    for (double s : row.scores) out += "," + (std::isfinite(s) ? format_double(s) : std::string());
    out += "," + format_double(row.aggregate) + "," + (r == c.best ? "1" : "0") + "\n";
  }
  return out;
}

std::string rfe_markdown(const EvaluationReport& r) {
  std::string out;
  for (Target t : kTargets) {
    const auto& res = r.rfe[static_cast<std::size_t>(t)];
    if (!res) continue;
    out += std::string("## ") + to_string(t) + "\n\nSurvivors: ";
    for (std::size_t k = 0; k < res->survivors.columns.size(); ++k)
      out += (k ? ", " : "") + res->survivors.columns[k];
    out += "\n\nEliminated (first to last): ";
    for (std::size_t k = 0; k < res->elimination_order.size(); ++k)
      out += (k ? ", " : "") + res->elimination_order[k];
    out += "\n\n";
  }
  return out;
}

void write_report(const EvaluationReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", report.to_json().dump(2) + "\n");
  if (!report.cells.empty()) {
    write_file_atomic(dir / "table1_modality_grid.md", table1_markdown(report));
    write_file_atomic(dir / "table1_modality_grid.csv", table1_csv(report));
  }
  if (report.coefficients) {
    write_file_atomic(dir / "table2_coefficients.md", table2_markdown(report));
    write_file_atomic(dir / "table2_coefficients.csv", table2_csv(report));
  }
  if (!report.feature_subsets.empty()) {
    write_file_atomic(dir / "table3_feature_subsets.md", table3_markdown(report));
    write_file_atomic(dir / "table3_feature_subsets.csv", table3_csv(report));
  }
  if (report.combination) {
    write_file_atomic(dir / "appendix_b_lyric_combinations.md", combination_markdown(*report.combination));
    write_file_atomic(dir / "appendix_b_lyric_combinations.csv", combination_csv(*report.combination));
  }
  if (report.rfe[0] || report.rfe[1]) write_file_atomic(dir / "rfe.md", rfe_markdown(report));
}

}  // namespace mer::evaluation
