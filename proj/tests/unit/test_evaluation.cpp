#include <doctest.h>

#include "mer/data/dataset.hpp"
#include "mer/evaluation/evaluation.hpp"
#include "mer/util/io.hpp"
#include "mer/util/random.hpp"
#include "oracles.hpp"

#include <cmath>
#include <filesystem>

using namespace mer;
using namespace mer::evaluation;
using selection::FeatureMatrix;
using selection::Modality;

namespace {

struct Synthetic {
  FeatureMatrix features;
  Matrix targets;
  std::vector<Split> splits;
  std::vector<std::string> audio_cols, lyric_cols;
};

// Targets depend on audio columns only; lyric columns are pure noise.
Synthetic make_synthetic(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Synthetic s;
  const auto audio_names = data::audio_column_names();
  std::vector<std::string> names(audio_names.begin(), audio_names.end());
  for (const char* v : {"vader_neg", "vader_neu", "vader_pos", "vader_compound"}) names.push_back(v);
  for (int k = 0; k < 6; ++k) names.push_back("tfidf_pc00" + std::to_string(k + 1));
  const Index d = static_cast<Index>(names.size());
  s.features.values.resize(n, d);
  s.targets.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
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
    a.mode = rng.uniform() < 0.5 ? 1 : 0;
    a.key = static_cast<int>(rng.below(13)) - 1;
    s.features.values.row(i).head(data::kAudioColumns) = data::dummy_encode_audio(a).transpose();
    for (Index j = data::kAudioColumns; j < d; ++j) s.features.values(i, j) = rng.normal();
    s.targets(i, 0) = 2.0 * a.energy + 1.0 * a.danceability + rng.normal(0.0, 0.1);
    s.targets(i, 1) = 1.5 * a.energy - 1.0 * a.acousticness + rng.normal(0.0, 0.1);
    s.features.row_ids.push_back("s" + std::to_string(i));
    s.splits.push_back(i < n * 6 / 10 ? Split::train : i < n * 8 / 10 ? Split::validation : Split::test);
  }
  s.features.names = names;
  for (Index j = 0; j < d; ++j) s.features.tags.push_back(j < data::kAudioColumns ? Modality::audio
                                                          : j < data::kAudioColumns + 4 ? Modality::sentiment
                                                                                       : Modality::tfidf);
  s.audio_cols.assign(names.begin(), names.begin() + data::kAudioColumns);
  s.lyric_cols.assign(names.begin() + data::kAudioColumns, names.end());
  return s;
}

EvaluationOptions fast_options() {
  EvaluationOptions o;
  o.seed = 7;
  o.folds = 3;
  o.grids[Family::rfr] = {{"n_trees", {30}}, {"min_samples_leaf", {1, 5}}};
  o.grids[Family::svr] = {{"C", {1, 10}}};
  o.grids[Family::mlp] = {{"hidden", {20}}, {"alpha", {1e-4}}};
  o.base_params[Family::mlp] = {{"learning_rate", 1e-2}, {"max_epochs", 100}, {"batch_size", 32}};
  return o;
}

TargetStore store_of(const Synthetic& s) { return TargetStore(s.features.row_ids, s.targets, s.splits); }

const GridCell& cell(const std::vector<GridCell>& cells, const std::string& m, Family f, Target t) {
  for (const auto& c : cells)
    if (c.modality == m && c.family == f && c.target == t) return c;
  throw std::runtime_error("missing cell");
}

}  // namespace

TEST_CASE("r2 examples") {
  Vector y(4);
  y << 1, 2, 3, 4;
  CHECK(r2(y, y) == doctest::Approx(1.0));
  CHECK(r2(y, Vector::Constant(4, 2.5)) == doctest::Approx(0.0));
  Vector p(4);
  p << 1.5, 2, 3, 3.5;
  // RSS = 0.5, TSS = 5
  CHECK(r2(y, p) == doctest::Approx(0.9));
  Vector q(4);
  q << 2, 1, 3, 4;
  CHECK(r2(y, q) == doctest::Approx(oracle::r2({1, 2, 3, 4}, {2, 1, 3, 4})));
  CHECK_THROWS_AS(r2(Vector::Constant(3, 1.0), Vector::Zero(3)), InvalidArgument);
  CHECK_THROWS_AS(r2(y, Vector::Zero(3)), DimensionMismatch);
  CHECK_THROWS_AS(r2(Vector::Ones(1), Vector::Ones(1)), InvalidArgument);
}

TEST_CASE("target store guards the test split") {
  const auto s = make_synthetic(50, 1);
  auto store = store_of(s);
  CHECK(store.rows(Split::train).size() == 30);
  CHECK(store.rows(Split::test).size() == 10);
  CHECK_NOTHROW(store.targets(Target::valence, Split::validation));
  CHECK_THROWS_AS(store.targets(Target::valence, Split::test), Error);
  CHECK(store.early_test_requests() == 1);
  store.open_test_split();
  CHECK(store.targets(Target::arousal, Split::test).size() == 10);
  CHECK(store.test_reads() == 1);
  CHECK_THROWS_AS(TargetStore({"a"}, Matrix::Zero(2, 2), {Split::train}), DimensionMismatch);
}

TEST_CASE("modality grid fills every cell and keeps the audit clean") {
  const auto s = make_synthetic(300, 2);
  auto store = store_of(s);
  const ModalitySubsets subsets{s.audio_cols, s.lyric_cols};
  const auto cells = run_modality_grid(s.features, store, subsets, fast_options());
  REQUIRE(cells.size() == 24);
  CHECK(store.early_test_requests() == 0);
  CHECK(store.test_open());
  for (const auto& c : cells) {
    CHECK_MESSAGE(c.ok, c.modality, " ", regressors::to_string(c.family), " ", c.error);
    CHECK(std::isfinite(c.test_r2));
  }
  for (Family f : regressors::kFamilies) {
    for (Target t : kTargets) {
      const double audio = cell(cells, "audio", f, t).test_r2;
      const double lyrics = cell(cells, "lyrics", f, t).test_r2;
      const double multi = cell(cells, "multi", f, t).test_r2;
      CHECK(audio > lyrics + 0.3);
      CHECK(multi > lyrics + 0.3);
    }
  }
  // Nested least squares: the fused design never fits the training data worse.
  for (Target t : kTargets) {
    const double fused = cell(cells, "multi", Family::mlr, t).train_r2;
    CHECK(fused >= cell(cells, "audio", Family::mlr, t).train_r2 - 1e-12);
    CHECK(fused >= cell(cells, "lyrics", Family::mlr, t).train_r2 - 1e-12);
  }
  CHECK(cell(cells, "audio", Family::rfr, Target::valence).best.count("min_samples_leaf") == 1);
}

TEST_CASE("filtered grid and failed cells") {
  const auto s = make_synthetic(120, 3);
  auto store = store_of(s);
  auto o = fast_options();
  o.families = {Family::mlr};
  const ModalitySubsets subsets{s.audio_cols, {}};
  const auto cells = run_modality_grid(s.features, store, subsets, o);
  REQUIRE(cells.size() == 6);
  CHECK(cell(cells, "audio", Family::mlr, Target::valence).ok);
  const auto& bad = cell(cells, "lyrics", Family::mlr, Target::arousal);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.error.empty());

  EvaluationReport report;
  report.cells = cells;
  CHECK(report.any_failed());
  const auto j = report.to_json();
  CHECK(j["modality_grid"][3]["test_r2"].is_null());

  o.modalities = {"video"};
  CHECK_THROWS_AS(run_modality_grid(s.features, store, subsets, o), InvalidArgument);
}

TEST_CASE("coefficient report recovers the generating model") {
  const auto s = make_synthetic(400, 4);
  const auto store = store_of(s);
  const auto table = coefficient_report(s.features, store);
  for (const auto& rows : table) REQUIRE(rows.size() == 12);
  CHECK(table[0][0].label == "Constant");
  CHECK(table[0][11].label == "Compound sentiment");
  const auto& energy = table[0][2];
  CHECK(energy.label == "Energy");
  CHECK(energy.coefficient == doctest::Approx(2.0).epsilon(0.05));
  CHECK(energy.p_value < 1e-3);
  CHECK(energy.significant);
  CHECK(table[1][5].label == "Acousticness");
  CHECK(table[1][5].coefficient == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(store.test_reads() == 0);

  // Same numbers as the normal-equation oracle on the training rows.
  oracle::Dense rows;
  std::vector<double> y;
  for (Index r : store.rows(Split::train)) {
    std::vector<double> row;
    for (const auto& [label, column] : coefficient_table_layout())
      if (!column.empty()) row.push_back(s.features.values(r, s.features.column(column)));
    rows.push_back(row);
    y.push_back(s.targets(r, 0));
  }
  const auto ref = oracle::ols_normal_equations(rows, y);
  for (std::size_t k = 0; k < 12; ++k) {
    CHECK(table[0][k].coefficient == doctest::Approx(ref.coefficients[k]).epsilon(1e-8));
    CHECK(table[0][k].std_error == doctest::Approx(ref.std_errors[k]).epsilon(1e-8));
  }
}

TEST_CASE("feature subset comparison reuses grid cells") {
  const auto s = make_synthetic(200, 5);
  auto store = store_of(s);
  auto o = fast_options();
  o.families = {Family::mlp};
  const std::vector<std::string> sel_audio = {"danceability", "energy", "acousticness"};
  const std::vector<std::string> sel_lyrics = {"vader_compound", "tfidf_pc001"};
  const auto cells = run_modality_grid(s.features, store, {sel_audio, sel_lyrics}, o);
  const FeatureSubsetDefinitions defs{s.audio_cols, sel_audio, s.lyric_cols, sel_lyrics};
  const auto rows = run_feature_subset_comparison(s.features, store, defs, o, &cells);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].n_features == 23);
  CHECK(rows[4].n_features == 33);
  CHECK(rows[5].n_features == 5);
  CHECK(rows[1].r2[0] == cell(cells, "audio", Family::mlp, Target::valence).test_r2);
  CHECK(rows[5].r2[1] == cell(cells, "multi", Family::mlp, Target::arousal).test_r2);
  for (const auto& r : rows)
    for (double v : r.r2) CHECK(std::isfinite(v));

  EvaluationReport report;
  report.cells = cells;
  report.feature_subsets = rows;
  report.coefficients = coefficient_report(s.features, store);
  CHECK_FALSE(report.any_failed());
  const auto dir = std::filesystem::temp_directory_path() / "mer_eval_report_test";
  std::filesystem::remove_all(dir);
  write_report(report, dir);
  for (const char* f : {"report.json", "table1_modality_grid.md", "table2_coefficients.csv", "table3_feature_subsets.md"})
    CHECK(std::filesystem::exists(dir / f));
  const auto md = read_text_file(dir / "table1_modality_grid.md");
  CHECK(md.find("| Audio | MLP |") != std::string::npos);
  const auto j = nlohmann::json::parse(read_text_file(dir / "report.json"));
  CHECK(j["split_audit"]["passed"] == true);
  CHECK(j["coefficients"]["valence"].size() == 12);
  // Deterministic output.
  write_report(report, dir / "again");
  CHECK(read_text_file(dir / "report.json") == read_text_file(dir / "again" / "report.json"));
  std::filesystem::remove_all(dir);
}
