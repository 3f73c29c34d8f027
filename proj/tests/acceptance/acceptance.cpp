// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance <work_dir>
//
// Set MER_DMDD_DIR to a directory holding mer.conf for the real corpus to
// run criterion 8.

#include "oracles.hpp"

#include "mer/data/dataset.hpp"
#include "mer/numerics/ols.hpp"
#include "mer/numerics/pca.hpp"
#include "mer/pipeline/pipeline.hpp"
#include "mer/regressors/forest.hpp"
#include "mer/regressors/mlp.hpp"
#include "mer/regressors/regressor.hpp"
#include "mer/regressors/svr.hpp"
#include "mer/text/affect.hpp"
#include "mer/text/tfidf.hpp"
#include "mer/text/tokenize.hpp"
#include "mer/text/vader.hpp"
#include "mer/util/io.hpp"
#include "mer/util/random.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace mer;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
  Outcome outcome = Outcome::fail;
  std::string detail;
};

Verdict verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Matrix random_matrix(Rng& rng, Index n, Index d) {
  Matrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

oracle::Dense to_rows(const Matrix& m) {
  oracle::Dense rows(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
  return rows;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// 1. OLS and PCA against independent oracles.
Verdict numerics_oracles() {
  constexpr double tol = 1e-8;
  double worst_ols = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(1, seed));
    const Index n = 30 + static_cast<Index>(rng.below(71));
    const Index d = 1 + static_cast<Index>(rng.below(6));
    const Matrix x = random_matrix(rng, n, d);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
      y(i) = rng.normal();
      for (Index j = 0; j < d; ++j) y(i) += (j % 2 ? -0.4 : 0.8) * x(i, j);
    }
    const auto s = numerics::ols_fit(x, y);
    if (!s.inference_available) return verdict(false, "OLS instance " + std::to_string(seed) + " lacks inference");
    const auto ref = oracle::ols_normal_equations(to_rows(x), to_std(y));
    for (Index j = 0; j <= d; ++j) {
      const auto k = static_cast<std::size_t>(j);
      worst_ols = std::max({worst_ols, std::fabs(s.coefficients(j) - ref.coefficients[k]),
                            std::fabs(s.std_errors(j) - ref.std_errors[k]), std::fabs(s.p_values(j) - ref.p_values[k])});
    }
  }
  double worst_pca = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(2, seed));
    const Index n = 15 + static_cast<Index>(rng.below(40));
    const Index d = 2 + static_cast<Index>(rng.below(8));
    const Matrix x = random_matrix(rng, n, d);
    const Index k = std::min(d, n - 1);
    const auto m = numerics::fit_pca(x, k);
    const auto eig = oracle::symmetric_eigenvalues(oracle::sample_covariance(to_rows(x)));
    for (Index i = 0; i < k; ++i)
      worst_pca = std::max(worst_pca, std::fabs(m.explained_variance(i) - eig[static_cast<std::size_t>(i)]));
  }
  return verdict(worst_ols < tol && worst_pca < tol, "50 OLS instances max |diff| " + fmt(worst_ols) +
                                                         ", 10 PCA instances max |diff| " + fmt(worst_pca) +
                                                         " (tol 1e-8)");
}

// 2. MLP analytic gradient against central differences.
Verdict mlp_gradient() {
  constexpr double h = 1e-5, tol = 1e-4;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(3, seed));
    const Index n = 5 + static_cast<Index>(rng.below(26));
    const Index d = 1 + static_cast<Index>(rng.below(8));
    const int hidden = 1 + static_cast<int>(rng.below(16));
    const double alpha = seed % 3 == 0 ? 0.0 : rng.uniform(0.0, 1.0);
    const Matrix x = random_matrix(rng, n, d);
    const Vector y = random_matrix(rng, n, 1).col(0);
    const auto net = regressors::MlpNetwork::init(d, hidden, derive_seed(4, seed));
    Vector grad;
    regressors::mlp_loss(net, x, y, alpha, &grad);
    const auto rows = to_rows(x);
    const auto ys = to_std(y);
    const auto fd = oracle::central_difference(
        [&](const std::vector<double>& t) { return oracle::mlp_loss_naive(t, rows, ys, hidden, alpha); },
        to_std(net.flatten()), h);
    for (std::size_t k = 0; k < fd.size(); ++k) {
      const double g = grad(static_cast<Index>(k));
      worst = std::max(worst, std::fabs(fd[k] - g) / std::max({std::fabs(fd[k]), std::fabs(g), 1e-6}));
    }
  }
  return verdict(worst < tol, "10 architectures, max relative error " + fmt(worst) + " (tol 1e-4)");
}

// 3. SVR KKT conditions and a tiny-instance QP oracle.
Verdict svr_correctness() {
  constexpr double tol = 1e-3;
  double worst_kkt = 0.0;
  int fits = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(derive_seed(5, seed));
    const Index n = 60 + 40 * static_cast<Index>(seed);
    const Matrix x = random_matrix(rng, n, 2 + static_cast<Index>(seed));
    Vector y(n);
    for (Index i = 0; i < n; ++i) y(i) = std::sin(x(i, 0)) + 0.5 * x(i, 1) * x(i, 1) + 0.1 * rng.normal();
    for (double C : {0.1, 1.0, 10.0}) {
      for (double eps : {0.05, 0.2}) {
        regressors::SvrParams p;
        p.C = C;
        p.epsilon = eps;
        regressors::SvrFitInfo info;
        const Vector f = regressors::fit_svr(x, y, p, &info).predict(x);
        ++fits;
        if (!info.converged) return verdict(false, "SVR fit did not converge");
        double v = std::max(std::fabs(info.beta.sum()), info.beta.cwiseAbs().maxCoeff() - C);
        for (Index i = 0; i < n; ++i) {
          const double r = y(i) - f(i), b = info.beta(i);
          if (b == 0.0) {
            v = std::max(v, std::fabs(r) - eps);
          } else if (b >= C - 1e-9 * C) {
            v = std::max(v, eps - r);
          } else if (b <= -C + 1e-9 * C) {
            v = std::max(v, r + eps);
          } else {
            v = std::max(v, std::fabs(r - (b > 0 ? eps : -eps)));
          }
        }
        worst_kkt = std::max(worst_kkt, v);
      }
    }
  }
  double worst_obj = 0.0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(derive_seed(6, seed));
    const Index n = 3 + static_cast<Index>(seed % 6);
    const Index d = 1 + static_cast<Index>(seed % 3);
    const Matrix x = random_matrix(rng, n, d);
    Vector y(n);
    for (Index i = 0; i < n; ++i) y(i) = x(i, 0) + 0.3 * rng.normal();
    regressors::SvrParams p;
    p.C = seed % 2 ? 0.5 : 4.0;
    p.epsilon = seed % 3 ? 0.1 : 0.02;
    regressors::SvrFitInfo info;
    regressors::fit_svr(x, y, p, &info);
    const auto z = numerics::Standardizer::fit(x).apply(x);
    const auto rows = to_rows(z);
    oracle::Dense k(rows.size(), std::vector<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows.size(); ++j) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < rows[i].size(); ++c) d2 += (rows[i][c] - rows[j][c]) * (rows[i][c] - rows[j][c]);
        k[i][j] = std::exp(-info.gamma * d2);
      }
    worst_obj = std::max(worst_obj, std::fabs(info.objective - oracle::svr_dual_optimum(k, to_std(y), p.C, p.epsilon)));
  }
  return verdict(worst_kkt <= tol && worst_obj <= tol, std::to_string(fits) + " fits, max KKT violation " +
                                                           fmt(worst_kkt) + "; 12 QP instances (N<=8), max objective gap " +
                                                           fmt(worst_obj) + " (tol 1e-3)");
}

// 4. One unbootstrapped tree memorizes distinct rows.
Verdict forest_memorization() {
  std::vector<double> scores;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(derive_seed(7, seed));
    Matrix x;
    if (seed < 2) {
      x = random_matrix(rng, 200, 3);
    } else {
      // Integer grid: many tied values per column, every row distinct.
      x.resize(125, 3);
      for (Index i = 0; i < 125; ++i) {
        x(i, 0) = static_cast<double>(i % 5);
        x(i, 1) = static_cast<double>(i / 5 % 5);
        x(i, 2) = static_cast<double>(i / 25);
      }
    }
    const Vector y = random_matrix(rng, x.rows(), 1).col(0);
    regressors::ForestParams p;
    p.n_trees = 1;
    p.min_samples_leaf = 1;
    p.bootstrap = false;
    p.seed = seed;
    scores.push_back(oracle::r2(to_std(y), to_std(regressors::fit_random_forest(x, y, p).predict(x))));
  }
  const bool ok = std::all_of(scores.begin(), scores.end(), [](double s) { return s == 1.0; });
  std::ostringstream d;
  d << "training R^2 on 3 datasets:";
  for (double s : scores) d << " " << s;
  d << " (exact 1.0)";
  return verdict(ok, d.str());
}

// 5. VADER reference suite, TF-IDF hand values, XANEW linearity.
Verdict text_features() {
  const auto lex = text::SentimentLexicon::load(fs::path(MER_DATA_DIR) / "vader_lexicon.txt");
  const auto rows = parse_csv(read_text_file(fs::path(MER_DATA_DIR) / "vader_reference_suite.tsv"), '\t');
  double worst_vader = 0.0;
  std::size_t sentences = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double expected = std::stod(rows[i].fields.at(0));
    worst_vader = std::max(worst_vader, std::fabs(text::vader_sentiment(rows[i].fields.at(1), lex).compound - expected));
    ++sentences;
  }

  const std::vector<text::TokenSequence> docs = {text::tokenize_lemmatize("a b"), text::tokenize_lemmatize("a c")};
  const auto vm = text::fit_tfidf(docs, 100);
  const Vector v = text::transform_tfidf(docs[0], vm);
  const double idf_bc = std::log(3.0 / 2.0) + 1.0;
  const double norm = std::sqrt(1.0 + idf_bc * idf_bc);
  double worst_tfidf = 0.0;
  const std::vector<std::pair<double, double>> expected = {
      {vm.idf(0), 1.0}, {vm.idf(1), idf_bc}, {vm.idf(2), idf_bc}, {v(0), 1.0 / norm}, {v(1), idf_bc / norm}, {v(2), 0.0}};
  for (const auto& [got, want] : expected) worst_tfidf = std::max(worst_tfidf, std::fabs(got - want));
  const bool terms_ok = vm.terms == std::vector<std::string>{"a", "b", "c"};

  const auto affect = text::AffectLexicon::load(fs::path(MER_DATA_DIR) / "xanew_stub.csv");
  bool linear = true;
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::string a, b;
    for (int w = 0; w < 30; ++w) {
      (w % 2 ? a : b) += affect.words()[rng.below(static_cast<std::uint64_t>(affect.size()))] + (w % 3 ? " " : " zzz ");
    }
    const auto da = text::tokenize_lemmatize(a), db = text::tokenize_lemmatize(b);
    auto dd = da, dab = da;
    dd.tokens.insert(dd.tokens.end(), da.tokens.begin(), da.tokens.end());
    dd.lemmas.insert(dd.lemmas.end(), da.lemmas.begin(), da.lemmas.end());
    dab.tokens.insert(dab.tokens.end(), db.tokens.begin(), db.tokens.end());
    dab.lemmas.insert(dab.lemmas.end(), db.lemmas.begin(), db.lemmas.end());
    const auto fa = text::xanew_features(da, affect), fb = text::xanew_features(db, affect);
    const auto fd = text::xanew_features(dd, affect), fab = text::xanew_features(dab, affect);
    linear = linear && fd.valence == 2.0 * fa.valence && fd.arousal == 2.0 * fa.arousal &&
             fab.valence == fa.valence + fb.valence && fab.arousal == fa.arousal + fb.arousal;
  }
  return verdict(sentences == 100 && worst_vader <= 1e-3 && terms_ok && worst_tfidf <= 1e-3 && linear,
                 "VADER " + std::to_string(sentences) + " sentences max |diff| " + fmt(worst_vader) +
                     " (tol 1e-3); TF-IDF max |diff| " + fmt(worst_tfidf) + " (tol 1e-3); XANEW linearity " +
                     (linear ? "exact" : "violated"));
}

pipeline::RunConfig fixture_config(const fs::path& output_dir) {
  auto config = pipeline::default_config(MER_DATA_DIR);
  pipeline::apply_config_file(config, fs::path(MER_FIXTURE_DIR) / "synthetic" / "mer.conf");
  config.set("output_dir", output_dir.string(), fs::current_path());
  config.validate();
  return config;
}

struct FixtureRun {
  pipeline::RunConfig config;
  nlohmann::ordered_json report;
};

FixtureRun run_fixture(const fs::path& dir) {
  fs::remove_all(dir);
  FixtureRun run{fixture_config(dir / "out"), {}};
  pipeline::build_features(run.config);
  pipeline::evaluate(run.config);
  pipeline::run_rfe(run.config);
  pipeline::train(run.config);
  run.report = nlohmann::ordered_json::parse(read_text_file(run.config.output_dir / "report" / "report.json"));
  return run;
}

const nlohmann::ordered_json* find_cell(const nlohmann::ordered_json& report, const std::string& modality,
                                        const std::string& family, const std::string& target) {
  for (const auto& c : report["modality_grid"])
    if (c["modality"] == modality && c["family"] == family && c["target"] == target) return &c;
  return nullptr;
}

double cell_r2(const nlohmann::ordered_json& report, const std::string& modality, const std::string& family,
               const std::string& target) {
  const auto* c = find_cell(report, modality, family, target);
  return c && c->at("test_r2").is_number() ? c->at("test_r2").get<double>() : std::nan("");
}

// 6. Recovery on the synthetic fixture.
Verdict synthetic_recovery(const FixtureRun& run) {
  const auto truth = nlohmann::json::parse(read_text_file(fs::path(MER_FIXTURE_DIR) / "synthetic" / "truth.json"));
  const double star_v = truth["valence"]["r2_star"], star_a = truth["arousal"]["r2_star"];
  const double r2_v = cell_r2(run.report, "multi", "mlr", "valence");
  const double r2_a = cell_r2(run.report, "multi", "mlr", "arousal");
  const bool r2_ok = std::fabs(r2_v - star_v) <= 0.07 && std::fabs(r2_a - star_a) <= 0.07;

  std::set<std::string> injected;
  for (const auto& c : truth["injected_audio"]) injected.insert(c.get<std::string>());
  auto corpus = data::load_corpus(run.config.dataset_csv, run.config.lyrics_dir, run.config.audio_store);
  const auto& names = data::audio_column_names();
  selection::FeatureMatrix audio;
  audio.values.resize(static_cast<Index>(corpus.size()), data::kAudioColumns);
  audio.names.assign(names.begin(), names.end());
  audio.tags.assign(names.size(), selection::Modality::audio);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    audio.values.row(static_cast<Index>(i)) = data::dummy_encode_audio(corpus.audio.at(corpus.records[i].song_id));
    audio.row_ids.push_back(corpus.records[i].song_id);
  }
  int exact = 0;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    data::assign_splits(corpus, run.config.ratios, derive_seed(run.config.seed, rep));
    std::vector<Index> train;
    std::array<std::vector<double>, 2> y;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (corpus.records[i].split != data::Split::train) continue;
      train.push_back(static_cast<Index>(i));
      y[0].push_back(corpus.records[i].valence_target);
      y[1].push_back(corpus.records[i].arousal_target);
    }
    const std::array<Vector, 2> targets = {Eigen::Map<const Vector>(y[0].data(), static_cast<Index>(y[0].size())),
                                           Eigen::Map<const Vector>(y[1].data(), static_cast<Index>(y[1].size()))};
    const auto chosen = selection::select_significant_audio(audio.select_rows(train), targets, run.config.alpha);
    if (std::set<std::string>(chosen.columns.begin(), chosen.columns.end()) == injected) ++exact;
  }
  return verdict(r2_ok && exact >= 18, "multi MLR test R^2 valence " + fmt(r2_v) + " vs R2* " + fmt(star_v) +
                                           ", arousal " + fmt(r2_a) + " vs " + fmt(star_a) +
                                           " (tol 0.07); exact audio recovery " + std::to_string(exact) +
                                           "/20 (need 18)");
}

// 7. Table shapes and matrix dimensions.
Verdict structure(const FixtureRun& run) {
  const auto& r = run.report;
  const std::size_t cells = r["modality_grid"].size();
  const std::size_t rows_v = r["coefficients"]["valence"].size(), rows_a = r["coefficients"]["arousal"].size();
  const auto features = pipeline::load_features(run.config.features_path());
  const Index fused = features.fused().with_modalities({selection::Modality::audio, selection::Modality::sentiment,
                                                        selection::Modality::tfidf}).cols();
  const auto& dims = r["metadata"]["dimensions"];
  const Index selected = dims["selected_audio"].get<Index>() + dims["selected_lyrics"].get<Index>();
  bool multi_cells_ok = true;
  for (const auto& c : r["modality_grid"])
    if (c["modality"] == "multi") multi_cells_ok = multi_cells_ok && c["n_features"].get<Index>() == selected;
  const std::string best = r["lyric_combinations"]["best"];
  const bool ok = cells == 24 && rows_v == 12 && rows_a == 12 && fused == 127 &&
                  dims["audio_sentiment_tfidf"].get<Index>() == 127 && selected == 109 &&
                  dims["selected_multi"].get<Index>() == 109 && multi_cells_ok;
  return verdict(ok, std::to_string(cells) + " grid cells (24); coefficient rows " + std::to_string(rows_v) + "/" +
                         std::to_string(rows_a) + " (12); fused d " + std::to_string(fused) + " (127); selected d " +
                         std::to_string(selected) + " = audio " + dims["selected_audio"].dump() + " + " + best + " " +
                         dims["selected_lyrics"].dump() + " (109)");
}

// 8. Reference numbers on the real corpus.
Verdict dmdd(const fs::path& work) {
  const char* dir = std::getenv("MER_DMDD_DIR");
  if (!dir || !*dir) return {Outcome::skip, "MER_DMDD_DIR not set"};
  auto config = pipeline::default_config(MER_DATA_DIR);
  pipeline::apply_config_file(config, fs::path(dir) / "mer.conf");
  config.set("output_dir", (work / "dmdd").string(), fs::current_path());
  config.validate();
  pipeline::build_features(config);
  const auto report = pipeline::evaluate(config).to_json();
  const double mlr_v = cell_r2(report, "multi", "mlr", "valence");
  const double mlp_a = cell_r2(report, "audio", "mlp", "arousal");
  std::map<std::string, std::array<double, 2>> rows;
  for (const auto& row : report["feature_subsets"]) {
    const auto& v = row["valence_r2"];
    const auto& a = row["arousal_r2"];
    rows[row["feature_set"]] = {v.is_number() ? v.get<double>() : std::nan(""),
                                a.is_number() ? a.get<double>() : std::nan("")};
  }
  bool selected_better = rows.size() == 6;
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"selected_A", "all_features_A"},
      {"selected_L", "all_features_L"},
      {"selected_A + selected_L", "all_features_A + all_features_L"}};
  for (const auto& [sel, all] : pairs)
    for (int t = 0; t < 2 && selected_better; ++t) selected_better = rows.count(sel) && rows[sel][t] > rows[all][t];
  const std::string best = report["lyric_combinations"]["best"];
  const bool ok = std::fabs(mlr_v - 0.236) <= 0.03 && std::fabs(mlp_a - 0.203) <= 0.03 && selected_better &&
                  best == "tfidf+vader";
  return verdict(ok, "multi MLR valence " + fmt(mlr_v) + " (0.236 +- 0.03), audio MLP arousal " + fmt(mlp_a) +
                         " (0.203 +- 0.03), selected rows beat all-features rows: " + (selected_better ? "yes" : "no") +
                         ", best combination " + best);
}

// 9. Byte-identical outputs on rerun.
Verdict determinism(const FixtureRun& first, const FixtureRun& second) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(first.config.output_dir))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), first.config.output_dir));
  std::sort(files.begin(), files.end());
  std::size_t json = 0;
  std::vector<std::string> differing;
  for (const auto& f : files) {
    const auto b = second.config.output_dir / f;
    if (!fs::exists(b) || read_text_file(first.config.output_dir / f) != read_text_file(b)) differing.push_back(f.string());
    if (f.extension() == ".json") ++json;
  }
  std::size_t second_count = 0;
  for (const auto& e : fs::recursive_directory_iterator(second.config.output_dir)) second_count += e.is_regular_file();
  const bool ok = differing.empty() && second_count == files.size() && json > 0;
  return verdict(ok, "features, evaluate, rfe and train run twice: " + std::to_string(files.size()) + " files (" +
                         std::to_string(json) + " JSON), " + std::to_string(differing.size()) + " differ" +
                         (differing.empty() ? "" : ", first: " + differing.front()));
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "mer_acceptance";
  fs::create_directories(work);

  std::optional<FixtureRun> first, second;
  auto fixture = [&]() -> const FixtureRun& {
    if (!first) first = run_fixture(work / "run1");
    return *first;
  };

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"numerics oracles", numerics_oracles},
      {"MLP gradient check", mlp_gradient},
      {"SVR correctness", svr_correctness},
      {"RFR memorization", forest_memorization},
      {"text features", text_features},
      {"synthetic recovery", [&] { return synthetic_recovery(fixture()); }},
      {"structural reproduction", [&] { return structure(fixture()); }},
      {"DMDD reference numbers", [&] { return dmdd(work); }},
      {"determinism",
       [&] {
         const auto& a = fixture();
         second = run_fixture(work / "run2");
         return determinism(a, *second);
       }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::skip ? "SKIP" : "FAIL";
    failed += v.outcome == Outcome::fail;
    std::printf("criterion %zu %s  %s: %s [%.1fs]\n", i + 1, tag, criteria[i].first, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
