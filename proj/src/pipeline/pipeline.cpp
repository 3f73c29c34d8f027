#include "mer/pipeline/pipeline.hpp"

#include "mer/numerics/pca.hpp"
#include "mer/spotify/client.hpp"
#include "mer/text/affect.hpp"
#include "mer/text/tfidf.hpp"
#include "mer/text/tokenize.hpp"
#include "mer/text/vader.hpp"
#include "mer/util/io.hpp"
#include "mer/util/random.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <limits>

namespace mer::pipeline {
namespace fs = std::filesystem;
using evaluation::EvaluationReport;
using evaluation::TargetStore;
using regressors::Family;
using selection::FeatureMatrix;
using selection::Modality;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_exists(const fs::path& p, const char* what) {
  if (p.empty()) throw InfrastructureError(std::string(what) + " is not configured");
  if (!fs::exists(p)) throw InfrastructureError(std::string(what) + " not found: " + p.string());
}

std::string numbered(const std::string& prefix, Index i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03lld", static_cast<long long>(i + 1));
  return prefix + buf;
}

FeatureMatrix make_matrix(Matrix values, std::vector<std::string> names, Modality tag,
                          const std::vector<std::string>& row_ids) {
  FeatureMatrix m;
  m.values = std::move(values);
  m.names = std::move(names);
  m.tags.assign(m.names.size(), tag);
  m.row_ids = row_ids;
  m.validate();
  return m;
}

Matrix take_rows(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
  return out;
}

// PCA fitted on training rows, applied to all rows.
FeatureMatrix pca_block(const Matrix& x, const std::vector<Index>& train, Index k, const std::string& prefix,
                        Modality tag, const std::vector<std::string>& row_ids, std::uint64_t seed,
                        const fs::path& model_path) {
  const Index n_train = static_cast<Index>(train.size());
  const Index kk = std::min({k, x.cols(), n_train - 1});
  if (kk < 1) throw InvalidArgument(prefix + ": not enough training rows or columns for PCA");
  numerics::PcaOptions opt;
  opt.seed = seed;
  const auto model = numerics::fit_pca(take_rows(x, train), kk, opt);
  write_file_atomic(model_path, model.to_json().dump(1) + "\n");
  std::vector<std::string> names;
  for (Index i = 0; i < kk; ++i) names.push_back(numbered(prefix, i));
  if (kk < k) spdlog::warn("{}: kept {} components instead of {} (limited by data)", prefix, kk, k);
  return make_matrix(numerics::transform_pca(model, x), names, tag, row_ids);
}

const char* split_name(data::Split s) {
  return s == data::Split::train ? "train" : s == data::Split::validation ? "validation" : "test";
}

data::Split parse_split(const std::string& s) {
  if (s == "train") return data::Split::train;
  if (s == "validation") return data::Split::validation;
  if (s == "test") return data::Split::test;
  throw IngestError("unknown split '" + s + "'");
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::array<selection::RfeResult, 2> rfe_both(const FeatureSet& features, const TargetStore& targets,
                                             const std::vector<std::string>& columns, Index n_keep) {
  const auto x = features.fused().select_rows(targets.rows(data::Split::train)).select_columns(columns);
  const Index keep = std::min<Index>(n_keep, x.cols());
  return {selection::rfe(x, targets.targets(Target::valence, data::Split::train), keep),
          selection::rfe(x, targets.targets(Target::arousal, data::Split::train), keep)};
}

double json_num(const nlohmann::ordered_json& j) { return j.is_number() ? j.get<double>() : kNaN; }

Target parse_target(const std::string& s) {
  if (s == "valence") return Target::valence;
  if (s == "arousal") return Target::arousal;
  throw IngestError("unknown target '" + s + "'");
}

}  // namespace

FeatureMatrix FeatureSet::fused() const { return selection::fuse({audio, sentiment, tfidf, xanew}); }
FeatureMatrix FeatureSet::lyrics() const { return selection::fuse({sentiment, tfidf, xanew}); }
TargetStore FeatureSet::target_store() const { return TargetStore(row_ids, targets, splits); }

nlohmann::ordered_json build_features(const RunConfig& config) {
  config.validate();
  require_exists(config.dataset_csv, "dataset_csv");
  require_exists(config.lyrics_dir, "lyrics_dir");
  require_exists(config.audio_store, "audio_store");
  require_exists(config.vader_lexicon, "vader_lexicon");
  require_exists(config.xanew_lexicon, "xanew_lexicon");

  data::LoadStats stats;
  auto corpus = data::load_corpus(config.dataset_csv, config.lyrics_dir, config.audio_store, &stats);
  data::assign_splits(corpus, config.ratios, config.seed);
  const auto vader = text::SentimentLexicon::load(config.vader_lexicon);
  const auto xanew = text::AffectLexicon::load(config.xanew_lexicon);

  const Index n = static_cast<Index>(corpus.size());
  std::vector<std::string> ids;
  std::vector<Index> train;
  for (Index i = 0; i < n; ++i) {
    ids.push_back(corpus.records[static_cast<std::size_t>(i)].song_id);
    if (corpus.records[static_cast<std::size_t>(i)].split == data::Split::train) train.push_back(i);
  }
  if (train.size() < 2) throw InvalidArgument("the training split has fewer than 2 songs");

  Matrix audio(n, data::kAudioColumns), sentiment(n, 4), xval(n, xanew.size()), xaro(n, xanew.size());
  std::vector<text::TokenSequence> docs(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto& rec = corpus.records[static_cast<std::size_t>(i)];
    const auto& lyrics = corpus.lyrics.at(rec.song_id);
    audio.row(i) = data::dummy_encode_audio(corpus.audio.at(rec.song_id)).transpose();
    const auto s = text::vader_sentiment(lyrics, vader);
    sentiment.row(i) << s.neg, s.neu, s.pos, s.compound;
    docs[static_cast<std::size_t>(i)] = text::tokenize_lemmatize(lyrics);
    const auto a = text::xanew_features(docs[static_cast<std::size_t>(i)], xanew);
    xval.row(i) = a.valence.transpose();
    xaro.row(i) = a.arousal.transpose();
  }
  std::vector<text::TokenSequence> train_docs;
  for (Index i : train) train_docs.push_back(docs[static_cast<std::size_t>(i)]);
  const auto vocab = text::fit_tfidf(train_docs, config.max_vocab);
  const Matrix tfidf = text::transform_tfidf(docs, vocab);

  const fs::path dir = config.features_path();
  fs::create_directories(dir / "models");
  write_file_atomic(dir / "models" / "vocabulary.json", vocab.to_json().dump(1) + "\n");

  const auto& audio_names = data::audio_column_names();
  const auto audio_m = make_matrix(audio, {audio_names.begin(), audio_names.end()}, Modality::audio, ids);
  const auto sentiment_m =
      make_matrix(sentiment, {"vader_neg", "vader_neu", "vader_pos", "vader_compound"}, Modality::sentiment, ids);
  const auto tfidf_m = pca_block(tfidf, train, config.pca_k, "tfidf_pc", Modality::tfidf, ids,
                                 derive_seed(config.seed, "pca-tfidf"), dir / "models" / "tfidf_pca.json");
  const auto xval_m = pca_block(xval, train, config.pca_k, "xanew_val_pc", Modality::xanew, ids,
                                derive_seed(config.seed, "pca-xanew-valence"), dir / "models" / "xanew_valence_pca.json");
  const auto xaro_m = pca_block(xaro, train, config.pca_k, "xanew_aro_pc", Modality::xanew, ids,
                                derive_seed(config.seed, "pca-xanew-arousal"), dir / "models" / "xanew_arousal_pca.json");
  const auto xanew_m = selection::fuse({xval_m, xaro_m});

  selection::save_feature_csv(dir / "audio.csv", audio_m);
  selection::save_feature_csv(dir / "sentiment.csv", sentiment_m);
  selection::save_feature_csv(dir / "tfidf.csv", tfidf_m);
  selection::save_feature_csv(dir / "xanew.csv", xanew_m);

  std::string splits = "song_id,split,valence,arousal\n";
  std::array<std::size_t, 3> counts{};
  for (const auto& rec : corpus.records) {
    ++counts[static_cast<std::size_t>(rec.split)];
    splits += csv_escape(rec.song_id) + "," + split_name(rec.split) + "," + format_double(rec.valence_target) + "," +
              format_double(rec.arousal_target) + "\n";
  }
  write_file_atomic(dir / "splits.csv", splits);

  nlohmann::ordered_json manifest;
  manifest["format"] = "mer.features";
  manifest["version"] = 1;
  manifest["seed"] = config.seed;
  manifest["songs"] = {{"csv_rows", stats.csv_rows},
                       {"missing_lyrics", stats.missing_lyrics},
                       {"missing_audio", stats.missing_audio},
                       {"kept", stats.kept},
                       {"train", counts[0]},
                       {"validation", counts[1]},
                       {"test", counts[2]}};
  manifest["columns"] = {{"audio", audio_m.cols()},
                         {"sentiment", sentiment_m.cols()},
                         {"tfidf", tfidf_m.cols()},
                         {"xanew", xanew_m.cols()},
                         {"vocabulary", vocab.size()}};
  manifest["config"] = config.to_json();
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  spdlog::info("wrote features for {} songs to {}", n, dir.string());
  return manifest;
}

FeatureSet load_features(const fs::path& dir) {
  FeatureSet f;
  const std::pair<const char*, FeatureMatrix*> files[] = {
      {"audio.csv", &f.audio}, {"sentiment.csv", &f.sentiment}, {"tfidf.csv", &f.tfidf}, {"xanew.csv", &f.xanew}};
  for (const auto& [name, target] : files) {
    require_exists(dir / name, "feature file");
    *target = selection::load_feature_csv(dir / name);
  }
  require_exists(dir / "splits.csv", "feature file");
  const auto rows = parse_csv(read_text_file(dir / "splits.csv"));
  if (rows.empty() || rows[0].fields != std::vector<std::string>{"song_id", "split", "valence", "arousal"}) {
    throw IngestError("splits.csv: expected header song_id,split,valence,arousal");
  }
  f.targets.resize(static_cast<Index>(rows.size() - 1), 2);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r].fields;
    if (fields.size() != 4) throw IngestError("splits.csv line " + std::to_string(rows[r].line) + ": expected 4 fields");
    f.row_ids.push_back(fields[0]);
    f.splits.push_back(parse_split(fields[1]));
    try {
      f.targets(static_cast<Index>(r - 1), 0) = std::stod(fields[2]);
      f.targets(static_cast<Index>(r - 1), 1) = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw IngestError("splits.csv line " + std::to_string(rows[r].line) + ": bad target value");
    }
  }
  for (const auto& [name, m] : files) {
    if (m->row_ids != f.row_ids) throw IngestError(std::string(name) + " rows do not match splits.csv");
  }
  return f;
}

Selections select_features(const FeatureSet& features, const TargetStore& targets, const RunConfig& config) {
  const auto train = targets.rows(data::Split::train);
  const auto validation = targets.rows(data::Split::validation);
  if (validation.empty()) throw InvalidArgument("the lyric combination search needs a non-empty validation split");
  const std::array<Vector, 2> y_train = {targets.targets(Target::valence, data::Split::train),
                                         targets.targets(Target::arousal, data::Split::train)};
  const std::array<Vector, 2> y_val = {targets.targets(Target::valence, data::Split::validation),
                                       targets.targets(Target::arousal, data::Split::validation)};
  Selections s;
  s.audio = selection::select_significant_audio(features.audio.select_rows(train), y_train, config.alpha);
  spdlog::info("selected {} audio columns", s.audio.columns.size());
  s.lyrics = selection::search_lyric_combination(features.lyrics(), train, validation, y_train, y_val, config.seed,
                                                 config.jobs, config.ranking);
  spdlog::info("best lyric combination: {}", s.lyrics.rows[s.lyrics.best].name);
  return s;
}

evaluation::EvaluationOptions evaluation_options(const RunConfig& config) {
  evaluation::EvaluationOptions o;
  o.seed = config.seed;
  o.jobs = config.jobs;
  o.folds = config.folds;
  o.families = config.families;
  o.modalities = config.modalities;
  for (Family f : regressors::kFamilies) o.grids[f] = config.grid(f);
  o.base_params = config.base_params;
  return o;
}

EvaluationReport evaluate(const RunConfig& config) {
  config.validate();
  const auto features = load_features(config.features_path());
  auto targets = features.target_store();
  const auto fused = features.fused();
  const auto sel = select_features(features, targets, config);
  const auto options = evaluation_options(config);

  EvaluationReport report;
  report.audio_selection = sel.audio;
  report.combination = sel.lyrics;
  const evaluation::ModalitySubsets subsets{sel.audio.columns, sel.lyrics.subset.columns};
  report.cells = evaluation::run_modality_grid(fused, targets, subsets, options);

  const bool full_grid = config.modalities.size() == 3 &&
                         std::find(config.families.begin(), config.families.end(), Family::mlp) != config.families.end();
  if (full_grid) {
    const evaluation::FeatureSubsetDefinitions defs{
        features.audio.names, sel.audio.columns, features.lyrics().names, sel.lyrics.subset.columns};
    report.feature_subsets = evaluation::run_feature_subset_comparison(fused, targets, defs, options, &report.cells);
  }
  report.coefficients = evaluation::coefficient_report(fused, targets);
  const auto rfe = rfe_both(features, targets, concat(sel.audio.columns, sel.lyrics.subset.columns), config.rfe_n_keep);
  report.rfe = {rfe[0], rfe[1]};
  report.early_test_requests = targets.early_test_requests();
  report.test_reads = targets.test_reads();

  nlohmann::ordered_json meta;
  meta["seed"] = config.seed;
  meta["songs"] = {{"train", targets.rows(data::Split::train).size()},
                   {"validation", targets.rows(data::Split::validation).size()},
                   {"test", targets.rows(data::Split::test).size()}};
  meta["dimensions"] = {
      {"audio", features.audio.cols()},
      {"sentiment", features.sentiment.cols()},
      {"tfidf", features.tfidf.cols()},
      {"xanew", features.xanew.cols()},
      {"audio_sentiment_tfidf", features.audio.cols() + features.sentiment.cols() + features.tfidf.cols()},
      {"selected_audio", sel.audio.columns.size()},
      {"selected_lyrics", sel.lyrics.subset.columns.size()},
      {"selected_multi", sel.audio.columns.size() + sel.lyrics.subset.columns.size()}};
  meta["config"] = config.to_json();
  report.metadata = meta;
  evaluation::write_report(report, config.output_dir / "report");
  return report;
}

nlohmann::ordered_json train(const RunConfig& config) {
  config.validate();
  const auto features = load_features(config.features_path());
  auto targets = features.target_store();
  const auto fused = features.fused();
  const auto sel = select_features(features, targets, config);
  const evaluation::ModalitySubsets subsets{sel.audio.columns, sel.lyrics.subset.columns};
  const auto train_x = fused.select_rows(targets.rows(data::Split::train));
  const auto val_x = fused.select_rows(targets.rows(data::Split::validation));
  const fs::path dir = config.output_dir / "models";
  fs::create_directories(dir);

  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const auto& m : config.modalities) {
    const auto cols = subsets.columns(m);
    const auto xt = train_x.select_columns(cols);
    const auto xv = val_x.select_columns(cols);
    for (Family f : config.families) {
      for (Target t : kTargets) {
        const std::string tag = m + "_" + std::string(regressors::to_string(f)) + "_" + to_string(t);
        regressors::RegressorSpec base;
        base.family = f;
        base.seed = derive_seed(config.seed, "grid/" + m + "/" + std::string(regressors::to_string(f)) + "/" + to_string(t));
        if (auto it = config.base_params.find(f); it != config.base_params.end()) base.hyperparameters = it->second;
        const auto search = regressors::grid_search(base, config.grid(f), xt.values,
                                                    targets.targets(t, data::Split::train), config.folds,
                                                    derive_seed(config.seed, "cv"), config.jobs, xt.names);
        const double val_r2 = xv.rows() >= 2
                                  ? evaluation::r2(targets.targets(t, data::Split::validation), search.model.predict(xv.values))
                                  : kNaN;
        nlohmann::ordered_json artifact;
        artifact["modality"] = m;
        artifact["target"] = to_string(t);
        artifact["grid"] = nlohmann::ordered_json::parse(search.to_json().dump());
        artifact["model"] = nlohmann::ordered_json::parse(search.model.to_json().dump());
        write_file_atomic(dir / (tag + ".json"), artifact.dump() + "\n");
        summary.push_back({{"modality", m},
                           {"family", regressors::to_string(f)},
                           {"target", to_string(t)},
                           {"n_features", xt.cols()},
                           {"cv_r2", search.mean_cv_r2[search.best_index]},
                           {"validation_r2", std::isfinite(val_r2) ? nlohmann::ordered_json(val_r2) : nlohmann::ordered_json()},
                           {"model_file", tag + ".json"}});
        spdlog::info("{}: validation R^2 {:.4f}", tag, val_r2);
      }
    }
  }
  write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

std::array<selection::RfeResult, 2> run_rfe(const RunConfig& config) {
  config.validate();
  const auto features = load_features(config.features_path());
  const auto targets = features.target_store();
  const auto sel = select_features(features, targets, config);
  auto result = rfe_both(features, targets, concat(sel.audio.columns, sel.lyrics.subset.columns), config.rfe_n_keep);
  EvaluationReport r;
  r.rfe = {result[0], result[1]};
  const fs::path dir = config.output_dir / "rfe";
  fs::create_directories(dir);
  nlohmann::ordered_json j;
  for (Target t : kTargets) {
    const auto& res = result[static_cast<std::size_t>(t)];
    j[to_string(t)] = {{"survivors", res.survivors.columns}, {"elimination_order", res.elimination_order}};
  }
  write_file_atomic(dir / "rfe.json", j.dump(2) + "\n");
  write_file_atomic(dir / "rfe.md", evaluation::rfe_markdown(r));
  return result;
}

EvaluationReport report_from_json(const nlohmann::ordered_json& j) {
  if (j.value("format", "") != "mer.evaluation_report") throw IngestError("not an evaluation report");
  EvaluationReport r;
  r.metadata = j.at("metadata");
  r.early_test_requests = j.at("split_audit").at("test_targets_requested_before_scoring").get<int>();
  r.test_reads = j.at("split_audit").at("test_target_reads").get<int>();
  if (j.contains("audio_selection")) {
    const auto& a = j["audio_selection"];
    r.audio_selection = selection::FeatureSubset{a.at("columns").get<std::vector<std::string>>(),
                                                 a.at("procedure").get<std::string>(), a.at("provenance")};
  }
  if (j.contains("lyric_combinations")) {
    const auto& c = j["lyric_combinations"];
    selection::CombinationSearchResult res;
    res.ranking = c.at("ranking") == "mean_r2" ? selection::CombinationRanking::mean_r2
                                                : selection::CombinationRanking::mean_rank;
    for (const auto& row : c.at("rows")) {
      selection::CombinationRow cr;
      cr.name = row.at("combination");
      cr.n_features = row.at("n_features");
      std::size_t k = 0;
      for (const auto& [key, v] : row.at("validation_r2").items()) {
        if (k < 8) cr.scores[k++] = json_num(v);
      }
      cr.aggregate = json_num(row.at("aggregate"));
      if (cr.name == c.at("best")) res.best = res.rows.size();
      res.rows.push_back(cr);
    }
    res.subset.columns = c.at("columns").get<std::vector<std::string>>();
    res.subset.procedure = "lyric_combination_search";
    res.subset.provenance["combination"] = c.at("best");
    res.subset.provenance["ranking"] = c.at("ranking");
    r.combination = res;
  }
  for (const auto& c : j.at("modality_grid")) {
    evaluation::GridCell cell;
    cell.modality = c.at("modality");
    cell.family = regressors::parse_family(c.at("family").get<std::string>());
    cell.target = parse_target(c.at("target"));
    cell.n_features = c.at("n_features");
    cell.ok = c.at("ok");
    cell.test_r2 = json_num(c.at("test_r2"));
    if (cell.ok) {
      cell.train_r2 = json_num(c.at("train_r2"));
      cell.cv_r2 = json_num(c.at("cv_r2"));
      for (const auto& [k, v] : c.at("hyperparameters").items()) cell.best[k] = v.get<double>();
    } else {
      cell.error = c.value("error", "");
    }
    r.cells.push_back(cell);
  }
  for (const auto& s : j.at("feature_subsets")) {
    r.feature_subsets.push_back({s.at("modality"), s.at("feature_set"), s.at("n_features").get<Index>(),
                                 {json_num(s.at("valence_r2")), json_num(s.at("arousal_r2"))}});
  }
  if (j.contains("coefficients")) {
    std::array<std::vector<evaluation::CoefficientRow>, 2> coef;
    const auto& layout = evaluation::coefficient_table_layout();
    for (Target t : kTargets) {
      for (const auto& row : j["coefficients"].at(to_string(t))) {
        evaluation::CoefficientRow cr;
        cr.label = row.at("feature");
        for (const auto& [label, column] : layout)
          if (label == cr.label) cr.column = column;
        cr.coefficient = json_num(row.at("coefficient"));
        cr.std_error = json_num(row.at("std_error"));
        cr.p_value = json_num(row.at("p_value"));
        cr.significant = row.at("significant");
        coef[static_cast<std::size_t>(t)].push_back(cr);
      }
    }
    r.coefficients = coef;
  }
  if (j.contains("rfe")) {
    for (Target t : kTargets) {
      if (!j["rfe"].contains(to_string(t))) continue;
      const auto& x = j["rfe"][to_string(t)];
      selection::RfeResult res;
      res.survivors.columns = x.at("survivors").get<std::vector<std::string>>();
      res.survivors.procedure = "rfe";
      res.elimination_order = x.at("elimination_order").get<std::vector<std::string>>();
      r.rfe[static_cast<std::size_t>(t)] = res;
    }
  }
  return r;
}

std::string render_report(const RunConfig& config) {
  const fs::path dir = config.output_dir / "report";
  require_exists(dir / "report.json", "report");
  const auto report = report_from_json(nlohmann::ordered_json::parse(read_text_file(dir / "report.json")));
  evaluation::write_report(report, dir);
  return evaluation::table1_markdown(report);
}

FetchOutcome fetch(const RunConfig& config, std::shared_ptr<spotify::HttpTransport> transport) {
  require_exists(config.dataset_csv, "dataset_csv");
  if (config.audio_store.empty()) throw InfrastructureError("audio_store is not configured");
  const auto records = data::load_song_table(config.dataset_csv);
  FetchOutcome out;
  out.songs = records.size();
  data::AudioStore store;
  if (fs::exists(config.audio_store)) store = data::load_audio_store(config.audio_store);

  std::vector<data::SongRecord> pending;
  for (const auto& r : records) {
    if (store.count(r.song_id)) {
      ++out.skipped_cached;
    } else {
      pending.push_back(r);
    }
  }
  if (pending.empty()) {
    if (!fs::exists(config.audio_store)) {
      if (config.audio_store.has_parent_path()) fs::create_directories(config.audio_store.parent_path());
      data::save_audio_store(config.audio_store, store);
    }
    return out;
  }

  spotify::ClientOptions opt;
  opt.token_url = config.spotify_token_url;
  opt.api_base = config.spotify_api_base;
  opt.concurrency = config.spotify_concurrency;
  opt.match_threshold = config.match_threshold;
  spotify::SpotifyClient client(spotify::ApiCredentials::from_env(), std::move(transport), opt);
  const auto resolved = client.resolve_tracks(pending);
  out.matched = resolved.matches.size();
  out.unmatched = resolved.unmatched.size();
  fs::create_directories(config.output_dir);
  std::string unmatched = "song_id,reason\n";
  for (const auto& u : resolved.unmatched) unmatched += csv_escape(u.song_id) + "," + csv_escape(u.reason) + "\n";
  write_file_atomic(config.output_dir / "unmatched.csv", unmatched);
  if (!resolved.matches.empty()) {
    if (config.audio_store.has_parent_path()) fs::create_directories(config.audio_store.parent_path());
    const auto s = client.fetch_audio_features(resolved.matches, config.audio_store);
    out.fetched = s.fetched;
    out.without_features = s.null_features.size() + s.invalid.size();
  }
  return out;
}

}  // namespace mer::pipeline
