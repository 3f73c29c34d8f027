#include "mer/numerics/ols.hpp"
#include "mer/numerics/pca.hpp"
#include "mer/pipeline/pipeline.hpp"
#include "mer/regressors/regressor.hpp"
#include "mer/text/tfidf.hpp"
#include "mer/text/tokenize.hpp"
#include "mer/text/vader.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#ifndef MER_DEFAULT_DATA_DIR
#define MER_DEFAULT_DATA_DIR "data"
#endif

namespace py = pybind11;
using namespace mer;

namespace {

std::vector<text::TokenSequence> tokenize_all(const std::vector<std::string>& docs) {
  std::vector<text::TokenSequence> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(text::tokenize_lemmatize(d));
  return out;
}

regressors::RegressorSpec make_spec(const std::string& family, const regressors::Hyperparameters& params,
                                    std::uint64_t seed) {
  return {regressors::parse_family(family), params, seed};
}

pipeline::RunConfig make_config(const std::optional<std::filesystem::path>& path,
                                const std::map<std::string, std::string>& overrides,
                                const std::filesystem::path& data_dir) {
  auto config = pipeline::default_config(data_dir);
  if (path) pipeline::apply_config_file(config, *path);
  for (const auto& [k, v] : overrides) config.set(k, v, std::filesystem::current_path());
  config.validate();
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Valence/arousal regression from audio features and lyrics";

  auto base = py::register_exception<Error>(m, "MerError", PyExc_RuntimeError);
  py::register_exception<pipeline::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<pipeline::InfrastructureError>(m, "InfrastructureError", base.ptr());

  m.attr("default_data_dir") = std::string(MER_DEFAULT_DATA_DIR);

  // Text.
  m.def(
      "tokenize",
      [](const std::string& s) {
        auto t = text::tokenize_lemmatize(s);
        return py::make_tuple(t.tokens, t.lemmas);
      },
      "(tokens, lemmas) of a text");
  m.def("lemmatize", [](const std::string& w) { return text::lemmatize_word(w); });

  py::class_<text::SentimentLexicon>(m, "SentimentLexicon")
      .def_static("load", &text::SentimentLexicon::load)
      .def("__contains__", &text::SentimentLexicon::contains)
      .def("__len__", [](const text::SentimentLexicon& l) { return l.ratings().size(); });
  m.def(
      "vader",
      [](const std::string& s, const text::SentimentLexicon& lex) {
        const auto r = text::vader_sentiment(s, lex);
        py::dict d;
        d["neg"] = r.neg;
        d["neu"] = r.neu;
        d["pos"] = r.pos;
        d["compound"] = r.compound;
        return d;
      },
      py::arg("text"), py::arg("lexicon"));

  py::class_<text::VocabularyModel>(m, "Vocabulary")
      .def_readonly("terms", &text::VocabularyModel::terms)
      .def_readonly("idf", &text::VocabularyModel::idf)
      .def_readonly("n_docs", &text::VocabularyModel::n_docs)
      .def("__len__", &text::VocabularyModel::size)
      .def("transform",
           [](const text::VocabularyModel& vm, const std::vector<std::string>& docs) {
             const auto t = tokenize_all(docs);
             return text::transform_tfidf(t, vm);
           })
      .def("to_json", [](const text::VocabularyModel& vm) { return vm.to_json().dump(); });
  m.def(
      "fit_tfidf",
      [](const std::vector<std::string>& docs, std::size_t max_vocab) {
        const auto t = tokenize_all(docs);
        return text::fit_tfidf(t, max_vocab);
      },
      py::arg("docs"), py::arg("max_vocab") = text::kDefaultMaxVocabulary);

  // Numerics.
  m.def(
      "ols_fit",
      [](const Matrix& x, const Vector& y) {
        const auto s = numerics::ols_fit(x, y);
        py::dict d;
        d["coefficients"] = s.coefficients;
        d["std_errors"] = s.std_errors;
        d["t_stats"] = s.t_stats;
        d["p_values"] = s.p_values;
        d["inference_available"] = s.inference_available;
        d["rank"] = s.rank;
        d["residual_df"] = s.residual_df;
        d["r_squared"] = s.r_squared_train;
        return d;
      },
      py::arg("x"), py::arg("y"), "Least squares with intercept at index 0 and t-test inference");

  py::class_<numerics::PcaModel>(m, "Pca")
      .def_readonly("mean", &numerics::PcaModel::mean)
      .def_readonly("components", &numerics::PcaModel::components)
      .def_readonly("explained_variance", &numerics::PcaModel::explained_variance)
      .def_readonly("total_variance", &numerics::PcaModel::total_variance)
      .def("transform", [](const numerics::PcaModel& p, const Matrix& x) { return numerics::transform_pca(p, x); })
      .def("inverse_transform",
           [](const numerics::PcaModel& p, const Matrix& s) { return numerics::inverse_transform_pca(p, s); });
  m.def(
      "fit_pca",
      [](const Matrix& x, Index k, std::uint64_t seed) {
        numerics::PcaOptions o;
        o.seed = seed;
        return numerics::fit_pca(x, k, o);
      },
      py::arg("x"), py::arg("k"), py::arg("seed") = 0);

  // Regressors.
  py::class_<regressors::TrainedRegressor>(m, "Regressor")
      .def_property_readonly("family",
                             [](const regressors::TrainedRegressor& r) { return std::string(regressors::to_string(r.family())); })
      .def_property_readonly("hyperparameters",
                             [](const regressors::TrainedRegressor& r) { return r.spec().hyperparameters; })
      .def_property_readonly("feature_names", &regressors::TrainedRegressor::feature_names)
      .def_property_readonly("train_r2", &regressors::TrainedRegressor::train_r2)
      .def("predict", &regressors::TrainedRegressor::predict)
      .def("to_json", [](const regressors::TrainedRegressor& r) { return r.to_json().dump(); })
      .def_static("from_json",
                  [](const std::string& s) { return regressors::TrainedRegressor::from_json(nlohmann::json::parse(s)); });
  m.def(
      "fit_regressor",
      [](const std::string& family, const Matrix& x, const Vector& y, const regressors::Hyperparameters& params,
         std::uint64_t seed) { return regressors::fit(make_spec(family, params, seed), x, y); },
      py::arg("family"), py::arg("x"), py::arg("y"), py::arg("hyperparameters") = regressors::Hyperparameters{},
      py::arg("seed") = 0);
  m.def(
      "grid_search",
      [](const std::string& family, const Matrix& x, const Vector& y, std::optional<regressors::HyperparameterGrid> grid,
         int folds, std::uint64_t seed) {
        const auto f = regressors::parse_family(family);
        auto r = regressors::grid_search({f, {}, seed}, grid ? *grid : regressors::default_grid(f), x, y, folds, seed);
        return py::make_tuple(r.best_spec.hyperparameters, r.mean_cv_r2, std::move(r.model));
      },
      py::arg("family"), py::arg("x"), py::arg("y"), py::arg("grid") = py::none(), py::arg("folds") = 5,
      py::arg("seed") = 0, "(best hyperparameters, mean CV R^2 per grid point, refitted model)");
  m.def("r2_score", &regressors::r2_score);

  // Pipeline. JSON results are returned as strings and decoded on the Python side.
  py::class_<pipeline::RunConfig>(m, "RunConfig")
      .def_readonly("seed", &pipeline::RunConfig::seed)
      .def_readonly("output_dir", &pipeline::RunConfig::output_dir)
      .def_property_readonly("features_dir", &pipeline::RunConfig::features_path)
      .def("to_json", [](const pipeline::RunConfig& c) { return c.to_json().dump(); });
  m.def("load_config", &make_config, py::arg("path") = py::none(),
        py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("data_dir") = std::filesystem::path(MER_DEFAULT_DATA_DIR));
  m.def("build_features", [](const pipeline::RunConfig& c) { return pipeline::build_features(c).dump(); });
  m.def("evaluate", [](const pipeline::RunConfig& c) { return pipeline::evaluate(c).to_json().dump(); });
  m.def("train", [](const pipeline::RunConfig& c) { return pipeline::train(c).dump(); });
  m.def("run_rfe", [](const pipeline::RunConfig& c) {
    const auto r = pipeline::run_rfe(c);
    py::dict d;
    for (Target t : kTargets) d[to_string(t)] = r[static_cast<std::size_t>(t)].survivors.columns;
    return d;
  });
  m.def("render_report", &pipeline::render_report);
}
