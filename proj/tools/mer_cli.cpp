#include "mer/pipeline/pipeline.hpp"
#include "mer/spotify/client.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#ifndef MER_DEFAULT_DATA_DIR
#define MER_DEFAULT_DATA_DIR "data"
#endif

namespace {

enum Exit { kOk = 0, kPartial = 1, kUsage = 2 };

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string only;
  std::string modality;
  std::vector<std::string> sets;
  std::string log_level = "info";
};

mer::pipeline::RunConfig resolve(const Flags& f) {
  using namespace mer::pipeline;
  auto config = default_config(MER_DEFAULT_DATA_DIR);
  if (!f.config_path.empty()) apply_config_file(config, f.config_path);
  const auto cwd = std::filesystem::current_path();
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    config.set(s.substr(0, eq), s.substr(eq + 1), cwd);
  }
  if (f.seed) config.set("seed", std::to_string(*f.seed), cwd);
  if (f.jobs) config.set("jobs", std::to_string(*f.jobs), cwd);
  if (!f.only.empty()) config.set("families", f.only, cwd);
  if (!f.modality.empty()) config.set("modalities", f.modality, cwd);
  config.validate();
  return config;
}

int run(const std::string& command, const Flags& flags) {
  using namespace mer;
  const auto config = resolve(flags);
  if (command == "fetch") {
    const auto out = pipeline::fetch(config, std::make_shared<spotify::HttplibTransport>());
    std::cout << "songs in dataset: " << out.songs << "\n"
              << "skipped " << out.skipped_cached << " cached\n"
              << "matched " << out.matched << ", unmatched " << out.unmatched << "\n"
              << "fetched " << out.fetched << ", without features " << out.without_features << "\n";
    return kOk;
  }
  if (command == "features") {
    const auto manifest = pipeline::build_features(config);
    std::cout << "songs: " << manifest["songs"]["kept"] << " (train " << manifest["songs"]["train"] << ", validation "
              << manifest["songs"]["validation"] << ", test " << manifest["songs"]["test"] << ")\n"
              << "columns: audio " << manifest["columns"]["audio"] << ", sentiment " << manifest["columns"]["sentiment"]
              << ", tfidf " << manifest["columns"]["tfidf"] << ", xanew " << manifest["columns"]["xanew"] << "\n"
              << "written to " << config.features_path().string() << "\n";
    return kOk;
  }
  if (command == "train") {
    const auto summary = pipeline::train(config);
    for (const auto& row : summary) {
      std::cout << row["modality"].get<std::string>() << " " << row["family"].get<std::string>() << " "
                << row["target"].get<std::string>() << ": validation R^2 " << row["validation_r2"] << "\n";
    }
    return kOk;
  }
  if (command == "evaluate") {
    const auto report = pipeline::evaluate(config);
    std::cout << evaluation::table1_markdown(report) << "\nreport written to "
              << (config.output_dir / "report").string() << "\n";
    if (report.any_failed()) {
      std::cerr << "some cells failed; see report.json\n";
      return kPartial;
    }
    return kOk;
  }
  if (command == "rfe") {
    const auto result = pipeline::run_rfe(config);
    for (Target t : kTargets) {
      std::cout << to_string(t) << ":";
      for (const auto& c : result[static_cast<std::size_t>(t)].survivors.columns) std::cout << " " << c;
      std::cout << "\n";
    }
    return kOk;
  }
  if (command == "report") {
    std::cout << pipeline::render_report(config);
    return kOk;
  }
  throw pipeline::ConfigError("unknown command " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Valence/arousal regression from audio features and lyrics"};
  app.require_subcommand(1, 1);
  Flags flags;
  std::uint64_t seed = 0;
  int jobs = 1;
  app.add_option("-c,--config", flags.config_path, "config file (key = value lines)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* jobs_opt = app.add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--only", flags.only, "restrict to one model family (mlr, rfr, svr, mlp)");
  app.add_option("--modality", flags.modality, "restrict to one modality")
      ->check(CLI::IsMember({"audio", "lyrics", "multi"}));
  app.add_option("--set", flags.sets, "override a config setting, key=value");
  app.add_option("--log-level", flags.log_level, "trace, debug, info, warn, error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"fetch", "resolve songs on Spotify and download audio features"},
      {"features", "build feature matrices"},
      {"train", "fit and save one model per modality, family and target"},
      {"evaluate", "run the full evaluation and write the report"},
      {"rfe", "recursive feature elimination on the selected features"},
      {"report", "re-render tables from an existing report"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (seed_opt->count()) flags.seed = seed;
  if (jobs_opt->count()) flags.jobs = jobs;

  auto logger = spdlog::stderr_color_mt("mer");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(flags.log_level));

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, flags);
  } catch (const mer::pipeline::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const mer::spotify::CredentialError& e) {
    std::cerr << "credential error: " << e.what() << "\n";
  } catch (const mer::pipeline::InfrastructureError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << command << " failed: " << e.what() << "\n";
  }
  return kUsage;
}
