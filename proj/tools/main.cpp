#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "wef/error.hpp"

int main(int argc, char** argv) {
  using namespace wef::cli;

  CLI::App app{"Weighted-ensemble stock price forecasting (ANN + CART + GPR, cuckoo-search weights)"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  app.add_option("--config", config_path, "TOML run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Global seed; overrides the config file");
  app.add_option("--out", out_dir, "Output directory; overrides the config file");

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic panel (CSV per series + panel.toml)");

  std::string company;
  std::size_t horizon = 1;
  auto* train = app.add_subcommand("train", "Train one company's ensemble and write <company>.bundle.json");
  train->add_option("--company", company, "Company symbol")->required();
  train->add_option("--horizon", horizon, "Forecast horizon in trading days (daily or weekly config)")
      ->capture_default_str();

  std::string bundle;
  std::optional<std::string> date;
  auto* predict = app.add_subcommand("predict", "Forecast from a bundle at an anchor date");
  predict->add_option("--bundle", bundle, "Bundle JSON file")->required()->check(CLI::ExistingFile);
  predict->add_option("--date", date, "Anchor date YYYY-MM-DD (default: last date in the panel)");

  auto* bench = app.add_subcommand("benchmark", "Daily and weekly evaluation of every company; writes reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    config.apply_seed(seed.value_or(config.seed));
    if (!out_dir.empty()) config.out = out_dir;
    config.validate();

    if (*gen) return cmd_gen_data(config, std::cout);
    if (*train) return cmd_train(config, company, horizon, std::cout);
    if (*predict) return cmd_predict(config, bundle, date, std::cout);
    if (*bench) return cmd_benchmark(config, std::cout);
  } catch (const wef::Error& e) {
    std::cerr << "error [" << wef::to_string(e.kind()) << "]: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
