#include "commands.hpp"

#include <iomanip>
#include <vector>

#include "wef/bundle.hpp"
#include "wef/error.hpp"
#include "wef/report.hpp"

namespace wef::cli {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() +
                                   (ec ? ": " + ec.message() : std::string()));
  }
}

EnsembleParams params_for_horizon(const RunConfig& config, std::size_t horizon) {
  EnsembleParams p = config.bench.ensemble;
  if (horizon == config.bench.weekly.horizon) {
    p.features = config.bench.weekly;
  } else if (horizon != p.features.horizon) {
    throw Error(ErrorKind::Validation, "horizon " + std::to_string(horizon) + " matches neither the daily (" +
                                           std::to_string(p.features.horizon) + ") nor weekly (" +
                                           std::to_string(config.bench.weekly.horizon) + ") configuration");
  }
  return p;
}

}  // namespace

MarketPanel load_panel(const RunConfig& config) {
  if (config.manifest) return load_panel_manifest(*config.manifest);
  return generate_synth_market(config.synth);
}

std::filesystem::path bundle_path(const RunConfig& config, const std::string& company, std::size_t horizon) {
  const auto daily = config.bench.ensemble.features.horizon;
  return config.out / (company + (horizon == daily ? std::string() : ".h" + std::to_string(horizon)) +
                       ".bundle.json");
}

int cmd_gen_data(const RunConfig& config, std::ostream& out) {
  const auto panel = generate_synth_market(config.synth);
  ensure_dir(config.out);
  const std::filesystem::path market = "market_index.csv", sector = "sector_index.csv";
  save_price_csv(panel.market_index, config.out / market);
  save_price_csv(panel.sector_index, config.out / sector);
  std::vector<std::filesystem::path> companies;
  for (const auto& c : panel.companies) {
    companies.emplace_back(c.symbol() + ".csv");
    save_price_csv(c, config.out / companies.back());
  }
  write_panel_manifest(config.out / "panel.toml", market, sector, companies);
  out << "wrote " << panel.companies.size() << " companies x " << panel.market_index.size()
      << " records to " << config.out.string() << " (manifest panel.toml)\n";
  return kExitOk;
}

int cmd_train(const RunConfig& config, const std::string& company, std::size_t horizon, std::ostream& out) {
  const auto panel = load_panel(config);
  const auto index = panel.company_index(company);
  const auto params = params_for_horizon(config, horizon);
  const auto trained = train_ensemble(panel, index, params);
  ensure_dir(config.out);
  const auto path = bundle_path(config, company, horizon);
  save_bundle(trained.bundle, path);

  const auto& w = trained.bundle.weights;
  out << std::setprecision(6);
  out << "company " << company << " horizon " << horizon << '\n'
      << "samples train=" << trained.data.train.size() << " validation=" << trained.data.validation.size()
      << " test=" << trained.data.test.size() << '\n'
      << "weights a(ann)=" << w.ann << " b(cart)=" << w.cart << " c(gpr)=" << w.gpr << '\n'
      << "validation fitness=" << trained.bundle.validation_fitness << '\n'
      << "bundle " << path.string() << '\n';
  return kExitOk;
}

int cmd_predict(const RunConfig& config, const std::filesystem::path& bundle_file,
                const std::optional<std::string>& date, std::ostream& out) {
  const auto bundle = load_bundle(bundle_file);
  const auto panel = load_panel(config);
  const auto company = panel.company_index(bundle.provenance.company);
  const auto& series = panel.companies[company];

  std::size_t k = series.size() - 1;
  if (date) {
    const auto d = parse_iso_date(*date);
    if (!d) throw Error(ErrorKind::Validation, "bad date '" + *date + "', expected YYYY-MM-DD");
    k = series.index_of(*d);
    if (k == series.size()) throw Error(ErrorKind::Validation, *date + " is not a trading day in the panel");
  }
  const auto features = build_features(panel, company, k, bundle.features);
  if (!features) {
    throw Error(ErrorKind::InsufficientHistory,
                format_iso_date(series.dates()[k]) + " has " + std::to_string(k) +
                    " prior trading days; the bundle needs a warm-up of " +
                    std::to_string(bundle.features.warmup()));
  }
  const auto f = forecast(bundle, *features);
  out << std::setprecision(10) << "anchor=" << format_iso_date(series.dates()[k])
      << " horizon=" << bundle.features.horizon << " predicted=" << f.ensemble << " ann=" << f.ann
      << " cart=" << f.cart << " gpr=" << f.gpr << '\n';
  return kExitOk;
}

int cmd_benchmark(const RunConfig& config, std::ostream& out) {
  const auto panel = load_panel(config);
  const auto report = run_benchmark(panel, config.bench);
  ensure_dir(config.out);
  emit_report(report, config.out);

  out << std::setprecision(5);
  for (const auto& s : report.averages) {
    out << "horizon " << s.horizon << " (" << s.companies_ok << " companies ok) average error rate:";
    for (auto m : kModels) out << ' ' << to_string(m) << '=' << s.average[static_cast<std::size_t>(m)].error_rate;
    out << '\n';
  }
  for (const auto& r : report.results) {
    if (!r.ok) out << "FAILED " << r.company << " h" << r.horizon << ": " << r.error << '\n';
  }
  auto gate = [&](const char* name, const GateResult& g) {
    out << "gate " << name << ": " << (!g.applicable ? "n/a" : g.passed ? "pass" : "FAIL") << " (" << g.detail
        << ")\n";
  };
  gate("corner-dominance", report.corner_dominance);
  gate("metric-identities", report.metric_identities);
  if (report.horizon_degradation.applicable && !report.horizon_degradation.passed) {
    out << "warning: horizon-degradation soft gate not met (" << report.horizon_degradation.detail << ")\n";
  } else {
    gate("horizon-degradation", report.horizon_degradation);
  }
  out << "report written to " << config.out.string() << '\n';

  if (!report.all_companies_ok()) return kExitData;
  if (!report.hard_gates_passed()) return kExitGate;
  return kExitOk;
}

}  // namespace wef::cli
