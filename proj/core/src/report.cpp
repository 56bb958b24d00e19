#include "wef/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wef/error.hpp"

namespace wef {

using nlohmann::json;

namespace {

constexpr std::size_t idx(Model m) { return static_cast<std::size_t>(m); }

// Column order of the published comparison tables.
constexpr std::array<std::pair<Model, const char*>, 4> kTableColumns{
    {{Model::Ensemble, "Proposed"}, {Model::Gpr, "GPR"}, {Model::Ann, "ANN"}, {Model::Cart, "CART"}}};

std::string num(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

json metrics_json(const ModelMetrics& m) {
  return {{"error_rate", m.error_rate}, {"mae", m.mae}, {"rmse", m.rmse}};
}

json per_model_json(const PerModel& pm) {
  json out = json::object();
  for (auto m : kModels) out[std::string(to_string(m))] = metrics_json(pm[idx(m)]);
  return out;
}

json gate_json(const GateResult& g) {
  return {{"applicable", g.applicable}, {"passed", g.passed}, {"detail", g.detail}};
}

void write_text(const std::filesystem::path& path, const std::string& text,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
  written.push_back(path);
}

double metric_of(const ModelMetrics& m, const std::string& name) {
  if (name == "error_rate") return m.error_rate;
  if (name == "mae") return m.mae;
  return m.rmse;
}

}  // namespace

Histogram residual_histogram(std::span<const double> residuals, std::size_t bins) {
  if (bins == 0) throw Error(ErrorKind::Validation, "histogram needs at least one bin");
  double range = 0.0;
  for (double r : residuals) range = std::max(range, std::abs(r));
  if (range == 0.0) range = 1.0;
  Histogram h;
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges.push_back(-range + 2.0 * range * static_cast<double>(b) / static_cast<double>(bins));
  }
  for (double r : residuals) {
    auto b = static_cast<std::size_t>(std::floor((r + range) / (2.0 * range) * static_cast<double>(bins)));
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

std::string report_to_json(const EvalReport& report) {
  json results = json::array();
  for (const auto& r : report.results) {
    json j{{"company", r.company}, {"horizon", r.horizon}, {"ok", r.ok}};
    if (!r.ok) {
      j["error"] = r.error;
      results.push_back(std::move(j));
      continue;
    }
    j["train_size"] = r.train_size;
    j["validation_size"] = r.validation_size;
    j["test_size"] = r.actual.size();
    j["weights"] = {{"ann", r.weights.ann}, {"cart", r.weights.cart}, {"gpr", r.weights.gpr}};
    j["validation_fitness"] = r.validation_fitness;
    json vr = json::object();
    for (auto m : kModels) vr[std::string(to_string(m))] = r.validation_rmse[idx(m)];
    j["validation_rmse"] = vr;
    j["test"] = per_model_json(r.test);
    json pairs = json::array();
    for (std::size_t i = 0; i < r.actual.size(); ++i) {
      json row{{"anchor_date", format_iso_date(r.test_dates[i])}, {"actual", r.actual[i]}};
      for (auto m : kModels) row[std::string(to_string(m))] = r.predicted[idx(m)][i];
      pairs.push_back(std::move(row));
    }
    j["predictions"] = std::move(pairs);
    results.push_back(std::move(j));
  }

  json averages = json::array();
  for (const auto& s : report.averages) {
    averages.push_back({{"horizon", s.horizon}, {"companies_ok", s.companies_ok}, {"average", per_model_json(s.average)}});
  }

  json doc{{"weight_mode", to_string(report.weight_mode)},
           {"weights_forced", report.weights_forced},
           {"results", std::move(results)},
           {"averages", std::move(averages)},
           {"gates",
            {{"corner_dominance", gate_json(report.corner_dominance)},
             {"metric_identities", gate_json(report.metric_identities)},
             {"horizon_degradation", gate_json(report.horizon_degradation)}}},
           {"ensemble_mae_increase", report.ensemble_mae_increase},
           {"worst_learner_mae_increase", report.worst_learner_mae_increase}};
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "tables", ec);
  if (!ec) std::filesystem::create_directories(dir / "plots", ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;

  for (const auto& summary : report.averages) {
    for (const std::string metric : {"error_rate", "mae", "rmse"}) {
      std::string csv = "Stock";
      for (const auto& [m, name] : kTableColumns) csv += std::string(",") + name;
      csv += '\n';
      for (const auto& r : report.results) {
        if (r.horizon != summary.horizon) continue;
        csv += r.company;
        for (const auto& [m, name] : kTableColumns) csv += "," + (r.ok ? num(metric_of(r.test[idx(m)], metric)) : std::string("failed"));
        csv += '\n';
      }
      csv += "AVERAGE";
      for (const auto& [m, name] : kTableColumns) csv += "," + num(metric_of(summary.average[idx(m)], metric));
      csv += '\n';
      write_text(dir / "tables" / (metric + "_h" + std::to_string(summary.horizon) + ".csv"), csv, written);
    }
  }

  if (report.averages.size() >= 2) {
    const auto& daily = report.averages[0];
    const auto& weekly = report.averages[1];
    std::string csv = "Model,error_rate_daily,error_rate_weekly,mae_daily,mae_weekly\n";
    for (const auto& [m, name] : kTableColumns) {
      csv += std::string(name) + "," + num(daily.average[idx(m)].error_rate) + "," +
             num(weekly.average[idx(m)].error_rate) + "," + num(daily.average[idx(m)].mae) + "," +
             num(weekly.average[idx(m)].mae) + "\n";
    }
    write_text(dir / "tables" / "daily_vs_weekly.csv", csv, written);
  }

  for (auto m : kModels) {
    std::string reg = "company,horizon,anchor_date,actual,predicted\n";
    std::string hist = "horizon,bin,lower,upper,count\n";
    for (const auto& summary : report.averages) {
      std::vector<double> residuals;
      for (const auto& r : report.results) {
        if (r.horizon != summary.horizon || !r.ok) continue;
        for (std::size_t i = 0; i < r.actual.size(); ++i) {
          const double pred = r.predicted[idx(m)][i];
          reg += r.company + "," + std::to_string(r.horizon) + "," + format_iso_date(r.test_dates[i]) + "," +
                 num(r.actual[i]) + "," + num(pred) + "\n";
          residuals.push_back(pred - r.actual[i]);
        }
      }
      const auto h = residual_histogram(residuals, 20);
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        hist += std::to_string(summary.horizon) + "," + std::to_string(b) + "," + num(h.edges[b]) + "," +
                num(h.edges[b + 1]) + "," + std::to_string(h.counts[b]) + "\n";
      }
    }
    write_text(dir / "plots" / ("regression_" + std::string(to_string(m)) + ".csv"), reg, written);
    write_text(dir / "plots" / ("residual_hist_" + std::string(to_string(m)) + ".csv"), hist, written);
  }

  std::string conv = "company,horizon,iteration,best,mean\n";
  for (const auto& r : report.results) {
    for (std::size_t i = 0; i < r.cs_history.size(); ++i) {
      conv += r.company + "," + std::to_string(r.horizon) + "," + std::to_string(i + 1) + "," +
              num(r.cs_history[i].best) + "," + num(r.cs_history[i].mean) + "\n";
    }
  }
  write_text(dir / "plots" / "cs_convergence.csv", conv, written);
  write_text(dir / "report.json", report_to_json(report), written);
  return written;
}

}  // namespace wef
