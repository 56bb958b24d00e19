#include "run_config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "toml.hpp"
#include "wef/error.hpp"

namespace wef::cli {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::Validation, "config: " + what); }

void check_keys(const toml::table& table, const std::string& name, const std::set<std::string>& allowed) {
  for (const auto& [key, node] : table) {
    const std::string k(key.str());
    if (!allowed.count(k)) bad("unknown key '" + k + "' in [" + name + "]");
  }
}

template <typename T>
bool read(const toml::table& table, const std::string& section, const char* key, T& target) {
  const auto* node = table.get(key);
  if (!node) return false;
  if constexpr (std::is_same_v<T, bool>) {
    auto v = node->value<bool>();
    if (!v) bad(section + "." + key + " must be a boolean");
    target = *v;
  } else if constexpr (std::is_same_v<T, std::string>) {
    auto v = node->value<std::string>();
    if (!v) bad(section + "." + key + " must be a string");
    target = *v;
  } else if constexpr (std::is_floating_point_v<T>) {
    auto v = node->value<double>();
    if (!v) bad(section + "." + key + " must be a number");
    target = *v;
  } else {
    auto v = node->value<std::int64_t>();
    if (!v || *v < 0) bad(section + "." + key + " must be a nonnegative integer");
    target = static_cast<T>(*v);
  }
  return true;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

const toml::table* section(const toml::table& doc, const char* name) {
  const auto* node = doc.get(name);
  if (!node) return nullptr;
  const auto* t = node->as_table();
  if (!t) bad(std::string("[") + name + "] must be a table");
  return t;
}

void read_features(const toml::table& t, const std::string& name, FeatureConfig& c, bool allow_nested) {
  std::set<std::string> keys{"n", "t", "horizon", "corr_window", "index_window", "sector_window",
                             "macd_short", "macd_long", "rsi_window", "normalized_correlation"};
  if (allow_nested) keys.insert("weekly");
  check_keys(t, name, keys);
  read(t, name, "n", c.n);
  read(t, name, "t", c.t);
  read(t, name, "horizon", c.horizon);
  read(t, name, "corr_window", c.corr_window);
  read(t, name, "index_window", c.index_window);
  read(t, name, "sector_window", c.sector_window);
  read(t, name, "macd_short", c.macd_short);
  read(t, name, "macd_long", c.macd_long);
  read(t, name, "rsi_window", c.rsi_window);
  read(t, name, "normalized_correlation", c.normalized_correlation);
}

std::optional<Learner> learner_from(const std::string& name) {
  if (name == "ann") return Learner::Ann;
  if (name == "cart") return Learner::Cart;
  if (name == "gpr") return Learner::Gpr;
  return std::nullopt;
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  bench.ensemble.seed = s;
  bench.ensemble.cs.seed = s + 1;
  synth.seed = s + 2;
}

void RunConfig::validate() const {
  bench.ensemble.features.validate();
  bench.weekly.validate();
  if (bench.weekly.horizon == bench.ensemble.features.horizon) {
    bad("features.weekly.horizon must differ from features.horizon");
  }
  bench.ensemble.split.validate();
  bench.ensemble.lm.validate();
  bench.ensemble.cart.validate();
  bench.ensemble.kernel.validate();
  bench.ensemble.cs.validate();
  synth.validate();
  if (manifest && !std::filesystem::exists(*manifest)) bad("manifest " + manifest->string() + " does not exist");
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << e.description() << " at line " << e.source().begin.line;
    throw Error(ErrorKind::Parse, msg.str());
  }
  check_keys(doc, "root",
             {"seed", "out", "data", "synth", "features", "split", "ann", "cart", "gpr", "cs", "ensemble", "debug"});

  RunConfig cfg;
  std::uint64_t seed = cfg.seed;
  read(doc, "root", "seed", seed);
  cfg.apply_seed(seed);
  std::string out = cfg.out.string();
  if (read(doc, "root", "out", out)) cfg.out = resolve(base_dir, out);

  if (const auto* t = section(doc, "data")) {
    check_keys(*t, "data", {"manifest"});
    std::string m;
    read(*t, "data", "manifest", m);
    if (!m.empty()) {
      std::filesystem::path p(m);
      cfg.manifest = resolve(base_dir, p);
    }
  }
  if (const auto* t = section(doc, "synth")) {
    auto& s = cfg.synth;
    check_keys(*t, "synth", {"company_count", "record_count", "market_drift", "market_volatility",
                             "sector_volatility", "sector_coupling", "idiosyncratic_volatility", "shocks",
                             "market_start"});
    read(*t, "synth", "company_count", s.company_count);
    read(*t, "synth", "record_count", s.record_count);
    read(*t, "synth", "market_drift", s.market_drift);
    read(*t, "synth", "market_volatility", s.market_volatility);
    read(*t, "synth", "sector_volatility", s.sector_volatility);
    read(*t, "synth", "sector_coupling", s.sector_coupling);
    read(*t, "synth", "idiosyncratic_volatility", s.idiosyncratic_volatility);
    read(*t, "synth", "market_start", s.market_start);
    if (const auto* node = t->get("shocks")) {
      const auto* arr = node->as_array();
      if (!arr) bad("synth.shocks must be a list of [day, magnitude] pairs");
      s.shocks.clear();
      for (const auto& item : *arr) {
        const auto* pair = item.as_array();
        if (!pair || pair->size() != 2) bad("synth.shocks entries must be [day, magnitude]");
        auto day = (*pair)[0].value<std::int64_t>();
        auto mag = (*pair)[1].value<double>();
        if (!day || *day < 0 || !mag) bad("synth.shocks entries must be [day, magnitude]");
        s.shocks.push_back({static_cast<std::size_t>(*day), *mag});
      }
    }
  }
  if (const auto* t = section(doc, "features")) {
    read_features(*t, "features", cfg.bench.ensemble.features, true);
    if (const auto* w = section(*t, "weekly")) read_features(*w, "features.weekly", cfg.bench.weekly, false);
  }
  if (const auto* t = section(doc, "split")) {
    check_keys(*t, "split", {"train_count", "validation_fraction"});
    read(*t, "split", "train_count", cfg.bench.ensemble.split.train_count);
    read(*t, "split", "validation_fraction", cfg.bench.ensemble.split.validation_fraction);
  }
  if (const auto* t = section(doc, "ann")) {
    auto& p = cfg.bench.ensemble.lm;
    check_keys(*t, "ann", {"mu_init", "mu_up", "mu_down", "max_epochs", "gradient_tol", "mu_max"});
    read(*t, "ann", "mu_init", p.mu_init);
    read(*t, "ann", "mu_up", p.mu_up);
    read(*t, "ann", "mu_down", p.mu_down);
    read(*t, "ann", "max_epochs", p.max_epochs);
    read(*t, "ann", "gradient_tol", p.gradient_tol);
    read(*t, "ann", "mu_max", p.mu_max);
  }
  if (const auto* t = section(doc, "cart")) {
    auto& p = cfg.bench.ensemble.cart;
    check_keys(*t, "cart", {"min_leaf", "cv_folds", "max_depth"});
    read(*t, "cart", "min_leaf", p.min_leaf);
    read(*t, "cart", "cv_folds", p.cv_folds);
    read(*t, "cart", "max_depth", p.max_depth);
  }
  if (const auto* t = section(doc, "gpr")) {
    auto& p = cfg.bench.ensemble.kernel;
    check_keys(*t, "gpr", {"length_scale", "signal_variance", "noise_variance", "grid_search"});
    read(*t, "gpr", "length_scale", p.length_scale);
    read(*t, "gpr", "signal_variance", p.signal_variance);
    read(*t, "gpr", "noise_variance", p.noise_variance);
    read(*t, "gpr", "grid_search", cfg.bench.ensemble.gpr_grid_search);
  }
  if (const auto* t = section(doc, "cs")) {
    auto& p = cfg.bench.ensemble.cs;
    check_keys(*t, "cs", {"nest_count", "pa", "max_iters", "levy_beta", "step_scale", "selection"});
    read(*t, "cs", "nest_count", p.nest_count);
    read(*t, "cs", "pa", p.pa);
    read(*t, "cs", "max_iters", p.max_iters);
    read(*t, "cs", "levy_beta", p.levy_beta);
    read(*t, "cs", "step_scale", p.step_scale);
    std::string sel;
    read(*t, "cs", "selection", sel);
    if (sel == "uniform") p.selection = CuckooSelection::Uniform;
    else if (sel.empty() || sel == "levy-rank") p.selection = CuckooSelection::LevyRank;
    else bad("cs.selection must be 'levy-rank' or 'uniform'");
  }
  if (const auto* t = section(doc, "ensemble")) {
    check_keys(*t, "ensemble", {"weight_mode"});
    std::string mode;
    read(*t, "ensemble", "weight_mode", mode);
    if (mode == "pooled") cfg.bench.weight_mode = WeightMode::Pooled;
    else if (mode.empty() || mode == "per-company") cfg.bench.weight_mode = WeightMode::PerCompany;
    else bad("ensemble.weight_mode must be 'per-company' or 'pooled'");
  }
  if (const auto* t = section(doc, "debug")) {
    check_keys(*t, "debug", {"nan_company", "nan_learner"});
    std::string company, learner = "ann";
    read(*t, "debug", "nan_company", company);
    read(*t, "debug", "nan_learner", learner);
    if (!company.empty()) cfg.bench.nan_company = company;
    auto l = learner_from(learner);
    if (!l) bad("debug.nan_learner must be ann, cart or gpr");
    cfg.bench.nan_learner = *l;
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

}  // namespace wef::cli
