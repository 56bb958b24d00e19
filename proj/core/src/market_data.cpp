#include "wef/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "toml.hpp"
#include "wef/error.hpp"

namespace wef {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace

PriceSeries::PriceSeries(std::string symbol, std::vector<Date> dates, std::vector<double> closes)
    : symbol_(std::move(symbol)) {
  if (dates.size() != closes.size()) {
    throw Error(ErrorKind::Validation, symbol_ + ": dates and closes differ in length");
  }
  std::vector<std::size_t> order(dates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
  dates_.reserve(dates.size());
  closes_.reserve(closes.size());
  for (auto i : order) {
    if (!std::isfinite(closes[i]) || closes[i] <= 0.0) {
      throw Error(ErrorKind::Validation, symbol_ + ": non-positive close on " +
                                             format_iso_date(dates[i]));
    }
    if (!dates_.empty() && dates_.back() == dates[i]) {
      throw Error(ErrorKind::Validation, symbol_ + ": duplicate date " + format_iso_date(dates[i]));
    }
    dates_.push_back(dates[i]);
    closes_.push_back(closes[i]);
  }
}

std::size_t PriceSeries::index_of(Date date) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
  if (it == dates_.end() || *it != date) return size();
  return static_cast<std::size_t>(it - dates_.begin());
}

std::size_t MarketPanel::company_index(std::string_view symbol) const {
  for (std::size_t i = 0; i < companies.size(); ++i) {
    if (companies[i].symbol() == symbol) return i;
  }
  std::string known;
  for (const auto& s : symbols()) known += (known.empty() ? "" : ", ") + s;
  throw Error(ErrorKind::Validation,
              "unknown company '" + std::string(symbol) + "'; available: " + known);
}

std::vector<std::string> MarketPanel::symbols() const {
  std::vector<std::string> out;
  for (const auto& c : companies) out.push_back(c.symbol());
  return out;
}

PriceSeries parse_price_csv(std::string_view text, std::string symbol) {
  std::vector<Date> dates;
  std::vector<double> closes;
  std::size_t date_col = 0, close_col = 0;
  bool have_header = false;
  std::set<Date> seen;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }

    auto fields = split_fields(line);
    if (!have_header) {
      bool found_date = false, found_close = false;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        auto name = lower(fields[i]);
        if (name == "date" && !found_date) { date_col = i; found_date = true; }
        if (name == "close" && !found_close) { close_col = i; found_close = true; }
      }
      if (!found_date || !found_close) {
        throw ParseError(line_no, "header must name a 'date' and a 'close' column");
      }
      have_header = true;
      continue;
    }

    if (fields.size() <= std::max(date_col, close_col)) {
      throw ParseError(line_no, "expected at least " +
                                    std::to_string(std::max(date_col, close_col) + 1) + " fields");
    }
    auto date = parse_iso_date(fields[date_col]);
    if (!date) throw ParseError(line_no, "bad date '" + std::string(fields[date_col]) + "'");

    double value = 0.0;
    auto f = fields[close_col];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc{} || ptr != f.data() + f.size()) {
      throw ParseError(line_no, "bad price '" + std::string(f) + "'");
    }
    if (!std::isfinite(value) || value <= 0.0) {
      throw Error(ErrorKind::Validation,
                  "line " + std::to_string(line_no) + ": non-positive price " + std::string(f));
    }
    if (!seen.insert(*date).second) {
      throw Error(ErrorKind::Validation, "line " + std::to_string(line_no) + ": duplicate date " +
                                             std::string(fields[date_col]));
    }
    dates.push_back(*date);
    closes.push_back(value);
    if (end == text.size()) break;
  }
  if (!have_header) throw ParseError(line_no, "missing header row");
  return PriceSeries(std::move(symbol), std::move(dates), std::move(closes));
}

std::string to_price_csv(const PriceSeries& series) {
  std::string out = "date,close\n";
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_iso_date(series.dates()[i]);
    out += ',';
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), series.closes()[i]);
    out.append(buf, ptr);
    out += '\n';
  }
  return out;
}

PriceSeries load_price_csv(const std::filesystem::path& path) {
  try {
    return parse_price_csv(read_file(path), path.stem().string());
  } catch (const Error&) {
    rethrow_with_stage(path.string());
  }
}

void save_price_csv(const PriceSeries& series, const std::filesystem::path& path) {
  write_file(path, to_price_csv(series));
}

namespace {

PriceSeries restrict_to(const PriceSeries& s, const std::vector<Date>& keep) {
  std::vector<Date> dates;
  std::vector<double> closes;
  dates.reserve(keep.size());
  closes.reserve(keep.size());
  for (auto d : keep) {
    auto i = s.index_of(d);
    dates.push_back(d);
    closes.push_back(s.closes()[i]);
  }
  return PriceSeries(s.symbol(), std::move(dates), std::move(closes));
}

}  // namespace

MarketPanel align(const MarketPanel& panel) {
  std::vector<const PriceSeries*> members{&panel.market_index};
  if (!panel.sector_index.empty()) members.push_back(&panel.sector_index);
  for (const auto& c : panel.companies) members.push_back(&c);

  for (const auto* s : members) {
    if (s->empty()) throw Error(ErrorKind::Alignment, "series '" + s->symbol() + "' is empty");
  }

  std::vector<Date> common(members.front()->dates().begin(), members.front()->dates().end());
  for (std::size_t m = 1; m < members.size(); ++m) {
    std::vector<Date> next;
    auto other = members[m]->dates();
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw Error(ErrorKind::Alignment, "panel series share no common dates");

  MarketPanel out;
  out.market_index = restrict_to(panel.market_index, common);
  if (!panel.sector_index.empty()) out.sector_index = restrict_to(panel.sector_index, common);
  out.companies.reserve(panel.companies.size());
  for (const auto& c : panel.companies) out.companies.push_back(restrict_to(c, common));
  return out;
}

PriceSeries derive_sector_index(std::span<const PriceSeries> companies, std::string symbol) {
  if (companies.empty()) throw Error(ErrorKind::Validation, "sector index needs at least one company");
  const auto dates = companies.front().dates();
  for (const auto& c : companies) {
    if (!std::equal(dates.begin(), dates.end(), c.dates().begin(), c.dates().end())) {
      throw Error(ErrorKind::Alignment,
                  "company '" + c.symbol() + "' is not aligned with '" +
                      companies.front().symbol() + "'");
    }
  }
  std::vector<double> closes(dates.size(), 0.0);
  for (std::size_t i = 0; i < dates.size(); ++i) {
    double sum = 0.0;
    for (const auto& c : companies) sum += c.closes()[i];
    closes[i] = sum / static_cast<double>(companies.size());
  }
  return PriceSeries(std::move(symbol), {dates.begin(), dates.end()}, std::move(closes));
}

MarketPanel load_panel_manifest(const std::filesystem::path& manifest) {
  if (!std::filesystem::is_regular_file(manifest)) {
    throw Error(ErrorKind::Io, "cannot open manifest " + manifest.string());
  }
  toml::table doc;
  try {
    doc = toml::parse_file(manifest.string());
  } catch (const toml::parse_error& e) {
    throw Error(ErrorKind::Parse, manifest.string() + ": " + std::string(e.description()));
  }
  const auto base = manifest.parent_path();
  auto resolve = [&](std::string_view p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  auto market = doc["panel"]["market_index"].value<std::string>();
  if (!market) throw Error(ErrorKind::Validation, manifest.string() + ": missing panel.market_index");
  auto* companies = doc["panel"]["companies"].as_array();
  if (!companies || companies->empty()) {
    throw Error(ErrorKind::Validation, manifest.string() + ": panel.companies must be a nonempty list");
  }

  MarketPanel panel;
  panel.market_index = load_price_csv(resolve(*market));
  if (auto sector = doc["panel"]["sector_index"].value<std::string>()) {
    panel.sector_index = load_price_csv(resolve(*sector));
  }
  for (const auto& node : *companies) {
    auto p = node.value<std::string>();
    if (!p) throw Error(ErrorKind::Validation, manifest.string() + ": company entries must be strings");
    panel.companies.push_back(load_price_csv(resolve(*p)));
  }

  panel = align(panel);
  if (panel.sector_index.empty()) panel.sector_index = derive_sector_index(panel.companies);
  return panel;
}

void write_panel_manifest(const std::filesystem::path& manifest,
                          const std::filesystem::path& market_csv,
                          const std::filesystem::path& sector_csv,
                          std::span<const std::filesystem::path> company_csvs) {
  toml::array companies;
  for (const auto& p : company_csvs) companies.push_back(p.generic_string());
  toml::table panel{{"market_index", market_csv.generic_string()}, {"companies", companies}};
  if (!sector_csv.empty()) panel.insert("sector_index", sector_csv.generic_string());
  toml::table doc{{"panel", panel}};
  std::ostringstream out;
  out << doc << '\n';
  write_file(manifest, out.str());
}

void SplitSpec::validate() const {
  if (train_count == 0) throw Error(ErrorKind::Validation, "split.train_count must be positive");
  if (!(validation_fraction >= 0.0 && validation_fraction <= 0.5)) {
    throw Error(ErrorKind::Validation, "split.validation_fraction must lie in [0, 0.5]");
  }
}

DatasetSplit split(const FeatureDataset& samples, const SplitSpec& spec) {
  spec.validate();
  if (spec.train_count >= samples.size()) {
    throw Error(ErrorKind::Validation, "train_count " + std::to_string(spec.train_count) +
                                           " leaves no test samples out of " +
                                           std::to_string(samples.size()));
  }
  // The 1e-9 guard keeps exact products (e.g. 10 * 0.8) from flooring one short.
  const auto fit_count = static_cast<std::size_t>(
      std::floor(static_cast<double>(spec.train_count) * (1.0 - spec.validation_fraction) + 1e-9));
  DatasetSplit out;
  auto first = samples.begin();
  out.train.assign(first, first + static_cast<std::ptrdiff_t>(fit_count));
  out.validation.assign(first + static_cast<std::ptrdiff_t>(fit_count),
                        first + static_cast<std::ptrdiff_t>(spec.train_count));
  out.test.assign(first + static_cast<std::ptrdiff_t>(spec.train_count), samples.end());
  return out;
}

}  // namespace wef
