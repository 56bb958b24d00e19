#include "wef/bundle.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wef/error.hpp"

namespace wef {

using nlohmann::json;

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_matrix(const json& rows, Eigen::Index expect_rows, Eigen::Index expect_cols) {
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != expect_rows) {
    throw Error(ErrorKind::Format, "matrix has wrong row count");
  }
  Eigen::MatrixXd m(expect_rows, expect_cols);
  for (Eigen::Index r = 0; r < expect_rows; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != expect_cols) {
      throw Error(ErrorKind::Format, "matrix has wrong column count");
    }
    for (Eigen::Index c = 0; c < expect_cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vec(const json& j, Eigen::Index expect) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != expect) throw Error(ErrorKind::Format, "vector has wrong length");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), expect);
}

json feature_json(const FeatureConfig& c) {
  return {{"n", c.n},
          {"t", c.t},
          {"horizon", c.horizon},
          {"corr_window", c.corr_window},
          {"index_window", c.index_window},
          {"sector_window", c.sector_window},
          {"macd_short", c.macd_short},
          {"macd_long", c.macd_long},
          {"rsi_window", c.rsi_window},
          {"normalized_correlation", c.normalized_correlation}};
}

FeatureConfig feature_from(const json& j) {
  FeatureConfig c;
  c.n = j.at("n").get<std::size_t>();
  c.t = j.at("t").get<std::size_t>();
  c.horizon = j.at("horizon").get<std::size_t>();
  c.corr_window = j.at("corr_window").get<std::size_t>();
  c.index_window = j.at("index_window").get<std::size_t>();
  c.sector_window = j.at("sector_window").get<std::size_t>();
  c.macd_short = j.at("macd_short").get<std::size_t>();
  c.macd_long = j.at("macd_long").get<std::size_t>();
  c.rsi_window = j.at("rsi_window").get<std::size_t>();
  c.normalized_correlation = j.at("normalized_correlation").get<bool>();
  c.validate();
  return c;
}

json ann_json(const AnnModel& m) {
  return {{"topology", {m.input_dim(), AnnModel::kHidden1, AnnModel::kHidden2, 1}},
          {"hidden_activation", "logsig"},
          {"output_activation", "linear"},
          {"seed", m.seed()},
          {"layers",
           {{{"weights", matrix_rows(m.w1)}, {"bias", vec(m.b1)}},
            {{"weights", matrix_rows(m.w2)}, {"bias", vec(m.b2)}},
            {{"weights", matrix_rows(m.w3)}, {"bias", {m.b3}}}}}};
}

AnnModel ann_from(const json& j) {
  const auto topo = j.at("topology").get<std::vector<std::size_t>>();
  if (topo.size() != 4 || topo[1] != AnnModel::kHidden1 || topo[2] != AnnModel::kHidden2 || topo[3] != 1) {
    throw Error(ErrorKind::Format, "unsupported ann topology");
  }
  AnnModel m(topo[0], j.at("seed").get<std::uint64_t>());
  const auto& layers = j.at("layers");
  if (!layers.is_array() || layers.size() != 3) throw Error(ErrorKind::Format, "ann needs 3 layers");
  const auto d = static_cast<Eigen::Index>(topo[0]);
  m.w1 = rows_matrix(layers[0].at("weights"), AnnModel::kHidden1, d);
  m.b1 = to_vec(layers[0].at("bias"), AnnModel::kHidden1);
  m.w2 = rows_matrix(layers[1].at("weights"), AnnModel::kHidden2, AnnModel::kHidden1);
  m.b2 = to_vec(layers[1].at("bias"), AnnModel::kHidden2);
  m.w3 = rows_matrix(layers[2].at("weights"), 1, AnnModel::kHidden2);
  m.b3 = to_vec(layers[2].at("bias"), 1)(0);
  if (!m.parameters().allFinite()) throw Error(ErrorKind::Format, "ann parameters are not finite");
  return m;
}

json cart_json(const CartModel& m) {
  json nodes = json::array();
  for (const auto& n : m.nodes()) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value},
                     {"count", n.count},
                     {"sse", n.sse}});
  }
  return {{"input_dim", m.input_dim()}, {"nodes", std::move(nodes)}};
}

CartModel cart_from(const json& j) {
  std::vector<CartNode> nodes;
  for (const auto& n : j.at("nodes")) {
    CartNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<double>();
    node.count = n.at("count").get<std::size_t>();
    node.sse = n.at("sse").get<double>();
    nodes.push_back(node);
  }
  return CartModel(j.at("input_dim").get<std::size_t>(), std::move(nodes));
}

json gpr_json(const GprModel& m) {
  const auto& k = m.kernel();
  return {{"kernel",
           {{"type", "squared_exponential"},
            {"length_scale", k.length_scale},
            {"signal_variance", k.signal_variance},
            {"noise_variance", k.noise_variance}}},
          {"prior_mean", m.prior_mean()},
          {"inputs", matrix_rows(m.inputs())},
          {"targets", vec(m.targets())},
          {"alpha", vec(m.alpha())}};
}

GprModel gpr_from(const json& j) {
  const auto& k = j.at("kernel");
  if (k.at("type").get<std::string>() != "squared_exponential") {
    throw Error(ErrorKind::Format, "unsupported gpr kernel");
  }
  KernelParams p{k.at("length_scale").get<double>(), k.at("signal_variance").get<double>(),
                 k.at("noise_variance").get<double>()};
  const auto& rows = j.at("inputs");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = n ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  GprModel m(rows_matrix(rows, n, d), to_vec(j.at("targets"), n), p, j.at("prior_mean").get<double>());
  const auto stored = to_vec(j.at("alpha"), n);
  const double scale = std::max(1.0, stored.lpNorm<Eigen::Infinity>());
  if ((stored - m.alpha()).lpNorm<Eigen::Infinity>() > 1e-6 * scale) {
    throw Error(ErrorKind::Format, "stored gpr alpha disagrees with the refitted model");
  }
  return m;
}

}  // namespace

std::string bundle_to_json(const EnsembleBundle& b) {
  const auto& nz = b.normalization;
  json doc{
      {"format", kBundleFormat},
      {"format_version", std::to_string(kBundleMajorVersion) + "." + std::to_string(kBundleMinorVersion)},
      {"provenance",
       {{"seed", b.provenance.seed},
        {"company", b.provenance.company},
        {"data_fingerprint", b.provenance.data_fingerprint},
        {"created", b.provenance.created}}},
      {"feature_config", feature_json(b.features)},
      {"normalization",
       {{"feature_min", std::vector<double>(nz.feature_min().begin(), nz.feature_min().end())},
        {"feature_max", std::vector<double>(nz.feature_max().begin(), nz.feature_max().end())},
        {"target_min", nz.target_min()},
        {"target_max", nz.target_max()}}},
      {"ann", ann_json(b.ann)},
      {"cart", cart_json(b.cart)},
      {"gpr", gpr_json(b.gpr)},
      {"weights", {{"ann", b.weights.ann}, {"cart", b.weights.cart}, {"gpr", b.weights.gpr}}},
      {"validation_fitness", b.validation_fitness},
  };
  return doc.dump(2) + "\n";
}

EnsembleBundle bundle_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, std::string("bundle is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", "") != kBundleFormat) throw Error(ErrorKind::Format, "not an ensemble bundle");
    const auto version = doc.at("format_version").get<std::string>();
    const auto major = std::stoi(version.substr(0, version.find('.')));
    if (major != kBundleMajorVersion) {
      throw Error(ErrorKind::Format, "unsupported bundle major version " + version);
    }

    EnsembleBundle b;
    const auto& p = doc.at("provenance");
    b.provenance = {p.at("seed").get<std::uint64_t>(), p.at("company").get<std::string>(),
                    p.at("data_fingerprint").get<std::string>(), p.at("created").get<std::string>()};
    b.features = feature_from(doc.at("feature_config"));
    const auto& nz = doc.at("normalization");
    b.normalization = Normalization(nz.at("feature_min").get<std::vector<double>>(),
                                    nz.at("feature_max").get<std::vector<double>>(),
                                    nz.at("target_min").get<double>(), nz.at("target_max").get<double>());
    b.ann = ann_from(doc.at("ann"));
    b.cart = cart_from(doc.at("cart"));
    b.gpr = gpr_from(doc.at("gpr"));
    const auto& w = doc.at("weights");
    b.weights = {w.at("ann").get<double>(), w.at("cart").get<double>(), w.at("gpr").get<double>()};
    b.weights.validate();
    if (!b.weights.usable()) throw Error(ErrorKind::Format, "bundle weights sum below the minimum");
    b.validation_fitness = doc.at("validation_fitness").get<double>();

    const auto dim = b.features.feature_count();
    if (b.normalization.dimension() != dim || b.ann.input_dim() != dim || b.cart.input_dim() != dim ||
        b.gpr.input_dim() != dim) {
      throw Error(ErrorKind::Format, "bundle components disagree on feature dimension");
    }
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, std::string("malformed bundle: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::Format, "malformed bundle format_version");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Format) throw;
    throw Error(ErrorKind::Format, std::string("invalid bundle: ") + e.what());
  }
}

void save_bundle(const EnsembleBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << bundle_to_json(bundle);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

EnsembleBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return bundle_from_json(buf.str());
}

}  // namespace wef
