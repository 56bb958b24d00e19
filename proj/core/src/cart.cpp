#include "wef/cart.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "wef/error.hpp"

namespace wef {

void CartParams::validate() const {
  if (min_leaf < 1) throw Error(ErrorKind::Validation, "cart.min_leaf must be >= 1");
  if (cv_folds < 2) throw Error(ErrorKind::Validation, "cart.cv_folds must be >= 2");
}

CartModel::CartModel(std::size_t input_dim, std::vector<CartNode> nodes)
    : input_dim_(input_dim), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorKind::Validation, "cart tree has no nodes");
  const auto n = static_cast<int>(nodes_.size());
  for (const auto& node : nodes_) {
    if (node.is_leaf()) continue;
    if (node.left <= 0 || node.right <= 0 || node.left >= n || node.right >= n ||
        static_cast<std::size_t>(node.feature) >= input_dim_) {
      throw Error(ErrorKind::Validation, "cart tree has a malformed internal node");
    }
  }
}

std::size_t CartModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const CartNode& n) { return n.is_leaf(); }));
}

std::size_t CartModel::depth() const {
  std::function<std::size_t(int)> rec = [&](int i) -> std::size_t {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf()) return 0;
    return 1 + std::max(rec(node.left), rec(node.right));
  };
  return nodes_.empty() ? 0 : rec(0);
}

double CartModel::predict(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw Error(ErrorKind::DimensionMismatch, "cart expects " + std::to_string(input_dim_) +
                                                  " inputs, got " + std::to_string(x.size()));
  }
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& node = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] < node.threshold
                                     ? node.left
                                     : node.right);
  }
  return nodes_[i].value;
}

double gini_impurity(std::span<const double> class_probs) {
  double sum = 0.0, sq = 0.0;
  for (double p : class_probs) {
    if (!(p >= 0.0)) throw Error(ErrorKind::Validation, "gini: negative probability");
    sum += p;
    sq += p * p;
  }
  if (class_probs.empty() || std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::Validation, "gini: probabilities must sum to 1");
  }
  return 1.0 - sq;
}

namespace {

struct Grower {
  const FeatureDataset& data;
  const CartParams& params;
  std::size_t dim;
  std::vector<CartNode> nodes;

  int grow(std::vector<std::size_t> idx, std::size_t depth) {
    CartNode node;
    node.count = idx.size();
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto i : idx) {
      sum += data[i].target;
      lo = std::min(lo, data[i].target);
      hi = std::max(hi, data[i].target);
    }
    node.value = std::clamp(sum / static_cast<double>(idx.size()), lo, hi);
    for (auto i : idx) {
      const double d = data[i].target - node.value;
      node.sse += d * d;
    }
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(node);

    if (lo == hi || idx.size() < 2 * params.min_leaf || depth >= params.max_depth) return id;

    const auto best = find_split(idx, node.value, node.sse);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      (data[i].features[static_cast<std::size_t>(best.feature)] < best.threshold ? left : right)
          .push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& self = nodes[static_cast<std::size_t>(id)];
    self.feature = best.feature;
    self.threshold = best.threshold;
    self.left = l;
    self.right = r;
    return id;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  Split find_split(const std::vector<std::size_t>& idx, double centre, double parent_sse) const {
    Split best;
    const std::size_t n = idx.size();
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < dim; ++f) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data[a].features[f] < data[b].features[f];
      });
      double total = 0.0, total_sq = 0.0;
      for (auto i : order) {
        const double y = data[i].target - centre;
        total += y;
        total_sq += y * y;
      }
      double left = 0.0, left_sq = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const double y = data[order[k]].target - centre;
        left += y;
        left_sq += y * y;
        const std::size_t nl = k + 1, nr = n - nl;
        if (nl < params.min_leaf || nr < params.min_leaf) continue;
        const double a = data[order[k]].features[f];
        const double b = data[order[k + 1]].features[f];
        if (!(a < b)) continue;
        const double right = total - left, right_sq = total_sq - left_sq;
        const double sse_l = std::max(0.0, left_sq - left * left / static_cast<double>(nl));
        const double sse_r = std::max(0.0, right_sq - right * right / static_cast<double>(nr));
        const double gain = parent_sse - sse_l - sse_r;
        if (gain <= 1e-12 * parent_sse) continue;
        if (best.feature < 0 || gain > best.gain * (1.0 + 1e-12)) {
          double mid = a + (b - a) / 2.0;
          if (!(mid > a)) mid = b;
          best = {static_cast<int>(f), mid, gain};
        }
      }
    }
    return best;
  }
};

// Rebuilds a compact tree from `nodes`, treating `collapsed` nodes as leaves.
CartModel compact(std::size_t dim, std::span<const CartNode> nodes,
                  const std::vector<bool>& collapsed) {
  std::vector<CartNode> out;
  std::function<int(int)> copy = [&](int i) -> int {
    CartNode node = nodes[static_cast<std::size_t>(i)];
    const int id = static_cast<int>(out.size());
    if (collapsed[static_cast<std::size_t>(i)] || node.is_leaf()) {
      node.feature = -1;
      node.left = node.right = -1;
      node.threshold = 0.0;
      out.push_back(node);
      return id;
    }
    out.push_back(node);
    const int l = copy(node.left);
    const int r = copy(node.right);
    out[static_cast<std::size_t>(id)].left = l;
    out[static_cast<std::size_t>(id)].right = r;
    return id;
  };
  copy(0);
  return CartModel(dim, std::move(out));
}

double held_out_sse(const CartModel& tree, const FeatureDataset& data, std::size_t begin,
                    std::size_t end) {
  double sse = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double e = data[i].target - tree.predict(data[i].features);
    sse += e * e;
  }
  return sse;
}

const CartModel& subtree_at(const std::vector<PruneStep>& seq, double alpha) {
  std::size_t pick = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (seq[k].alpha <= alpha) pick = k;
  }
  return seq[pick].tree;
}

}  // namespace

CartModel cart_grow(const FeatureDataset& train, const CartParams& params) {
  params.validate();
  if (train.empty()) throw Error(ErrorKind::Validation, "cart training set is empty");
  const std::size_t dim = train.front().features.size();
  for (const auto& s : train) {
    if (s.features.size() != dim) throw Error(ErrorKind::DimensionMismatch, "ragged cart training set");
  }
  Grower g{train, params, dim, {}};
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  g.grow(std::move(idx), 0);
  return CartModel(dim, std::move(g.nodes));
}

std::vector<PruneStep> cost_complexity_sequence(const CartModel& tree) {
  const auto nodes = tree.nodes();
  const std::size_t m = nodes.size();
  std::vector<bool> collapsed(m, false);
  std::vector<PruneStep> seq{{0.0, tree}};

  std::vector<double> subtree_sse(m);
  std::vector<std::size_t> leaves(m);
  std::vector<double> g(m);
  while (!(collapsed[0] || nodes[0].is_leaf())) {
    // Post-order pass: children always have larger indices than their parent.
    for (std::size_t i = m; i-- > 0;) {
      const auto& node = nodes[i];
      if (node.is_leaf() || collapsed[i]) {
        subtree_sse[i] = node.sse;
        leaves[i] = 1;
      } else {
        const auto l = static_cast<std::size_t>(node.left), r = static_cast<std::size_t>(node.right);
        subtree_sse[i] = subtree_sse[l] + subtree_sse[r];
        leaves[i] = leaves[l] + leaves[r];
      }
    }
    double alpha = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> active;
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
      if (nodes[i].is_leaf() || collapsed[i]) return;
      g[i] = (nodes[i].sse - subtree_sse[i]) / static_cast<double>(leaves[i] - 1);
      alpha = std::min(alpha, g[i]);
      active.push_back(i);
      visit(static_cast<std::size_t>(nodes[i].left));
      visit(static_cast<std::size_t>(nodes[i].right));
    };
    visit(0);
    const double tol = 1e-12 * std::max(1.0, std::abs(alpha));
    for (auto i : active) {
      if (g[i] <= alpha + tol) collapsed[i] = true;
    }
    seq.push_back({std::max(alpha, 0.0), compact(tree.input_dim(), nodes, collapsed)});
  }
  return seq;
}

PruneSelection cart_prune_detail(const CartModel& tree, const FeatureDataset& train,
                                 const CartParams& params) {
  params.validate();
  PruneSelection out;
  out.sequence = cost_complexity_sequence(tree);
  out.cv_cost.assign(out.sequence.size(), 0.0);
  out.selected = out.sequence.size() - 1;
  if (out.sequence.size() == 1) return out;

  const std::size_t n = train.size();
  const std::size_t folds = std::min(params.cv_folds, n);
  if (folds < 2) return out;

  const std::size_t steps = out.sequence.size();
  std::vector<double> probe(steps);
  for (std::size_t k = 0; k + 1 < steps; ++k) {
    probe[k] = std::sqrt(out.sequence[k].alpha * out.sequence[k + 1].alpha);
  }
  probe[steps - 1] = std::numeric_limits<double>::infinity();

  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t begin = f * n / folds, end = (f + 1) * n / folds;
    FeatureDataset rest;
    rest.reserve(n - (end - begin));
    rest.insert(rest.end(), train.begin(), train.begin() + static_cast<std::ptrdiff_t>(begin));
    rest.insert(rest.end(), train.begin() + static_cast<std::ptrdiff_t>(end), train.end());
    const auto fold_seq = cost_complexity_sequence(cart_grow(rest, params));
    for (std::size_t k = 0; k < steps; ++k) {
      out.cv_cost[k] += held_out_sse(subtree_at(fold_seq, probe[k]), train, begin, end);
    }
  }

  for (std::size_t k = steps; k-- > 0;) {
    if (out.cv_cost[k] < out.cv_cost[out.selected]) out.selected = k;
  }
  return out;
}

CartModel cart_prune(const CartModel& tree, const FeatureDataset& train, const CartParams& params) {
  auto detail = cart_prune_detail(tree, train, params);
  return std::move(detail.sequence[detail.selected].tree);
}

}  // namespace wef
