#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wef/dataset.hpp"

namespace wef {

struct CartParams {
  std::size_t min_leaf = 5;
  std::size_t cv_folds = 10;
  std::size_t max_depth = 20;

  void validate() const;
};

// Flat binary tree; node 0 is the root. Leaves have feature == -1.
struct CartNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;    // mean training target reaching this node
  std::size_t count = 0;  // training samples reaching this node
  double sse = 0.0;      // sum of squared deviations from `value`

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const CartNode&, const CartNode&) = default;
};

class CartModel {
 public:
  CartModel() = default;
  CartModel(std::size_t input_dim, std::vector<CartNode> nodes);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::span<const CartNode> nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  // Routes left when x[feature] < threshold, right otherwise.
  double predict(std::span<const double> x) const;

  friend bool operator==(const CartModel&, const CartModel&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::vector<CartNode> nodes_;
};

// 1 - sum p_j^2. Throws Validation unless probs are nonnegative and sum to 1.
double gini_impurity(std::span<const double> class_probs);

// Greedy growth maximizing the drop in within-node target variance. Split
// thresholds are midpoints between consecutive distinct values; equal gains go
// to the lower feature index, then the lower threshold.
CartModel cart_grow(const FeatureDataset& train, const CartParams& params);

struct PruneStep {
  double alpha = 0.0;
  CartModel tree;
};

// Weakest-link sequence from the full tree (alpha 0) down to the root leaf.
std::vector<PruneStep> cost_complexity_sequence(const CartModel& tree);

struct PruneSelection {
  std::vector<PruneStep> sequence;
  std::vector<double> cv_cost;  // held-out SSE per sequence entry
  std::size_t selected = 0;
};

// Scores every subtree in the sequence with contiguous-block cross-validation.
// Ties go to the smaller subtree.
PruneSelection cart_prune_detail(const CartModel& tree, const FeatureDataset& train,
                                 const CartParams& params);
CartModel cart_prune(const CartModel& tree, const FeatureDataset& train, const CartParams& params);

}  // namespace wef
