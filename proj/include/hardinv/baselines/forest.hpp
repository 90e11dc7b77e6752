#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hardinv/common/json_io.hpp"
#include "hardinv/nncore/matrix.hpp"

namespace hardinv {

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 12;
  std::size_t min_leaf = 2;
  /// Candidate inputs per split. With a single input this changes nothing.
  std::size_t features_per_split = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  /// Worker threads for fit_forest. Results do not depend on it.
  std::size_t threads = 1;

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

/// A split sends x[feature] <= threshold to `left`. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<double> value;
  std::size_t n_samples = 0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Nodes in preorder; nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  std::span<const double> predict(std::span<const double> x) const;
  std::size_t depth() const;
  std::size_t leaf_count() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

/// Multi-output CART: greedy splits minimizing the summed per-output squared
/// error of the children. Rows of `x` are inputs, rows of `y` the targets.
/// A node becomes a leaf at max_depth, when it cannot hold two children of
/// min_leaf rows, when its inputs are all equal, or when no split lowers
/// the error.
Tree fit_tree(const Matrix& x, const Matrix& y, const ForestParams& params, std::uint64_t seed);

class Forest {
 public:
  Forest() = default;
  Forest(ForestParams params, std::size_t input_width, std::size_t output_width, std::vector<Tree> trees);

  bool fitted() const { return !trees_.empty(); }
  const ForestParams& params() const { return params_; }
  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t input_width() const { return input_width_; }
  std::size_t output_width() const { return output_width_; }

  /// Unweighted mean of the tree predictions, one row per input row.
  Matrix predict(const Matrix& x) const;

  friend bool operator==(const Forest&, const Forest&) = default;

 private:
  ForestParams params_;
  std::size_t input_width_ = 0;
  std::size_t output_width_ = 0;
  std::vector<Tree> trees_;
};

/// Tree t is fitted with seed mix_seed(params.seed + t) on its own bootstrap
/// resample, so the result is the same for any thread count.
Forest fit_forest(const Matrix& x, const Matrix& y, const ForestParams& params);

Json forest_to_json(const Forest& forest);
Forest forest_from_json(const Json& doc);
void save_forest(const Forest& forest, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

}  // namespace hardinv
