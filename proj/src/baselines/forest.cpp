#include "hardinv/baselines/forest.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <thread>

#include "hardinv/common/errors.hpp"
#include "hardinv/common/rng.hpp"

namespace hardinv {

namespace {

constexpr int kForestSchemaVersion = 1;

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Matrix& y, const ForestParams& params, Rng& rng)
      : x_(x), y_(y), params_(params), rng_(rng) {}

  Tree build(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  std::uint32_t grow(std::vector<std::size_t>& rows, std::size_t depth) {
    const auto index = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::vector<double> mean = node_mean(rows);
    const std::size_t n = rows.size();

    std::optional<SplitChoice> choice;
    if (depth < params_.max_depth && n >= 2 * params_.min_leaf) choice = best_split(rows, mean);
    if (!choice) {
      TreeNode& leaf = tree_.nodes[index];
      leaf.value = mean;
      leaf.n_samples = n;
      return index;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) {
      (x_(r, static_cast<std::size_t>(choice->feature)) <= choice->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const std::uint32_t l = grow(left, depth + 1);
    const std::uint32_t r = grow(right, depth + 1);
    TreeNode& node = tree_.nodes[index];
    node.feature = choice->feature;
    node.threshold = choice->threshold;
    node.left = l;
    node.right = r;
    node.n_samples = n;
    return index;
  }

  std::vector<double> node_mean(const std::vector<std::size_t>& rows) const {
    std::vector<double> mean(y_.cols(), 0.0);
    for (std::size_t r : rows) {
      const auto row = y_.row(r);
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += row[k];
    }
    for (double& m : mean) m /= static_cast<double>(rows.size());
    return mean;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> features(x_.cols());
    std::iota(features.begin(), features.end(), 0);
    const std::size_t take = std::min(params_.features_per_split, features.size());
    if (take == features.size()) return features;
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(features.size() - i));
      std::swap(features[i], features[j]);
    }
    features.resize(take);
    return features;
  }

  // Children SSE is computed from centered prefix sums: sum(c^2) - sum(c)^2 / n per output.
  std::optional<SplitChoice> best_split(const std::vector<std::size_t>& rows, const std::vector<double>& mean) {
    const std::size_t n = rows.size();
    const std::size_t k_out = y_.cols();
    std::vector<double> centered(n * k_out);
    std::vector<double> total_s(k_out, 0.0);
    std::vector<double> total_q(k_out, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = y_.row(rows[i]);
      for (std::size_t k = 0; k < k_out; ++k) {
        const double c = row[k] - mean[k];
        centered[i * k_out + k] = c;
        total_s[k] += c;
        total_q[k] += c * c;
      }
    }
    double parent = 0.0;
    for (std::size_t k = 0; k < k_out; ++k) parent += total_q[k] - total_s[k] * total_s[k] / static_cast<double>(n);
    if (!(parent > 0.0)) return std::nullopt;

    std::optional<SplitChoice> best;
    std::vector<std::size_t> order(n);
    std::vector<double> left_s(k_out);
    std::vector<double> left_q(k_out);
    for (std::size_t f : candidate_features()) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double xa = x_(rows[a], f);
        const double xb = x_(rows[b], f);
        return xa < xb || (xa == xb && a < b);
      });
      std::fill(left_s.begin(), left_s.end(), 0.0);
      std::fill(left_q.begin(), left_q.end(), 0.0);
      for (std::size_t i = 1; i < n; ++i) {
        const double* c = &centered[order[i - 1] * k_out];
        for (std::size_t k = 0; k < k_out; ++k) {
          left_s[k] += c[k];
          left_q[k] += c[k] * c[k];
        }
        if (i < params_.min_leaf || n - i < params_.min_leaf) continue;
        const double lo = x_(rows[order[i - 1]], f);
        const double hi = x_(rows[order[i]], f);
        if (!(lo < hi)) continue;
        const double nl = static_cast<double>(i);
        const double nr = static_cast<double>(n - i);
        double sse = 0.0;
        for (std::size_t k = 0; k < k_out; ++k) {
          const double rs = total_s[k] - left_s[k];
          sse += left_q[k] - left_s[k] * left_s[k] / nl;
          sse += (total_q[k] - left_q[k]) - rs * rs / nr;
        }
        if (!(sse < parent) || (best && !(sse < best->sse))) continue;
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = SplitChoice{static_cast<int>(f), threshold, sse};
      }
    }
    return best;
  }

  const Matrix& x_;
  const Matrix& y_;
  const ForestParams& params_;
  Rng& rng_;
  Tree tree_;
};

void check_params(const ForestParams& p) {
  if (p.n_trees == 0) throw ContractError("forest: n_trees must be positive");
  if (p.min_leaf == 0) throw ContractError("forest: min_leaf must be positive");
  if (p.features_per_split == 0) throw ContractError("forest: features_per_split must be positive");
}

void check_training_data(const Matrix& x, const Matrix& y, const ForestParams& p) {
  if (x.rows() != y.rows()) throw DimensionError("forest: input and target row counts differ");
  if (x.cols() == 0 || y.cols() == 0) throw DimensionError("forest: empty input or target width");
  if (x.rows() < 2 * p.min_leaf) {
    throw ContractError("forest: need at least " + std::to_string(2 * p.min_leaf) + " rows, got " +
                        std::to_string(x.rows()));
  }
  x.require_finite("forest inputs");
  y.require_finite("forest targets");
}

Tree fit_one(const Matrix& x, const Matrix& y, const ForestParams& params, std::uint64_t seed, bool bootstrap) {
  Rng rng(mix_seed(seed));
  std::vector<std::size_t> rows(x.rows());
  if (bootstrap) {
    for (std::size_t& r : rows) r = static_cast<std::size_t>(rng.below(x.rows()));
  } else {
    std::iota(rows.begin(), rows.end(), 0);
  }
  return TreeBuilder(x, y, params, rng).build(std::move(rows));
}

Json node_to_json(const Tree& tree, std::uint32_t index) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return Json{{"value", node.value}, {"n_samples", node.n_samples}};
  return Json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"n_samples", node.n_samples},
              {"left", node_to_json(tree, node.left)},
              {"right", node_to_json(tree, node.right)}};
}

std::uint32_t node_from_json(const Json& j, Tree& tree, std::size_t input_width, std::size_t output_width,
                             std::size_t depth) {
  if (depth > 64) throw IngestError("forest: tree too deep");
  const auto index = static_cast<std::uint32_t>(tree.nodes.size());
  tree.nodes.emplace_back();
  const auto n_samples = j.at("n_samples").get<std::size_t>();
  if (j.contains("value")) {
    auto value = j.at("value").get<std::vector<double>>();
    if (value.size() != output_width) throw IngestError("forest: leaf value has the wrong width");
    tree.nodes[index].value = std::move(value);
    tree.nodes[index].n_samples = n_samples;
    return index;
  }
  const int feature = j.at("feature").get<int>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= input_width) {
    throw IngestError("forest: split feature out of range");
  }
  const double threshold = j.at("threshold").get<double>();
  const std::uint32_t l = node_from_json(j.at("left"), tree, input_width, output_width, depth + 1);
  const std::uint32_t r = node_from_json(j.at("right"), tree, input_width, output_width, depth + 1);
  TreeNode& node = tree.nodes[index];
  node.feature = feature;
  node.threshold = threshold;
  node.left = l;
  node.right = r;
  node.n_samples = n_samples;
  return index;
}

std::size_t depth_below(const Tree& tree, std::uint32_t index) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return 0;
  return 1 + std::max(depth_below(tree, node.left), depth_below(tree, node.right));
}

}  // namespace

std::span<const double> Tree::predict(std::span<const double> x) const {
  if (nodes.empty()) throw ContractError("tree: predict before fit");
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    node = &nodes[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right];
  }
  return node->value;
}

std::size_t Tree::depth() const { return nodes.empty() ? 0 : depth_below(*this, 0); }

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

Tree fit_tree(const Matrix& x, const Matrix& y, const ForestParams& params, std::uint64_t seed) {
  check_params(params);
  check_training_data(x, y, params);
  return fit_one(x, y, params, seed, false);
}

Forest::Forest(ForestParams params, std::size_t input_width, std::size_t output_width, std::vector<Tree> trees)
    : params_(params), input_width_(input_width), output_width_(output_width), trees_(std::move(trees)) {}

Matrix Forest::predict(const Matrix& x) const {
  if (!fitted()) throw ContractError("forest: predict before fit");
  if (x.cols() != input_width_) {
    throw DimensionError("forest: input has " + std::to_string(x.cols()) + " columns, expected " +
                         std::to_string(input_width_));
  }
  Matrix out(x.rows(), output_width_);
  const double inv = 1.0 / static_cast<double>(trees_.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto dst = out.row(r);
    for (const Tree& tree : trees_) {
      const auto v = tree.predict(x.row(r));
      for (std::size_t k = 0; k < output_width_; ++k) dst[k] += v[k];
    }
    for (double& d : dst) d *= inv;
  }
  return out;
}

Forest fit_forest(const Matrix& x, const Matrix& y, const ForestParams& params) {
  check_params(params);
  check_training_data(x, y, params);
  std::vector<Tree> trees(params.n_trees);
  const auto fit_range = [&](std::size_t worker, std::size_t workers) {
    for (std::size_t t = worker; t < params.n_trees; t += workers) {
      trees[t] = fit_one(x, y, params, params.seed + t, params.bootstrap);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(params.threads, 1, params.n_trees);
  if (workers == 1) {
    fit_range(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(fit_range, w, workers);
  }
  return Forest(params, x.cols(), y.cols(), std::move(trees));
}

Json forest_to_json(const Forest& forest) {
  if (!forest.fitted()) throw ContractError("forest: cannot serialize an unfitted forest");
  const ForestParams& p = forest.params();
  Json trees = Json::array();
  for (const Tree& t : forest.trees()) trees.push_back(node_to_json(t, 0));
  return Json{{"kind", "forest"},
              {"schema_version", kForestSchemaVersion},
              {"input_width", forest.input_width()},
              {"output_width", forest.output_width()},
              {"params",
               {{"n_trees", p.n_trees},
                {"max_depth", p.max_depth},
                {"min_leaf", p.min_leaf},
                {"features_per_split", p.features_per_split},
                {"bootstrap", p.bootstrap},
                {"seed", p.seed}}},
              {"trees", std::move(trees)}};
}

Forest forest_from_json(const Json& doc) {
  try {
    if (doc.value("kind", "") != "forest") throw IngestError("forest: document kind is not 'forest'");
    if (doc.value("schema_version", -1) != kForestSchemaVersion) {
      throw IngestError("forest: unsupported schema_version");
    }
    const Json& pj = doc.at("params");
    ForestParams p;
    p.n_trees = pj.at("n_trees").get<std::size_t>();
    p.max_depth = pj.at("max_depth").get<std::size_t>();
    p.min_leaf = pj.at("min_leaf").get<std::size_t>();
    p.features_per_split = pj.at("features_per_split").get<std::size_t>();
    p.bootstrap = pj.at("bootstrap").get<bool>();
    p.seed = pj.at("seed").get<std::uint64_t>();
    const auto in = doc.at("input_width").get<std::size_t>();
    const auto out = doc.at("output_width").get<std::size_t>();
    const Json& tj = doc.at("trees");
    if (!tj.is_array() || tj.size() != p.n_trees) throw IngestError("forest: tree count does not match n_trees");
    std::vector<Tree> trees;
    for (const Json& root : tj) {
      Tree t;
      node_from_json(root, t, in, out, 0);
      trees.push_back(std::move(t));
    }
    return Forest(p, in, out, std::move(trees));
  } catch (const Json::exception& e) {
    throw IngestError(std::string("forest: ") + e.what());
  }
}

void save_forest(const Forest& forest, const std::filesystem::path& path) {
  write_text_file(path, dump_json(forest_to_json(forest)));
}

Forest load_forest(const std::filesystem::path& path) { return forest_from_json(read_json_file(path)); }

}  // namespace hardinv
