#include "hardinv/training/trainer.hpp"

#include <numeric>

#include "hardinv/common/errors.hpp"
#include "hardinv/common/json_io.hpp"
#include "hardinv/common/rng.hpp"
#include "hardinv/nncore/adam.hpp"
#include "hardinv/nncore/loss.hpp"

namespace hardinv {

namespace {

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size == 0 || cfg.eval_every == 0 || cfg.hidden == 0 || cfg.steps_per_epoch == 0) {
    throw ContractError("TrainConfig: batch_size, eval_every, hidden and steps_per_epoch must be positive");
  }
  if (!(cfg.lr > 0.0)) throw ContractError("TrainConfig: lr must be positive");
}

bool records(const TrainConfig& cfg, std::size_t epoch) {
  return epoch % cfg.eval_every == 0 || epoch == cfg.epochs;
}

[[noreturn]] void abort_non_finite(const NonFiniteError& e, std::size_t epoch, std::size_t step, const Mlp& net) {
  std::string where = first_non_finite_layer(net);
  throw NonFiniteError("training aborted at epoch " + std::to_string(epoch) + ", step " + std::to_string(step) +
                       ": " + e.what() + (where.empty() ? "" : " (first non-finite parameters in " + where + ")"));
}

}  // namespace

std::string LossCurve::to_csv(const std::string& config_digest) const {
  std::string out;
  if (!config_digest.empty()) out += "# config_digest=" + config_digest + "\n";
  out += "epoch,train_loss,val_loss\n";
  for (const LossPoint& p : points) {
    out += std::to_string(p.epoch) + "," + format_double(p.train_loss) + "," + format_double(p.val_loss) + "\n";
  }
  return out;
}

LossCurve fit_supervised(Mlp& net, const Matrix& x, const Matrix& y, const Matrix& x_val, const Matrix& y_val,
                         const TrainConfig& cfg) {
  validate(cfg);
  if (x.rows() != y.rows() || x.rows() == 0) throw DimensionError("fit_supervised: x and y row counts differ");
  if (x.cols() != net.input_width() || y.cols() != net.output_width()) {
    throw DimensionError("fit_supervised: data shape does not match the network");
  }
  if (x_val.rows() != y_val.rows() || x_val.rows() == 0) {
    throw DimensionError("fit_supervised: validation x and y row counts differ");
  }
  AdamState adam = AdamState::for_network(net, AdamConfig{.lr = cfg.lr});
  Rng shuffle(mix_seed(cfg.seed));
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});

  LossCurve curve;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[shuffle.below(i + 1)]);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - begin);
      const std::span<const std::size_t> idx(order.data() + begin, count);
      try {
        const Matrix xb = x.gather_rows(idx);
        const Matrix yb = y.gather_rows(idx);
        const ForwardResult fwd = forward(net, xb);
        const LossValue lv = mse(fwd.output, yb);
        adam_step(net, backward(net, fwd.cache, lv.grad), adam);
        loss_sum += lv.loss * static_cast<double>(count);
      } catch (const NonFiniteError& e) {
        abort_non_finite(e, epoch, step, net);
      }
      ++step;
    }
    if (records(cfg, epoch)) {
      double val = 0.0;
      try {
        val = mse(predict(net, x_val), y_val).loss;
      } catch (const NonFiniteError& e) {
        abort_non_finite(e, epoch, step, net);
      }
      curve.points.push_back({epoch, loss_sum / static_cast<double>(order.size()), val});
    }
  }
  return curve;
}

FitResult train_teacher(const Dataset& train, const Dataset& val, const TrainConfig& cfg) {
  validate(cfg);
  if (!train.normalized || !val.normalized) throw ContractError("train_teacher: datasets must be normalized");
  validate_dataset(train);
  validate_dataset(val);
  if (train.feature_count() != val.feature_count()) throw DimensionError("train_teacher: feature counts differ");
  Mlp net = Mlp::init({train.feature_count(), cfg.hidden, 1}, OutputMode::linear, cfg.seed);
  LossCurve curve =
      fit_supervised(net, train.features, train.target_matrix(), val.features, val.target_matrix(), cfg);
  return {std::move(net), std::move(curve)};
}

Matrix student_validation_targets() {
  constexpr std::size_t kPoints = 256;
  Matrix grid(kPoints, 1);
  for (std::size_t i = 0; i < kPoints; ++i) grid(i, 0) = static_cast<double>(i) / static_cast<double>(kPoints - 1);
  return grid;
}

FitResult train_student(const Mlp& teacher, const Scaler& scaler, const TrainConfig& cfg) {
  validate(cfg);
  if (!teacher.frozen()) throw ContractError("train_student: teacher must be frozen");
  if (!scaler.fitted()) throw ContractError("train_student: scaler not fitted");
  if (teacher.output_width() != 1) throw DimensionError("train_student: teacher must have one output");
  if (scaler.feature_count() != teacher.input_width()) {
    throw DimensionError("train_student: scaler has " + std::to_string(scaler.feature_count()) +
                         " feature columns, teacher expects " + std::to_string(teacher.input_width()));
  }
  const std::string teacher_digest = teacher.digest();

  Mlp student = Mlp::init({1, cfg.hidden, teacher.input_width()}, OutputMode::sigmoid, cfg.seed);
  AdamState adam = AdamState::for_network(student, AdamConfig{.lr = cfg.lr});
  Rng targets(mix_seed(cfg.seed));
  const Matrix val_targets = student_validation_targets();

  LossCurve curve;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < cfg.steps_per_epoch; ++s, ++step) {
      try {
        const Matrix y = sample_targets(scaler, cfg.batch_size, targets);
        const ForwardResult x_hat = forward(student, y);
        const ForwardResult y_hat = forward(teacher, x_hat.output);
        const LossValue lv = mse(y_hat.output, y);
        const Matrix dx = input_gradient(teacher, y_hat.cache, lv.grad);
        adam_step(student, backward(student, x_hat.cache, dx), adam);
        loss_sum += lv.loss;
      } catch (const NonFiniteError& e) {
        abort_non_finite(e, epoch, step, student);
      }
    }
    if (records(cfg, epoch)) {
      double val = 0.0;
      try {
        val = mse(predict(teacher, predict(student, val_targets)), val_targets).loss;
      } catch (const NonFiniteError& e) {
        abort_non_finite(e, epoch, step, student);
      }
      curve.points.push_back({epoch, loss_sum / static_cast<double>(cfg.steps_per_epoch), val});
    }
  }
  if (teacher.digest() != teacher_digest) {
    throw ContractError("train_student: teacher parameters changed during student training");
  }
  return {std::move(student), std::move(curve)};
}

}  // namespace hardinv
