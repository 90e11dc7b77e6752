#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardinv/data/dataset.hpp"
#include "hardinv/data/scaler.hpp"
#include "hardinv/nncore/mlp.hpp"

namespace hardinv {

struct TrainConfig {
  std::size_t epochs = 500;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;
  std::size_t hidden = 64;
  /// Only used by train_student, which has no dataset to sweep: an epoch is
  /// this many sampled batches (500 x 30 = 15,000 steps by default).
  std::size_t steps_per_epoch = 30;
};

struct LossPoint {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;

  friend bool operator==(const LossPoint&, const LossPoint&) = default;
};

/// Normalized-unit losses, one point per evaluated epoch.
struct LossCurve {
  std::vector<LossPoint> points;

  /// `epoch,train_loss,val_loss`, preceded by a `# config_digest=` line when
  /// a digest is given.
  std::string to_csv(const std::string& config_digest = {}) const;
  friend bool operator==(const LossCurve&, const LossCurve&) = default;
};

struct FitResult {
  Mlp net;
  LossCurve curve;
};

/// Minibatch MSE training with Adam over seeded per-epoch shuffles.
/// Training loss per epoch is the sample-weighted mean of the batch losses;
/// validation loss is the MSE over the whole validation set.
LossCurve fit_supervised(Mlp& net, const Matrix& x, const Matrix& y, const Matrix& x_val, const Matrix& y_val,
                         const TrainConfig& cfg);

/// Forward surrogate on normalized data: features (N x F) -> hardness.
FitResult train_teacher(const Dataset& train, const Dataset& val, const TrainConfig& cfg);

/// Inverse model trained through a frozen teacher: sampled targets y go
/// through student -> teacher and the loss is MSE(teacher(student(y)), y).
/// The teacher must be frozen; its digest is compared before and after.
FitResult train_student(const Mlp& teacher, const Scaler& scaler, const TrainConfig& cfg);

/// The fixed validation targets of train_student: 256 evenly spaced values
/// covering [0, 1].
Matrix student_validation_targets();

}  // namespace hardinv
