#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "remaster/dataset.hpp"
#include "remaster/networks.hpp"

namespace remaster {

// ---------------------------------------------------------------------------
// Objective

struct LossConfig {
  /// Weight of the chrominance term.
  float beta = 1.0f;
  void validate() const;
};

/// mean|pred_l - y_l| + beta * mean|pred_ab - y_ab|. Throws DimensionError on
/// shape mismatch.
Tensor joint_loss(const Tensor& pred_l, const Tensor& pred_ab, const Tensor& y_l, const Tensor& y_ab,
                  const LossConfig& cfg);

// ---------------------------------------------------------------------------
// Optimizer

struct AdadeltaConfig {
  double rho = 0.95;
  double eps = 1e-6;
};

/// Elementwise ADADELTA:
///   E[g^2] <- rho E[g^2] + (1 - rho) g^2
///   dx     <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
class Adadelta {
 public:
  explicit Adadelta(std::vector<Tensor> params, AdadeltaConfig cfg = {});

  /// Applies one update from the accumulated gradients. Throws AutogradError
  /// if a parameter has no gradient buffer.
  void step();
  /// Gives every parameter an all-zero gradient buffer.
  void zero_grad();

  const std::vector<Tensor>& params() const { return params_; }
  const std::vector<std::vector<float>>& square_grad() const { return square_grad_; }
  const std::vector<std::vector<float>>& square_delta() const { return square_delta_; }
  const AdadeltaConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor> params_;
  AdadeltaConfig cfg_;
  std::vector<std::vector<float>> square_grad_, square_delta_;
};

// ---------------------------------------------------------------------------
// Checkpoints

struct CheckpointTensor {
  std::string name;
  Shape shape;
  std::vector<float> data;

  bool operator==(const CheckpointTensor&) const = default;
};

struct Checkpoint {
  std::vector<CheckpointTensor> tensors;

  static constexpr std::uint32_t kVersion = 1;

  const CheckpointTensor* find(const std::string& name) const;
  bool operator==(const Checkpoint&) const = default;
};

/// Every tensor of the store, trainable or not, in registration order.
Checkpoint capture_checkpoint(const ParamStore& store);
/// Copies values into the store. Every store tensor must be present with the
/// same shape; the error names the first tensor that is missing or differs.
void apply_checkpoint(const Checkpoint& ckpt, ParamStore& store);

/// "RMST", u32 version, u32 count, then per tensor u32 name length, UTF-8
/// name, u32 rank, u32 dims, little-endian f32 values; trailing CRC32 of all
/// preceding bytes. Throws CheckpointError.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

/// Network configuration a checkpoint was written with (width divisor read
/// from tensor shapes). Throws CheckpointError if unrecognised.
NetworkConfig network_config_from(const Checkpoint& ckpt);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  std::int64_t phase1_iters = 0;
  std::int64_t phase2_iters = 0;
  std::int64_t batch = 1;
  LossConfig loss{};
  AdadeltaConfig optimizer{};
  SampleOptions samples{};
  std::uint64_t seed = 1;
  /// Held-out samples scored at every validation.
  std::int64_t validation_samples = 4;
  /// Worker threads producing samples ahead of the optimizer.
  int producers = 1;

  void validate() const;
  /// Iterations between validations within a phase: max(1, iters / 20).
  static std::int64_t validation_interval(std::int64_t iters);
};

struct LogRow {
  std::int64_t iter = 0;  // 1-based, counted across both phases
  int phase = 1;
  double train_loss = 0;
  double val_loss = -1;  // negative when no validation ran at this iteration
};

struct TrainResult {
  std::vector<LogRow> log;
  double best_val_loss = -1;
  std::int64_t best_iter = 0;  // 0 = the initial parameters were kept
};

/// Owns the optimizer state for one model. Each sample in a batch gets its
/// own forward pass; gradients are averaged over the batch.
class Trainer {
 public:
  Trainer(RemasterModel& model, LossConfig loss = {}, AdadeltaConfig opt = {});

  /// Phase 1: restoration on |P(x) - y_l| and colorization on
  /// |S(y_l, z) - y_ab|, each network stepping on its own term. Returns the
  /// sum of the two batch-mean losses.
  double step_separate(const std::vector<TrainingSample>& batch);
  /// Phase 2: joint objective through S(P(x), z). Returns the batch-mean loss.
  double step_joint(const std::vector<TrainingSample>& batch);
  /// Joint objective in inference mode, no parameter change.
  double evaluate(const std::vector<TrainingSample>& samples) const;

  RemasterModel& model() { return model_; }

 private:
  RemasterModel& model_;
  LossConfig loss_;
  Adadelta pre_opt_, sr_opt_;
};

using ProgressFn = std::function<void(const LogRow&)>;

/// Two-phase schedule over a dataset. Validation runs every
/// validation_interval(phase iters) iterations and at the end of each phase;
/// the model is left holding the parameters with the lowest validation loss.
TrainResult train(RemasterModel& model, const VideoDataset& train_set, const VideoDataset& val_set,
                  const NoiseBank& bank, const TrainConfig& cfg, const ProgressFn& progress = {});

void write_log_csv(const std::vector<LogRow>& log, const std::filesystem::path& path);

}  // namespace remaster
