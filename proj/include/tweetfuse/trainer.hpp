#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tweetfuse/fusion_model.hpp"
#include "tweetfuse/metrics.hpp"
#include "tweetfuse/optimizer.hpp"

namespace tweetfuse {

struct TrainConfig {
  double learning_rate = 5e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clipnorm = 1.0;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 30;
  std::size_t early_stop_patience = 2;
  std::string early_stop_metric = "val_loss";
  std::uint64_t seed = 0;
  std::size_t runs = 5;

  AdamConfig adam() const {
    return {learning_rate, adam_beta1, adam_beta2, adam_epsilon, clipnorm};
  }
  void validate() const;
};

/// Patience counter on validation loss; an epoch improves only if its loss is
/// strictly below the best seen.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience);

  /// Records the loss of the next epoch (1-based). Returns true on improvement.
  bool update(double val_loss);
  bool should_stop() const { return bad_epochs_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  std::size_t epochs_seen() const { return epochs_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t bad_epochs_ = 0;
  std::size_t best_epoch_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  MetricsReport val_metrics;
  double max_grad_norm = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  bool stopped_early = false;
};

struct EvalOutput {
  double loss = 0.0;
  std::vector<std::size_t> predictions;
  std::vector<std::vector<double>> probs;
  MetricsReport report;
};

/// Mean cross-entropy, argmax predictions and metrics in eval mode.
EvalOutput evaluate_model(FusionModel& model, const std::vector<Example>& examples,
                          const StaticEmbeddingTable& table, Task task);

/// Seed for the stream that drives batch order and dropout during training.
std::uint64_t training_stream_seed(std::uint64_t seed);

/// Mini-batch Adam on mean batch cross-entropy with global-norm clipping.
/// Stops after max_epochs or `patience` epochs without a validation-loss
/// improvement, then restores the best epoch's weights into `model`.
TrainResult train(FusionModel& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const StaticEmbeddingTable& table,
                  const TrainConfig& cfg, Task task,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace tweetfuse
