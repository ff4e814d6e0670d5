#include "tweetfuse/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tweetfuse/error.hpp"

namespace tweetfuse {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !(adam_epsilon > 0.0) || !(clipnorm > 0.0)) {
    throw UsageError("learning rate, epsilon and clipnorm must be positive");
  }
  if (batch_size == 0) throw UsageError("batch size must be positive");
  if (max_epochs == 0) throw UsageError("max_epochs must be positive");
  if (early_stop_patience < 1) throw UsageError("early-stopping patience must be at least 1");
  if (early_stop_metric != "val_loss") throw UsageError("only val_loss early stopping is supported");
  if (runs == 0) throw UsageError("runs must be at least 1");
}

EarlyStopping::EarlyStopping(std::size_t patience) : patience_(patience) {
  if (patience_ < 1) throw UsageError("early-stopping patience must be at least 1");
}

bool EarlyStopping::update(double val_loss) {
  ++epochs_;
  if (val_loss < best_loss_) {
    best_loss_ = val_loss;
    best_epoch_ = epochs_;
    bad_epochs_ = 0;
    return true;
  }
  ++bad_epochs_;
  return false;
}

std::uint64_t training_stream_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

EvalOutput evaluate_model(FusionModel& model, const std::vector<Example>& examples,
                          const StaticEmbeddingTable& table, Task task) {
  EvalOutput out;
  const auto acts = model.predict(examples, table);
  std::vector<std::size_t> gold;
  gold.reserve(examples.size());
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& probs = acts[i].probs;
    const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    out.predictions.push_back(best);
    out.probs.push_back(probs);
    gold.push_back(examples[i].label);
    loss_sum += nn::cross_entropy(probs, examples[i].label).loss;
  }
  out.loss = examples.empty() ? 0.0 : loss_sum / static_cast<double>(examples.size());
  out.report = evaluate(out.predictions, gold, task);
  return out;
}

TrainResult train(FusionModel& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const StaticEmbeddingTable& table,
                  const TrainConfig& cfg, Task task,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw DataError("training set is empty");
  if (val_set.empty()) throw DataError("validation set is empty");
  if (model.config().n_classes != num_classes(task)) {
    throw UsageError("model class count does not match the task");
  }

  Rng rng(training_stream_seed(cfg.seed));
  Adam adam(cfg.adam());
  const auto params = model.trainable_parameters();
  EarlyStopping stopper(cfg.early_stop_patience);
  std::vector<nn::Tensor> best_weights;
  TrainResult result;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      model.zero_grad();
      for (std::size_t b = start; b < end; ++b) {
        const Example& ex = train_set[order[b]];
        const auto act = model.forward(ex, table, true, &rng);
        auto lg = nn::cross_entropy(act.probs, ex.label);
        if (!std::isfinite(lg.loss)) throw NumericError("non-finite loss on example '" + ex.id + "'");
        loss_sum += lg.loss;
        for (double& g : lg.grad_logits) g *= scale;
        model.backward(lg.grad_logits);
      }
      rec.max_grad_norm = std::max(rec.max_grad_norm, adam.step(params));
    }
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());

    rec.train_accuracy = evaluate_model(model, train_set, table, task).report.accuracy;
    const EvalOutput val = evaluate_model(model, val_set, table, task);
    rec.val_loss = val.loss;
    rec.val_metrics = val.report;
    if (!std::isfinite(rec.val_loss)) throw NumericError("non-finite validation loss");

    if (stopper.update(rec.val_loss)) {
      best_weights.clear();
      for (const nn::Parameter* p : params) best_weights.push_back(p->value);
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stopper.should_stop()) {
      result.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }

  for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = best_weights[k];
  result.best_epoch = stopper.best_epoch();
  result.best_val_loss = stopper.best_loss();
  return result;
}

}  // namespace tweetfuse
