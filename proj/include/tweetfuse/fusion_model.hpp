#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetfuse/corpus.hpp"
#include "tweetfuse/embed_store.hpp"
#include "tweetfuse/layers.hpp"
#include "tweetfuse/preprocess.hpp"

namespace tweetfuse {

/// fusion: F = [D; C]. static_only: F = D. context_only: F = C.
enum class Variant { fusion, static_only, context_only };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

struct FusionConfig {
  std::size_t d1 = 128;  // BiLSTM output width, both directions together
  std::size_t d2 = 768;  // contextual vector width
  std::size_t n_filters = 256;
  std::size_t kernel = 3;
  std::size_t pool = 2;
  double head_dropout = 0.2;
  double recurrent_dropout = 0.2;
  std::size_t n_classes = 2;
  Variant variant = Variant::fusion;
  std::size_t max_len = 100;
  std::size_t embed_dim = 0;  // static embedding width, taken from the table
  bool trainable_static = false;

  bool uses_static() const { return variant != Variant::context_only; }
  bool uses_context() const { return variant != Variant::static_only; }
  std::size_t fused_width() const;
  void validate() const;
};

struct FusionActivations {
  std::vector<double> D;
  std::vector<double> C;
  std::vector<double> F;
  std::vector<double> probs;
};

/// One input row: token ids, its contextual vector (empty for static_only)
/// and, for labeled data, the class index.
struct Example {
  std::string id;
  TokenSequence tokens;
  std::span<const double> context;
  std::size_t label = 0;
};

/// Pairs each sequence with its context vector by id. A missing vector is a
/// DataError naming the id. `store` may be null for static_only.
std::vector<Example> assemble_examples(const Corpus& corpus, const std::vector<TokenSequence>& sequences,
                                       const ContextVectorStore* store, Variant variant,
                                       bool labeled = true);

/// Static branch (embed -> conv -> pool -> BiLSTM) producing D, concatenated
/// with the frozen context vector C, then dropout and a dense softmax head.
class FusionModel {
 public:
  explicit FusionModel(FusionConfig cfg);

  FusionModel(const FusionModel&) = delete;
  FusionModel& operator=(const FusionModel&) = delete;
  FusionModel(FusionModel&&) = default;
  FusionModel& operator=(FusionModel&&) = default;

  /// Seeded initialization. With trainable_static the table is copied into
  /// the model; the table itself is never written.
  void init(Rng& rng, const StaticEmbeddingTable* table);

  FusionActivations forward(const TokenSequence& seq, std::span<const double> context,
                            const StaticEmbeddingTable& table, bool train, Rng* rng);
  FusionActivations forward(const Example& ex, const StaticEmbeddingTable& table, bool train, Rng* rng) {
    return forward(ex.tokens, ex.context, table, train, rng);
  }

  /// Eval-mode forward over many examples; inference is read-only per example.
  std::vector<FusionActivations> predict(const std::vector<Example>& examples,
                                         const StaticEmbeddingTable& table);

  /// Backpropagates d loss / d logits from the last forward call.
  void backward(std::span<const double> grad_logits);

  std::vector<nn::Parameter*> trainable_parameters();
  std::vector<const nn::Parameter*> trainable_parameters() const;
  void zero_grad();

  const FusionConfig& config() const { return cfg_; }

 private:
  FusionConfig cfg_;
  std::optional<nn::Parameter> embedding_;
  std::optional<nn::Conv1d> conv_;
  std::optional<nn::MaxPool1d> pool_;
  std::optional<nn::BiLstm> bilstm_;
  nn::Dropout dropout_;
  nn::Dense head_;
  TokenSequence last_tokens_;
  bool cached_ = false;
};

}  // namespace tweetfuse
