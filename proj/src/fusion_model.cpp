#include "tweetfuse/fusion_model.hpp"

#include <algorithm>

#include "tweetfuse/error.hpp"

namespace tweetfuse {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::fusion:
      return "fusion";
    case Variant::static_only:
      return "static_only";
    case Variant::context_only:
      return "context_only";
  }
  return "fusion";
}

Variant parse_variant(std::string_view name) {
  if (name == "fusion") return Variant::fusion;
  if (name == "static_only") return Variant::static_only;
  if (name == "context_only") return Variant::context_only;
  throw UsageError("unknown variant '" + std::string(name) +
                   "' (expected fusion, static_only or context_only)");
}

std::size_t FusionConfig::fused_width() const {
  switch (variant) {
    case Variant::fusion:
      return d1 + d2;
    case Variant::static_only:
      return d1;
    case Variant::context_only:
      return d2;
  }
  return d1 + d2;
}

void FusionConfig::validate() const {
  if (n_classes != 2 && n_classes != 3) throw UsageError("n_classes must be 2 or 3");
  if (uses_context() && d2 == 0) throw UsageError("d2 must be positive");
  if (!(head_dropout >= 0.0 && head_dropout < 1.0)) throw UsageError("head dropout must be in [0, 1)");
  if (!(recurrent_dropout >= 0.0 && recurrent_dropout < 1.0)) {
    throw UsageError("recurrent dropout must be in [0, 1)");
  }
  if (!uses_static()) return;
  if (d1 == 0 || d1 % 2 != 0) throw UsageError("d1 must be a positive even number (2 x hidden)");
  if (n_filters == 0 || kernel == 0 || pool == 0) throw UsageError("conv/pool sizes must be positive");
  if (embed_dim == 0) throw UsageError("embedding dimension must be positive");
  if (max_len < kernel) throw UsageError("max_len shorter than the convolution kernel");
  if ((max_len - kernel + 1) < pool) throw UsageError("pool size exceeds convolution output length");
}

std::vector<Example> assemble_examples(const Corpus& corpus, const std::vector<TokenSequence>& sequences,
                                       const ContextVectorStore* store, Variant variant, bool labeled) {
  if (sequences.size() != corpus.size()) throw UsageError("sequence count does not match corpus size");
  const bool needs_context = variant != Variant::static_only;
  if (needs_context && !store) throw DataError("variant needs context vectors but none were loaded");
  std::vector<Example> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Tweet& t = corpus.examples[i];
    Example ex;
    ex.id = t.id;
    ex.tokens = sequences[i];
    if (needs_context) ex.context = store->at(t.id);
    if (labeled) ex.label = label_index(t, corpus.task);
    out.push_back(std::move(ex));
  }
  return out;
}

FusionModel::FusionModel(FusionConfig cfg)
    : cfg_(cfg), dropout_(cfg.head_dropout), head_("head", cfg.fused_width(), cfg.n_classes) {
  cfg_.validate();
  if (cfg_.uses_static()) {
    if (cfg_.trainable_static) embedding_.emplace("embedding.matrix", std::vector<std::size_t>{0, cfg_.embed_dim});
    conv_.emplace(cfg_.embed_dim, cfg_.n_filters, cfg_.kernel, "conv");
    pool_.emplace(cfg_.pool);
    bilstm_.emplace(cfg_.n_filters, cfg_.d1 / 2, "bilstm");
  }
}

void FusionModel::init(Rng& rng, const StaticEmbeddingTable* table) {
  if (embedding_) {
    if (!table) throw UsageError("trainable static embeddings need the table for initialization");
    embedding_->value = table->matrix();
    embedding_->grad = nn::Tensor(table->matrix().shape());
  }
  if (conv_) conv_->init(rng);
  if (bilstm_) bilstm_->init(rng);
  head_.init(rng);
}

FusionActivations FusionModel::forward(const TokenSequence& seq, std::span<const double> context,
                                       const StaticEmbeddingTable& table, bool train, Rng* rng) {
  FusionActivations act;
  if (cfg_.uses_static()) {
    if (seq.ids.size() != cfg_.max_len) {
      throw UsageError("token sequence length " + std::to_string(seq.ids.size()) +
                       " does not match max_len " + std::to_string(cfg_.max_len));
    }
    if (table.dim() != cfg_.embed_dim) throw UsageError("embedding table width does not match the model");
    nn::Tensor x;
    if (embedding_) {
      x = nn::Tensor({seq.ids.size(), cfg_.embed_dim});
      const std::size_t rows = embedding_->value.dim(0);
      for (std::size_t t = 0; t < seq.ids.size(); ++t) {
        const auto id = seq.ids[t];
        if (id < 0 || static_cast<std::size_t>(id) >= rows) {
          throw DataError("token id " + std::to_string(id) + " out of range");
        }
        std::copy_n(embedding_->value.data() + id * cfg_.embed_dim, cfg_.embed_dim,
                    x.data() + t * cfg_.embed_dim);
      }
    } else {
      x = embed_sequence(seq, table);
    }
    const nn::Tensor conv_out = conv_->forward(x);
    const nn::Tensor pooled = pool_->forward(conv_out);
    act.D = bilstm_->forward(pooled, cfg_.recurrent_dropout, train, rng);
    nn::require_finite(act.D, "static branch output");
  }
  if (cfg_.uses_context()) {
    if (context.size() != cfg_.d2) {
      throw DataError("context vector has length " + std::to_string(context.size()) + ", expected " +
                      std::to_string(cfg_.d2));
    }
    act.C.assign(context.begin(), context.end());
  }
  act.F.reserve(act.D.size() + act.C.size());
  act.F.insert(act.F.end(), act.D.begin(), act.D.end());
  act.F.insert(act.F.end(), act.C.begin(), act.C.end());

  const auto dropped = dropout_.forward(act.F, train, rng);
  const auto logits = head_.forward(dropped);
  nn::require_finite(logits, "classifier logits");
  act.probs = nn::softmax(logits);
  last_tokens_ = seq;
  cached_ = true;
  return act;
}

std::vector<FusionActivations> FusionModel::predict(const std::vector<Example>& examples,
                                                    const StaticEmbeddingTable& table) {
  std::vector<FusionActivations> out;
  out.reserve(examples.size());
  for (const Example& ex : examples) out.push_back(forward(ex, table, false, nullptr));
  return out;
}

void FusionModel::backward(std::span<const double> grad_logits) {
  if (!cached_) throw UsageError("fusion model: backward called before forward");
  const auto d_dropped = head_.backward(grad_logits);
  const auto d_fused = dropout_.backward(d_dropped);
  // The C block of d_fused is discarded: context vectors are constants.
  if (!cfg_.uses_static()) return;
  const std::span<const double> d_static(d_fused.data(), cfg_.d1);
  const nn::Tensor d_pooled = bilstm_->backward(d_static);
  const nn::Tensor d_conv = pool_->backward(d_pooled);
  const nn::Tensor d_embedded = conv_->backward(d_conv);
  if (embedding_) {
    for (std::size_t t = 0; t < last_tokens_.ids.size(); ++t) {
      const auto id = last_tokens_.ids[t];
      if (id == kPadId) continue;  // the padding row stays zero
      double* g = embedding_->grad.data() + id * cfg_.embed_dim;
      for (std::size_t k = 0; k < cfg_.embed_dim; ++k) g[k] += d_embedded(t, k);
    }
  }
}

std::vector<nn::Parameter*> FusionModel::trainable_parameters() {
  std::vector<nn::Parameter*> out;
  if (embedding_) out.push_back(&*embedding_);
  if (conv_) {
    out.push_back(&conv_->kernel);
    out.push_back(&conv_->bias);
  }
  if (bilstm_) {
    for (nn::Lstm* dir : {&bilstm_->fwd, &bilstm_->bwd}) {
      out.push_back(&dir->w_input);
      out.push_back(&dir->w_recurrent);
      out.push_back(&dir->bias);
    }
  }
  out.push_back(&head_.weight);
  out.push_back(&head_.bias);
  return out;
}

std::vector<const nn::Parameter*> FusionModel::trainable_parameters() const {
  auto params = const_cast<FusionModel*>(this)->trainable_parameters();
  return {params.begin(), params.end()};
}

void FusionModel::zero_grad() {
  for (nn::Parameter* p : trainable_parameters()) p->zero_grad();
}

}  // namespace tweetfuse
