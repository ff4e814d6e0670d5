#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tweetfuse/rng.hpp"
#include "tweetfuse/tensor.hpp"

namespace tweetfuse::nn {

/// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Valid 1-D convolution over time followed by ReLU.
///
/// x is T x in_channels; the kernel is laid out [width, in_channels, filters]
/// so each tap is a contiguous in_channels x filters matrix. Output is
/// (T - width + 1) x filters.
class Conv1d {
 public:
  Conv1d(std::size_t in_channels, std::size_t filters, std::size_t width,
         const std::string& prefix = "conv");

  void init(Rng& rng);
  Tensor forward(const Tensor& x);
  /// Accumulates kernel/bias gradients and returns d loss / d x.
  Tensor backward(const Tensor& grad_out);

  std::size_t width() const { return width_; }
  std::size_t filters() const { return filters_; }

  Parameter kernel;
  Parameter bias;

 private:
  std::size_t in_channels_;
  std::size_t filters_;
  std::size_t width_;
  Tensor input_;
  Tensor output_;
  bool cached_ = false;
};

/// Non-overlapping max pooling over time: T x C -> floor(T / pool) x C.
/// Trailing rows that do not fill a window are dropped. Ties route the
/// gradient to the first maximal position.
class MaxPool1d {
 public:
  explicit MaxPool1d(std::size_t pool);

  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& grad_out) const;

  std::size_t pool() const { return pool_; }

 private:
  std::size_t pool_;
  std::size_t in_rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> argmax_;
  bool cached_ = false;
};

/// Single-direction LSTM returning the final hidden state.
///
/// Gate blocks in w_input ([in, 4h]), w_recurrent ([h, 4h]) and bias ([4h])
/// are ordered input, forget, candidate, output. A recurrent mask, when given,
/// multiplies h_{t-1} before it enters the recurrent product and is held fixed
/// for the whole sequence.
class Lstm {
 public:
  Lstm(const std::string& prefix, std::size_t input_size, std::size_t hidden);

  /// Glorot-uniform weights, forget-gate bias 1, other biases 0.
  void init(Rng& rng);

  /// Processes rows of x first-to-last, or last-to-first when `reverse`.
  std::vector<double> forward(const Tensor& x, bool reverse,
                              std::span<const double> recurrent_mask = {});
  /// Takes d loss / d h_final; accumulates parameter gradients; returns d loss / d x.
  Tensor backward(std::span<const double> grad_h_final);

  std::size_t hidden() const { return hidden_; }
  std::size_t input_size() const { return input_size_; }

  Parameter w_input;
  Parameter w_recurrent;
  Parameter bias;

 private:
  std::size_t input_size_;
  std::size_t hidden_;
  bool reverse_ = false;
  Tensor input_;
  std::vector<double> mask_;
  // Per processing step s (row order follows processing order).
  Tensor gates_;       // steps x 4h, post-activation
  Tensor cell_;        // steps x h
  Tensor cell_tanh_;   // steps x h
  Tensor prev_cell_;   // steps x h
  Tensor prev_hidden_; // steps x h, masked h_{t-1}
  bool cached_ = false;
};

/// Two LSTMs over opposite directions. Output is [h_fwd(T); h_bwd(1)].
class BiLstm {
 public:
  BiLstm(std::size_t input_size, std::size_t hidden_per_direction,
         const std::string& prefix = "bilstm");

  void init(Rng& rng);

  /// Draws one recurrent-dropout mask per direction when `train` and rate > 0.
  std::vector<double> forward(const Tensor& x, double recurrent_dropout, bool train, Rng* rng);
  std::vector<double> forward_with_masks(const Tensor& x, std::span<const double> fwd_mask,
                                         std::span<const double> bwd_mask);
  Tensor backward(std::span<const double> grad_out);

  std::size_t output_size() const { return 2 * fwd.hidden(); }

  Lstm fwd;
  Lstm bwd;
};

/// Inverted dropout; exactly the identity outside training.
class Dropout {
 public:
  explicit Dropout(double rate) : rate_(rate) {}

  std::vector<double> forward(std::span<const double> x, bool train, Rng* rng);
  std::vector<double> backward(std::span<const double> grad_out) const;

  double rate() const { return rate_; }

 private:
  double rate_;
  std::vector<double> mask_;
  bool active_ = false;
  bool cached_ = false;
};

/// Affine map x W + b with W shaped [in, out].
class Dense {
 public:
  Dense(const std::string& prefix, std::size_t in, std::size_t out);

  void init(Rng& rng);
  std::vector<double> forward(std::span<const double> x);
  std::vector<double> backward(std::span<const double> grad_out);

  Parameter weight;
  Parameter bias;

 private:
  std::vector<double> input_;
  bool cached_ = false;
};

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> logits);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad_logits;
};

inline constexpr double kProbabilityFloor = 1e-12;

/// -log(max(probs[label], 1e-12)) and its gradient w.r.t. the logits that
/// produced `probs` through softmax: probs - onehot(label).
LossAndGrad cross_entropy(std::span<const double> probs, std::size_t label);

/// One recurrent-dropout mask of `size` entries: 0 or 1 / (1 - rate).
std::vector<double> dropout_mask(std::size_t size, double rate, Rng& rng);

}  // namespace tweetfuse::nn
