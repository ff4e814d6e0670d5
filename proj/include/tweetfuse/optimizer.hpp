#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tweetfuse/tensor.hpp"

namespace tweetfuse {

struct AdamConfig {
  double learning_rate = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global-norm threshold; infinity disables clipping.
  double clipnorm = 1.0;
};

/// L2 norm over every gradient entry of every parameter.
double global_grad_norm(std::span<nn::Parameter* const> params);

/// Scales all gradients by clipnorm / norm when norm > clipnorm. Returns the
/// norm before clipping.
double clip_global_norm(std::span<nn::Parameter* const> params, double clipnorm);

/// Adam with bias correction (Kingma & Ba form):
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
///   p -= lr * m_hat / (sqrt(v_hat) + eps)
/// Gradients are clipped to the global norm before the moments update.
class Adam {
 public:
  explicit Adam(AdamConfig cfg);

  /// One update. Throws NumericError, leaving parameters and state untouched,
  /// if any gradient is non-finite. Returns the pre-clip gradient norm.
  double step(std::span<nn::Parameter* const> params);

  std::int64_t steps() const { return steps_; }
  const std::vector<nn::Tensor>& first_moments() const { return m_; }
  const std::vector<nn::Tensor>& second_moments() const { return v_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::int64_t steps_ = 0;
  std::vector<nn::Tensor> m_;
  std::vector<nn::Tensor> v_;
};

}  // namespace tweetfuse
