#include "tweetfuse/optimizer.hpp"

#include <cmath>

#include "tweetfuse/error.hpp"

namespace tweetfuse {

double global_grad_norm(std::span<nn::Parameter* const> params) {
  double sum = 0.0;
  for (const nn::Parameter* p : params) {
    for (double g : p->grad.values()) sum += g * g;
  }
  return std::sqrt(sum);
}

double clip_global_norm(std::span<nn::Parameter* const> params, double clipnorm) {
  const double norm = global_grad_norm(params);
  if (std::isfinite(clipnorm) && norm > clipnorm) {
    const double scale = clipnorm / norm;
    for (nn::Parameter* p : params) {
      for (double& g : p->grad.values()) g *= scale;
    }
  }
  return norm;
}

Adam::Adam(AdamConfig cfg) : cfg_(cfg) {
  if (!(cfg_.learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (!(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0) || !(cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0)) {
    throw UsageError("Adam betas must be in [0, 1)");
  }
  if (!(cfg_.epsilon > 0.0)) throw UsageError("Adam epsilon must be positive");
  if (!(cfg_.clipnorm > 0.0)) throw UsageError("clipnorm must be positive");
}

double Adam::step(std::span<nn::Parameter* const> params) {
  for (const nn::Parameter* p : params) {
    if (p->grad.shape() != p->value.shape()) {
      throw UsageError("gradient shape mismatch for " + p->name);
    }
    const auto g = p->grad.values();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw NumericError("non-finite gradient in " + p->name + " at index " + std::to_string(i) +
                           " (step " + std::to_string(steps_ + 1) + ")");
      }
    }
  }
  if (m_.empty()) {
    for (const nn::Parameter* p : params) {
      m_.emplace_back(p->value.shape());
      v_.emplace_back(p->value.shape());
    }
  } else if (m_.size() != params.size()) {
    throw UsageError("Adam: parameter set changed between steps");
  }

  const double norm = clip_global_norm(params, cfg_.clipnorm);
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(cfg_.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg_.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    nn::Parameter& p = *params[k];
    double* m = m_[k].data();
    double* v = v_[k].data();
    double* w = p.value.data();
    const double* g = p.grad.data();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
  }
  return norm;
}

}  // namespace tweetfuse
