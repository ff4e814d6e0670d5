#include "tweetfuse/layers.hpp"

#include <algorithm>
#include <cmath>

#include "tweetfuse/error.hpp"

namespace tweetfuse::nn {

namespace {

using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using RowVectorMap = Eigen::Map<RowVector>;
using ConstRowVectorMap = Eigen::Map<const RowVector>;

ConstRowVectorMap row_map(std::span<const double> v) {
  return ConstRowVectorMap(v.data(), static_cast<Eigen::Index>(v.size()));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require_cache(bool cached, const char* layer) {
  if (!cached) throw UsageError(std::string(layer) + ": backward called before forward");
}

void check_rate(double rate, const char* what) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw UsageError(std::string(what) + " rate must be in [0, 1)");
  }
}

}  // namespace

void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
}

std::vector<double> dropout_mask(std::size_t size, double rate, Rng& rng) {
  check_rate(rate, "dropout");
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(size);
  for (double& m : mask) m = rng.uniform01() < rate ? 0.0 : keep_scale;
  return mask;
}

// ---------------------------------------------------------------------------
// Conv1d

Conv1d::Conv1d(std::size_t in_channels, std::size_t filters, std::size_t width,
               const std::string& prefix)
    : kernel(prefix + ".kernel", {width, in_channels, filters}),
      bias(prefix + ".bias", {filters}),
      in_channels_(in_channels),
      filters_(filters),
      width_(width) {
  if (width == 0 || filters == 0 || in_channels == 0) throw UsageError("conv1d: zero-sized layer");
}

void Conv1d::init(Rng& rng) {
  glorot_uniform(kernel.value, width_ * in_channels_, width_ * filters_, rng);
  bias.value.fill(0.0);
}

Tensor Conv1d::forward(const Tensor& x) {
  if (x.rank() != 2 || x.dim(1) != in_channels_) {
    throw UsageError("conv1d: expected input T x " + std::to_string(in_channels_) + ", got " +
                     shape_string(x.shape()));
  }
  const std::size_t steps = x.dim(0);
  if (steps < width_) {
    throw UsageError("conv1d: sequence length " + std::to_string(steps) +
                     " shorter than kernel width " + std::to_string(width_));
  }
  const auto out_steps = static_cast<Eigen::Index>(steps - width_ + 1);
  Tensor out({steps - width_ + 1, filters_});
  auto y = out.matrix();
  y.rowwise() = row_map(bias.value.values());
  const auto xm = x.matrix();
  for (std::size_t j = 0; j < width_; ++j) {
    ConstMatrixMap tap(kernel.value.data() + j * in_channels_ * filters_,
                       static_cast<Eigen::Index>(in_channels_), static_cast<Eigen::Index>(filters_));
    y.noalias() += xm.middleRows(static_cast<Eigen::Index>(j), out_steps) * tap;
  }
  y = y.cwiseMax(0.0);
  input_ = x;
  output_ = out;
  cached_ = true;
  return out;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
  require_cache(cached_, "conv1d");
  if (grad_out.shape() != output_.shape()) throw UsageError("conv1d: gradient shape mismatch");
  const auto out_steps = static_cast<Eigen::Index>(output_.dim(0));
  RowMatrix dpre = grad_out.matrix().cwiseProduct(
      (output_.matrix().array() > 0.0).cast<double>().matrix());

  Tensor dx(input_.shape());
  auto dxm = dx.matrix();
  const auto xm = input_.matrix();
  for (std::size_t j = 0; j < width_; ++j) {
    const std::size_t offset = j * in_channels_ * filters_;
    ConstMatrixMap tap(kernel.value.data() + offset, static_cast<Eigen::Index>(in_channels_),
                       static_cast<Eigen::Index>(filters_));
    MatrixMap dtap(kernel.grad.data() + offset, static_cast<Eigen::Index>(in_channels_),
                   static_cast<Eigen::Index>(filters_));
    const auto rows = static_cast<Eigen::Index>(j);
    dtap.noalias() += xm.middleRows(rows, out_steps).transpose() * dpre;
    dxm.middleRows(rows, out_steps).noalias() += dpre * tap.transpose();
  }
  RowVectorMap(bias.grad.data(), static_cast<Eigen::Index>(filters_)) += dpre.colwise().sum();
  return dx;
}

// ---------------------------------------------------------------------------
// MaxPool1d

MaxPool1d::MaxPool1d(std::size_t pool) : pool_(pool) {
  if (pool_ == 0) throw UsageError("maxpool1d: pool size must be at least 1");
}

Tensor MaxPool1d::forward(const Tensor& x) {
  if (x.rank() != 2) throw UsageError("maxpool1d: expected a rank-2 input");
  if (pool_ > x.dim(0)) {
    throw UsageError("maxpool1d: pool size " + std::to_string(pool_) + " exceeds sequence length " +
                     std::to_string(x.dim(0)));
  }
  in_rows_ = x.dim(0);
  cols_ = x.dim(1);
  const std::size_t out_rows = in_rows_ / pool_;
  Tensor out({out_rows, cols_});
  argmax_.assign(out_rows * cols_, 0);
  for (std::size_t t = 0; t < out_rows; ++t) {
    for (std::size_t c = 0; c < cols_; ++c) {
      std::size_t best = t * pool_;
      for (std::size_t r = best + 1; r < (t + 1) * pool_; ++r) {
        if (x(r, c) > x(best, c)) best = r;
      }
      out(t, c) = x(best, c);
      argmax_[t * cols_ + c] = best;
    }
  }
  cached_ = true;
  return out;
}

Tensor MaxPool1d::backward(const Tensor& grad_out) const {
  require_cache(cached_, "maxpool1d");
  if (grad_out.size() != argmax_.size()) throw UsageError("maxpool1d: gradient shape mismatch");
  Tensor dx({in_rows_, cols_});
  for (std::size_t k = 0; k < argmax_.size(); ++k) {
    dx(argmax_[k], k % cols_) += grad_out[k];
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Lstm

Lstm::Lstm(const std::string& prefix, std::size_t input_size, std::size_t hidden)
    : w_input(prefix + ".w_input", {input_size, 4 * hidden}),
      w_recurrent(prefix + ".w_recurrent", {hidden, 4 * hidden}),
      bias(prefix + ".bias", {4 * hidden}),
      input_size_(input_size),
      hidden_(hidden) {
  if (hidden == 0 || input_size == 0) throw UsageError("lstm: zero-sized layer");
}

void Lstm::init(Rng& rng) {
  glorot_uniform(w_input.value, input_size_, 4 * hidden_, rng);
  glorot_uniform(w_recurrent.value, hidden_, 4 * hidden_, rng);
  bias.value.fill(0.0);
  for (std::size_t k = hidden_; k < 2 * hidden_; ++k) bias.value[k] = 1.0;
}

std::vector<double> Lstm::forward(const Tensor& x, bool reverse, std::span<const double> recurrent_mask) {
  if (x.rank() != 2 || x.dim(1) != input_size_ || x.dim(0) == 0) {
    throw UsageError("lstm: expected input T x " + std::to_string(input_size_) + ", got " +
                     shape_string(x.shape()));
  }
  if (!recurrent_mask.empty() && recurrent_mask.size() != hidden_) {
    throw UsageError("lstm: recurrent mask length mismatch");
  }
  const std::size_t steps = x.dim(0);
  const std::size_t h = hidden_;
  const auto hh = static_cast<Eigen::Index>(h);

  RowMatrix proj = x.matrix() * w_input.value.matrix();
  proj.rowwise() += row_map(bias.value.values());

  gates_ = Tensor({steps, 4 * h});
  cell_ = Tensor({steps, h});
  cell_tanh_ = Tensor({steps, h});
  prev_cell_ = Tensor({steps, h});
  prev_hidden_ = Tensor({steps, h});
  mask_.assign(recurrent_mask.begin(), recurrent_mask.end());
  reverse_ = reverse;
  input_ = x;

  std::vector<double> h_prev(h, 0.0), c_prev(h, 0.0);
  RowVector z(4 * h);
  const auto w_rec = w_recurrent.value.matrix();
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    double* hm = prev_hidden_.data() + s * h;
    for (std::size_t k = 0; k < h; ++k) hm[k] = mask_.empty() ? h_prev[k] : h_prev[k] * mask_[k];
    z.noalias() = proj.row(static_cast<Eigen::Index>(t));
    z.noalias() += ConstRowVectorMap(hm, hh) * w_rec;

    double* g = gates_.data() + s * 4 * h;
    double* c = cell_.data() + s * h;
    double* tc = cell_tanh_.data() + s * h;
    std::copy(c_prev.begin(), c_prev.end(), prev_cell_.data() + s * h);
    for (std::size_t k = 0; k < h; ++k) {
      const double in_gate = sigmoid(z[k]);
      const double forget_gate = sigmoid(z[h + k]);
      const double candidate = std::tanh(z[2 * h + k]);
      const double out_gate = sigmoid(z[3 * h + k]);
      g[k] = in_gate;
      g[h + k] = forget_gate;
      g[2 * h + k] = candidate;
      g[3 * h + k] = out_gate;
      c[k] = forget_gate * c_prev[k] + in_gate * candidate;
      tc[k] = std::tanh(c[k]);
      h_prev[k] = out_gate * tc[k];
      c_prev[k] = c[k];
    }
  }
  cached_ = true;
  return h_prev;
}

Tensor Lstm::backward(std::span<const double> grad_h_final) {
  require_cache(cached_, "lstm");
  const std::size_t h = hidden_;
  if (grad_h_final.size() != h) throw UsageError("lstm: gradient length mismatch");
  const std::size_t steps = gates_.dim(0);

  RowMatrix dz_time(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(4 * h));
  RowMatrix dz_step(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(4 * h));
  std::vector<double> dh(grad_h_final.begin(), grad_h_final.end());
  std::vector<double> dc(h, 0.0);
  RowVector dh_masked(h);
  const auto w_rec = w_recurrent.value.matrix();

  for (std::size_t s = steps; s-- > 0;) {
    const double* g = gates_.data() + s * 4 * h;
    const double* tc = cell_tanh_.data() + s * h;
    const double* cp = prev_cell_.data() + s * h;
    auto dz = dz_step.row(static_cast<Eigen::Index>(s));
    for (std::size_t k = 0; k < h; ++k) {
      const double in_gate = g[k], forget_gate = g[h + k], candidate = g[2 * h + k],
                   out_gate = g[3 * h + k];
      const double d_out = dh[k] * tc[k];
      dc[k] += dh[k] * out_gate * (1.0 - tc[k] * tc[k]);
      dz[k] = dc[k] * candidate * in_gate * (1.0 - in_gate);
      dz[h + k] = dc[k] * cp[k] * forget_gate * (1.0 - forget_gate);
      dz[2 * h + k] = dc[k] * in_gate * (1.0 - candidate * candidate);
      dz[3 * h + k] = d_out * out_gate * (1.0 - out_gate);
      dc[k] *= forget_gate;
    }
    dh_masked.noalias() = dz * w_rec.transpose();
    for (std::size_t k = 0; k < h; ++k) dh[k] = mask_.empty() ? dh_masked[k] : dh_masked[k] * mask_[k];
    const std::size_t t = reverse_ ? steps - 1 - s : s;
    dz_time.row(static_cast<Eigen::Index>(t)) = dz;
  }

  w_recurrent.grad.matrix().noalias() += prev_hidden_.matrix().transpose() * dz_step;
  RowVectorMap(bias.grad.data(), static_cast<Eigen::Index>(4 * h)) += dz_time.colwise().sum();
  w_input.grad.matrix().noalias() += input_.matrix().transpose() * dz_time;
  Tensor dx(input_.shape());
  dx.matrix().noalias() = dz_time * w_input.value.matrix().transpose();
  return dx;
}

// ---------------------------------------------------------------------------
// BiLstm

BiLstm::BiLstm(std::size_t input_size, std::size_t hidden_per_direction, const std::string& prefix)
    : fwd(prefix + ".fwd", input_size, hidden_per_direction),
      bwd(prefix + ".bwd", input_size, hidden_per_direction) {}

void BiLstm::init(Rng& rng) {
  fwd.init(rng);
  bwd.init(rng);
}

std::vector<double> BiLstm::forward(const Tensor& x, double recurrent_dropout, bool train, Rng* rng) {
  check_rate(recurrent_dropout, "recurrent dropout");
  if (train && recurrent_dropout > 0.0) {
    if (!rng) throw UsageError("bilstm: training-mode dropout needs a generator");
    const auto mf = dropout_mask(fwd.hidden(), recurrent_dropout, *rng);
    const auto mb = dropout_mask(bwd.hidden(), recurrent_dropout, *rng);
    return forward_with_masks(x, mf, mb);
  }
  return forward_with_masks(x, {}, {});
}

std::vector<double> BiLstm::forward_with_masks(const Tensor& x, std::span<const double> fwd_mask,
                                               std::span<const double> bwd_mask) {
  auto out = fwd.forward(x, false, fwd_mask);
  const auto back = bwd.forward(x, true, bwd_mask);
  out.insert(out.end(), back.begin(), back.end());
  return out;
}

Tensor BiLstm::backward(std::span<const double> grad_out) {
  const std::size_t h = fwd.hidden();
  if (grad_out.size() != 2 * h) throw UsageError("bilstm: gradient length mismatch");
  Tensor dx = fwd.backward(grad_out.first(h));
  const Tensor dx_back = bwd.backward(grad_out.subspan(h));
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dx_back[i];
  return dx;
}

// ---------------------------------------------------------------------------
// Dropout

std::vector<double> Dropout::forward(std::span<const double> x, bool train, Rng* rng) {
  check_rate(rate_, "dropout");
  active_ = train && rate_ > 0.0;
  cached_ = true;
  if (!active_) return {x.begin(), x.end()};
  if (!rng) throw UsageError("dropout: training mode needs a generator");
  mask_ = dropout_mask(x.size(), rate_, *rng);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * mask_[i];
  return out;
}

std::vector<double> Dropout::backward(std::span<const double> grad_out) const {
  require_cache(cached_, "dropout");
  if (!active_) return {grad_out.begin(), grad_out.end()};
  std::vector<double> dx(grad_out.size());
  for (std::size_t i = 0; i < grad_out.size(); ++i) dx[i] = grad_out[i] * mask_[i];
  return dx;
}

// ---------------------------------------------------------------------------
// Dense

Dense::Dense(const std::string& prefix, std::size_t in, std::size_t out)
    : weight(prefix + ".weight", {in, out}), bias(prefix + ".bias", {out}) {}

void Dense::init(Rng& rng) {
  glorot_uniform(weight.value, weight.value.dim(0), weight.value.dim(1), rng);
  bias.value.fill(0.0);
}

std::vector<double> Dense::forward(std::span<const double> x) {
  const std::size_t in = weight.value.dim(0), out = weight.value.dim(1);
  if (x.size() != in) {
    throw UsageError("dense: expected input of length " + std::to_string(in) + ", got " +
                     std::to_string(x.size()));
  }
  // Plain loop in index order: a zero weight block contributes exactly nothing.
  std::vector<double> z(bias.value.values().begin(), bias.value.values().end());
  for (std::size_t i = 0; i < in; ++i) {
    const double xi = x[i];
    const double* w = weight.value.data() + i * out;
    for (std::size_t j = 0; j < out; ++j) z[j] += xi * w[j];
  }
  input_.assign(x.begin(), x.end());
  cached_ = true;
  return z;
}

std::vector<double> Dense::backward(std::span<const double> grad_out) {
  require_cache(cached_, "dense");
  const std::size_t in = weight.value.dim(0), out = weight.value.dim(1);
  if (grad_out.size() != out) throw UsageError("dense: gradient length mismatch");
  std::vector<double> dx(in, 0.0);
  for (std::size_t i = 0; i < in; ++i) {
    const double* w = weight.value.data() + i * out;
    double* gw = weight.grad.data() + i * out;
    double acc = 0.0;
    for (std::size_t j = 0; j < out; ++j) {
      gw[j] += input_[i] * grad_out[j];
      acc += w[j] * grad_out[j];
    }
    dx[i] = acc;
  }
  for (std::size_t j = 0; j < out; ++j) bias.grad[j] += grad_out[j];
  return dx;
}

// ---------------------------------------------------------------------------

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

LossAndGrad cross_entropy(std::span<const double> probs, std::size_t label) {
  if (label >= probs.size()) {
    throw UsageError("cross_entropy: label " + std::to_string(label) + " out of range for " +
                     std::to_string(probs.size()) + " classes");
  }
  LossAndGrad out;
  out.loss = -std::log(std::max(probs[label], kProbabilityFloor));
  out.grad_logits.assign(probs.begin(), probs.end());
  out.grad_logits[label] -= 1.0;
  return out;
}

}  // namespace tweetfuse::nn
