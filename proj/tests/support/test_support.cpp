#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "tweetfuse/embed_store.hpp"
#include "tweetfuse/error.hpp"
#include "tweetfuse/fusion_model.hpp"
#include "tweetfuse/layers.hpp"

namespace tweetfuse::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return fs::path(TWEETFUSE_SOURCE_DIR); }
fs::path data_path(const std::string& relative) { return source_dir() / "data" / relative; }
fs::path fixture_path(const std::string& relative) { return source_dir() / "tests" / "data" / relative; }

TempDir::TempDir(const std::string& tag) {
  static std::uint64_t counter = 0;
  Rng rng(static_cast<std::uint64_t>(std::hash<std::string>{}(tag)) ^ ++counter);
  for (;;) {
    path_ = fs::temp_directory_path() / ("tweetfuse-" + tag + "-" + std::to_string(rng.next_u64() % 1000000007));
    if (fs::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

RunConfig demo_run_config(Task task, const std::string& output_dir) {
  RunConfig c;
  c.task = task;
  c.variants = {Variant::fusion};
  c.preprocess.stopwords_path = data_path("resources/stopwords.txt").string();
  c.preprocess.emoji_map_path = data_path("resources/emoji_map.tsv").string();
  c.train.learning_rate = kDemoLearningRate;
  c.train.runs = 1;
  c.paths.dataset = data_path("demo/demo.tsv").string();
  c.paths.validation = c.paths.dataset;
  c.paths.embeddings = data_path("demo/embeddings.vec").string();
  c.paths.context = data_path("demo/context.tsv").string();
  c.paths.output_dir = output_dir;
  return c;
}

// ---------------------------------------------------------------------------

void GradCheck::merge(const GradCheck& other) {
  entries += other.entries;
  if (other.max_rel_error > max_rel_error || worst.empty()) {
    max_rel_error = std::max(max_rel_error, other.max_rel_error);
    if (!other.worst.empty()) worst = other.worst;
  }
}

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

namespace {

using LossFn = std::function<double()>;

// Perturbs each entry of `values` in place and compares with `analytic`.
void compare_entries(GradCheck& out, const std::string& name, std::span<double> values,
                     std::vector<double> analytic, const LossFn& loss, std::size_t skip_prefix = 0) {
  const double h = kFiniteDifferenceStep;
  for (std::size_t i = skip_prefix; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = loss();
    values[i] = saved - h;
    const double down = loss();
    values[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double err = relative_error(analytic[i], numeric);
    ++out.entries;
    if (err > out.max_rel_error || out.worst.empty()) {
      out.max_rel_error = std::max(out.max_rel_error, err);
      out.worst = name + "[" + std::to_string(i) + "]";
    }
  }
}

std::vector<double> grad_copy(const nn::Parameter& p) { return p.grad.vector(); }

nn::Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  nn::Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-scale, scale);
  return t;
}

std::vector<double> random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GradCheck gradcheck_conv1d(std::uint64_t seed) {
  Rng rng(seed);
  nn::Conv1d conv(5, 4, 3);
  conv.init(rng);
  for (double& b : conv.bias.value.values()) b = rng.uniform(-0.2, 0.2);
  nn::Tensor x = random_tensor({7, 5}, rng);
  const nn::Tensor r = random_tensor({5, 4}, rng);

  auto loss = [&] { return dot(conv.forward(x).values(), r.values()); };
  conv.kernel.zero_grad();
  conv.bias.zero_grad();
  conv.forward(x);
  const nn::Tensor dx = conv.backward(r);

  GradCheck out;
  compare_entries(out, "conv.kernel", conv.kernel.value.values(), grad_copy(conv.kernel), loss);
  compare_entries(out, "conv.bias", conv.bias.value.values(), grad_copy(conv.bias), loss);
  compare_entries(out, "conv.x", x.values(), dx.vector(), loss);
  return out;
}

GradCheck gradcheck_maxpool(std::uint64_t seed) {
  Rng rng(seed);
  nn::MaxPool1d pool(2);
  nn::Tensor x = random_tensor({7, 4}, rng);
  const nn::Tensor r = random_tensor({3, 4}, rng);
  auto loss = [&] { return dot(pool.forward(x).values(), r.values()); };
  pool.forward(x);
  const nn::Tensor dx = pool.backward(r);
  GradCheck out;
  compare_entries(out, "maxpool.x", x.values(), dx.vector(), loss);
  return out;
}

GradCheck gradcheck_dense_softmax_ce(std::uint64_t seed) {
  Rng rng(seed);
  nn::Dense dense("head", 6, 3);
  dense.init(rng);
  for (double& b : dense.bias.value.values()) b = rng.uniform(-0.5, 0.5);
  std::vector<double> x = random_vector(6, rng);
  const std::size_t label = seed % 3;
  auto loss = [&] { return nn::cross_entropy(nn::softmax(dense.forward(x)), label).loss; };

  dense.weight.zero_grad();
  dense.bias.zero_grad();
  const auto ce = nn::cross_entropy(nn::softmax(dense.forward(x)), label);
  const auto dx = dense.backward(ce.grad_logits);

  GradCheck out;
  compare_entries(out, "head.weight", dense.weight.value.values(), grad_copy(dense.weight), loss);
  compare_entries(out, "head.bias", dense.bias.value.values(), grad_copy(dense.bias), loss);
  compare_entries(out, "head.x", x, dx, loss);
  return out;
}

GradCheck gradcheck_lstm(std::uint64_t seed) {
  GradCheck out;
  for (int mode = 0; mode < 3; ++mode) {
    Rng rng(seed * 3 + static_cast<std::uint64_t>(mode));
    nn::Lstm lstm("lstm", 5, 4);
    lstm.init(rng);
    for (double& b : lstm.bias.value.values()) b += rng.uniform(-0.3, 0.3);
    nn::Tensor x = random_tensor({7, 5}, rng);
    const auto r = random_vector(4, rng);
    const bool reverse = mode == 1;
    const std::vector<double> mask = mode == 2 ? nn::dropout_mask(4, 0.5, rng) : std::vector<double>{};
    auto loss = [&] { return dot(lstm.forward(x, reverse, mask), r); };

    for (nn::Parameter* p : {&lstm.w_input, &lstm.w_recurrent, &lstm.bias}) p->zero_grad();
    lstm.forward(x, reverse, mask);
    const nn::Tensor dx = lstm.backward(r);

    const std::string tag = mode == 0 ? "lstm" : mode == 1 ? "lstm.reverse" : "lstm.masked";
    compare_entries(out, tag + ".w_input", lstm.w_input.value.values(), grad_copy(lstm.w_input), loss);
    compare_entries(out, tag + ".w_recurrent", lstm.w_recurrent.value.values(), grad_copy(lstm.w_recurrent),
                    loss);
    compare_entries(out, tag + ".bias", lstm.bias.value.values(), grad_copy(lstm.bias), loss);
    compare_entries(out, tag + ".x", x.values(), dx.vector(), loss);
  }
  return out;
}

GradCheck gradcheck_bilstm(std::uint64_t seed) {
  Rng rng(seed);
  nn::BiLstm bilstm(5, 4);
  bilstm.init(rng);
  nn::Tensor x = random_tensor({7, 5}, rng);
  const auto r = random_vector(8, rng);
  const auto mf = nn::dropout_mask(4, 0.25, rng);
  const auto mb = nn::dropout_mask(4, 0.25, rng);
  auto loss = [&] { return dot(bilstm.forward_with_masks(x, mf, mb), r); };

  std::vector<nn::Parameter*> params;
  for (nn::Lstm* dir : {&bilstm.fwd, &bilstm.bwd}) {
    for (nn::Parameter* p : {&dir->w_input, &dir->w_recurrent, &dir->bias}) params.push_back(p);
  }
  for (nn::Parameter* p : params) p->zero_grad();
  bilstm.forward_with_masks(x, mf, mb);
  const nn::Tensor dx = bilstm.backward(r);

  GradCheck out;
  for (nn::Parameter* p : params) compare_entries(out, p->name, p->value.values(), grad_copy(*p), loss);
  compare_entries(out, "bilstm.x", x.values(), dx.vector(), loss);
  return out;
}

GradCheck gradcheck_fusion_model(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t dim = 5;
  std::vector<std::string> words{"a", "b", "c", "d"};
  std::vector<double> rows = random_vector(words.size() * dim, rng);
  const StaticEmbeddingTable table(words, dim, rows);

  FusionConfig cfg;
  cfg.d1 = 4;
  cfg.d2 = 3;
  cfg.n_filters = 3;
  cfg.kernel = 3;
  cfg.pool = 2;
  cfg.n_classes = 3;
  cfg.max_len = 8;
  cfg.embed_dim = dim;
  cfg.trainable_static = true;
  FusionModel model(cfg);
  model.init(rng, &table);

  TokenSequence seq;
  seq.ids = {2, 3, 1, 5, 4, 2, 0, 0};
  seq.true_len = 6;
  const auto context = random_vector(3, rng);
  const std::size_t label = seed % 3;
  auto loss = [&] {
    return nn::cross_entropy(model.forward(seq, context, table, false, nullptr).probs, label).loss;
  };

  model.zero_grad();
  const auto acts = model.forward(seq, context, table, false, nullptr);
  model.backward(nn::cross_entropy(acts.probs, label).grad_logits);

  GradCheck out;
  for (nn::Parameter* p : model.trainable_parameters()) {
    // The padding row is held at its initial value and gets no gradient.
    const std::size_t skip = p->name == "embedding.matrix" ? dim : 0;
    compare_entries(out, p->name, p->value.values(), grad_copy(*p), loss, skip);
  }
  return out;
}

// ---------------------------------------------------------------------------

OracleMetrics oracle_metrics(std::span<const std::size_t> predictions, std::span<const std::size_t> gold,
                             Task task) {
  const std::size_t k = num_classes(task);
  OracleMetrics m;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hits += predictions[i] == gold[i] ? 1 : 0;
  m.accuracy = gold.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(gold.size());
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = 0, pred_c = 0, gold_c = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (predictions[i] == c) ++pred_c;
      if (gold[i] == c) ++gold_c;
      if (predictions[i] == c && gold[i] == c) ++tp;
    }
    const double p = pred_c == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(pred_c);
    const double r = gold_c == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gold_c);
    const double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    m.class_precision.push_back(p);
    m.class_recall.push_back(r);
    m.class_f1.push_back(f);
  }
  for (std::size_t c = 0; c < k; ++c) {
    m.precision += m.class_precision[c];
    m.recall += m.class_recall[c];
    m.macro_f1 += m.class_f1[c];
  }
  m.precision /= static_cast<double>(k);
  m.recall /= static_cast<double>(k);
  m.macro_f1 /= static_cast<double>(k);
  m.task_score = task == Task::sarcasm ? m.class_f1[1] : (m.class_f1[2] + m.class_f1[0]) / 2.0;
  return m;
}

std::string compare_with_oracle(const MetricsReport& report, const OracleMetrics& oracle) {
  std::ostringstream diff;
  diff.precision(17);
  auto check = [&](const char* name, double got, double want) {
    if (got != want) diff << name << ": " << got << " vs " << want << "; ";
  };
  check("accuracy", report.accuracy, oracle.accuracy);
  check("precision", report.precision, oracle.precision);
  check("recall", report.recall, oracle.recall);
  check("macro_f1", report.macro_f1, oracle.macro_f1);
  check("task_score", report.task_score(), oracle.task_score);
  if (report.class_precision != oracle.class_precision) diff << "class_precision; ";
  if (report.class_recall != oracle.class_recall) diff << "class_recall; ";
  if (report.class_f1 != oracle.class_f1) diff << "class_f1; ";
  return diff.str();
}

// ---------------------------------------------------------------------------

std::string fuzz_text(Rng& rng, std::size_t max_pieces) {
  static const std::vector<std::string> pieces{
      "ا", "ب", "ت", "س", "م", "ن", "ه", "و", "ي", "ة", "ى", "أ", "إ", "آ", "ء", "ؤ", "ئ",
      "ً", "َ", "ُ", "ِ", "ّ", "ْ", "ٰ", "ـ",
      "؟", "،", "؛", "!", ".", ",", ":", "-", "_", "(", ")", "\"", "'", "«", "»", "…", "/",
      " ", "  ", "\t", "\n", "\r", "\x01", " ", "‏",
      "😂", "❤️", "❤", "️", "👍", "🌹", "😡", "🙄",
      "@", "#", "http://", "https://", "www.", "HTTP://", "t.co/x",
      "a", "Z", "x", "7", "٣", "$", "+", "=",
      "\xff", "\xc3", "\xe2\x82",
  };
  const std::size_t n = rng.uniform_index(max_pieces + 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += pieces[rng.uniform_index(pieces.size())];
  return out;
}

Corpus synthetic_corpus(Task task, const std::vector<std::size_t>& per_class) {
  Corpus c;
  c.task = task;
  std::size_t next = 0;
  // Interleave classes so input order is not grouped by label.
  std::vector<std::size_t> remaining = per_class;
  bool any = true;
  while (any) {
    any = false;
    for (std::size_t cls = 0; cls < remaining.size(); ++cls) {
      if (remaining[cls] == 0) continue;
      --remaining[cls];
      any = true;
      Tweet t;
      t.id = "s" + std::to_string(next++);
      t.text = "نص";
      if (task == Task::sarcasm) {
        t.sarcasm = cls == 1;
      } else {
        t.sentiment = static_cast<Sentiment>(cls);
      }
      c.examples.push_back(std::move(t));
    }
  }
  return c;
}

}  // namespace tweetfuse::testing
