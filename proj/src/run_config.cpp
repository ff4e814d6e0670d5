#include "tweetfuse/run_config.hpp"

#include <filesystem>
#include <fstream>

#include "tweetfuse/error.hpp"

namespace tweetfuse {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) return;
  if (!std::filesystem::is_regular_file(path)) {
    throw DataError(std::string(what) + " file not found: " + path);
  }
}

}  // namespace

PreprocessConfig PreprocessSettings::load() const {
  PreprocessConfig cfg;
  cfg.max_len = max_len;
  cfg.strip_hashmark_keep_word = strip_hashmark_keep_word;
  cfg.remove_diacritics = remove_diacritics;
  if (!stopwords_path.empty()) cfg.stopwords = load_stopwords(stopwords_path);
  if (!emoji_map_path.empty()) cfg.emoji_map = load_emoji_map(emoji_map_path);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  // Model widths that depend on the data (embed_dim, d2, n_classes) are
  // filled in at train time and validated when the model is built.
  train.validate();
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw UsageError("validation fraction must be strictly between 0 and 1");
  }
  if (variants.empty()) throw UsageError("at least one variant is required");
  if (paths.dataset.empty()) throw UsageError("a dataset path is required");
  if (paths.output_dir.empty()) throw UsageError("an output directory is required");
  require_file(paths.dataset, "dataset");
  require_file(paths.validation, "validation");
  require_file(preprocess.stopwords_path, "stopword");
  require_file(preprocess.emoji_map_path, "emoji map");
  bool needs_static = false, needs_context = false;
  for (Variant v : variants) {
    needs_static |= v != Variant::context_only;
    needs_context |= v != Variant::static_only;
  }
  // The vocabulary comes from the embedding file, so every variant needs it.
  if (paths.embeddings.empty()) throw UsageError("an embedding file is required");
  require_file(paths.embeddings, "embedding");
  if (needs_context && paths.context.empty()) {
    throw DataError("variant needs context vectors but no context-vector file was given");
  }
  require_file(paths.context, "context-vector");
  (void)needs_static;
}

json to_json(const PreprocessConfig& cfg) {
  return json{{"max_len", cfg.max_len},
              {"strip_hashmark_keep_word", cfg.strip_hashmark_keep_word},
              {"remove_diacritics", cfg.remove_diacritics},
              {"stopwords", cfg.stopwords},
              {"emoji_map", cfg.emoji_map}};
}

PreprocessConfig preprocess_config_from_json(const json& j) {
  PreprocessConfig cfg;
  read_opt(j, "max_len", cfg.max_len);
  read_opt(j, "strip_hashmark_keep_word", cfg.strip_hashmark_keep_word);
  read_opt(j, "remove_diacritics", cfg.remove_diacritics);
  read_opt(j, "stopwords", cfg.stopwords);
  read_opt(j, "emoji_map", cfg.emoji_map);
  cfg.validate();
  return cfg;
}

json to_json(const FusionConfig& cfg) {
  return json{{"d1", cfg.d1},
              {"d2", cfg.d2},
              {"n_filters", cfg.n_filters},
              {"kernel", cfg.kernel},
              {"pool", cfg.pool},
              {"head_dropout", cfg.head_dropout},
              {"recurrent_dropout", cfg.recurrent_dropout},
              {"n_classes", cfg.n_classes},
              {"variant", variant_name(cfg.variant)},
              {"max_len", cfg.max_len},
              {"embed_dim", cfg.embed_dim},
              {"trainable_static", cfg.trainable_static}};
}

FusionConfig fusion_config_from_json(const json& j) {
  FusionConfig cfg;
  read_opt(j, "d1", cfg.d1);
  read_opt(j, "d2", cfg.d2);
  read_opt(j, "n_filters", cfg.n_filters);
  read_opt(j, "kernel", cfg.kernel);
  read_opt(j, "pool", cfg.pool);
  read_opt(j, "head_dropout", cfg.head_dropout);
  read_opt(j, "recurrent_dropout", cfg.recurrent_dropout);
  read_opt(j, "n_classes", cfg.n_classes);
  if (j.contains("variant")) cfg.variant = parse_variant(j.at("variant").get<std::string>());
  read_opt(j, "max_len", cfg.max_len);
  read_opt(j, "embed_dim", cfg.embed_dim);
  read_opt(j, "trainable_static", cfg.trainable_static);
  return cfg;
}

json to_json(const TrainConfig& cfg) {
  return json{{"learning_rate", cfg.learning_rate},
              {"adam_beta1", cfg.adam_beta1},
              {"adam_beta2", cfg.adam_beta2},
              {"adam_epsilon", cfg.adam_epsilon},
              {"clipnorm", cfg.clipnorm},
              {"batch_size", cfg.batch_size},
              {"max_epochs", cfg.max_epochs},
              {"early_stop_patience", cfg.early_stop_patience},
              {"early_stop_metric", cfg.early_stop_metric},
              {"seed", cfg.seed},
              {"runs", cfg.runs}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig cfg;
  read_opt(j, "learning_rate", cfg.learning_rate);
  read_opt(j, "adam_beta1", cfg.adam_beta1);
  read_opt(j, "adam_beta2", cfg.adam_beta2);
  read_opt(j, "adam_epsilon", cfg.adam_epsilon);
  read_opt(j, "clipnorm", cfg.clipnorm);
  read_opt(j, "batch_size", cfg.batch_size);
  read_opt(j, "max_epochs", cfg.max_epochs);
  read_opt(j, "early_stop_patience", cfg.early_stop_patience);
  read_opt(j, "early_stop_metric", cfg.early_stop_metric);
  read_opt(j, "seed", cfg.seed);
  read_opt(j, "runs", cfg.runs);
  return cfg;
}

json to_json(const MetricsReport& r) {
  json j{{"task", task_name(r.task)},
         {"examples", r.examples},
         {"runs", r.runs},
         {"accuracy", r.accuracy},
         {"precision", r.precision},
         {"recall", r.recall},
         {"macro_f1", r.macro_f1},
         {"classes", class_names(r.task)},
         {"class_precision", r.class_precision},
         {"class_recall", r.class_recall},
         {"class_f1", r.class_f1},
         {"confusion", r.confusion}};
  if (r.f1_sarcastic) j["f1_sarcastic"] = *r.f1_sarcastic;
  if (r.f_pn) j["f_pn"] = *r.f_pn;
  return j;
}

MetricsReport metrics_report_from_json(const json& j) {
  MetricsReport r;
  r.task = parse_task(j.at("task").get<std::string>());
  r.examples = j.at("examples").get<std::size_t>();
  r.runs = j.at("runs").get<std::size_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  r.class_precision = j.at("class_precision").get<std::vector<double>>();
  r.class_recall = j.at("class_recall").get<std::vector<double>>();
  r.class_f1 = j.at("class_f1").get<std::vector<double>>();
  r.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
  if (j.contains("f1_sarcastic")) r.f1_sarcastic = j.at("f1_sarcastic").get<double>();
  if (j.contains("f_pn")) r.f_pn = j.at("f_pn").get<double>();
  return r;
}

json to_json(const RunConfig& cfg) {
  json variants = json::array();
  for (Variant v : cfg.variants) variants.push_back(variant_name(v));
  return json{{"task", task_name(cfg.task)},
              {"variants", variants},
              {"validation_fraction", cfg.validation_fraction},
              {"split_seed", cfg.split_seed},
              {"preprocess",
               {{"max_len", cfg.preprocess.max_len},
                {"strip_hashmark_keep_word", cfg.preprocess.strip_hashmark_keep_word},
                {"remove_diacritics", cfg.preprocess.remove_diacritics},
                {"stopwords_path", cfg.preprocess.stopwords_path},
                {"emoji_map_path", cfg.preprocess.emoji_map_path}}},
              {"model", to_json(cfg.model)},
              {"train", to_json(cfg.train)},
              {"paths",
               {{"dataset", cfg.paths.dataset},
                {"validation", cfg.paths.validation},
                {"embeddings", cfg.paths.embeddings},
                {"context", cfg.paths.context},
                {"output_dir", cfg.paths.output_dir}}}};
}

RunConfig run_config_from_json(const json& j, RunConfig base) {
  RunConfig cfg = std::move(base);
  if (j.contains("task")) cfg.task = parse_task(j.at("task").get<std::string>());
  if (j.contains("variants")) {
    cfg.variants.clear();
    for (const auto& v : j.at("variants")) cfg.variants.push_back(parse_variant(v.get<std::string>()));
  }
  read_opt(j, "validation_fraction", cfg.validation_fraction);
  read_opt(j, "split_seed", cfg.split_seed);
  if (j.contains("preprocess")) {
    const auto& p = j.at("preprocess");
    read_opt(p, "max_len", cfg.preprocess.max_len);
    read_opt(p, "strip_hashmark_keep_word", cfg.preprocess.strip_hashmark_keep_word);
    read_opt(p, "remove_diacritics", cfg.preprocess.remove_diacritics);
    read_opt(p, "stopwords_path", cfg.preprocess.stopwords_path);
    read_opt(p, "emoji_map_path", cfg.preprocess.emoji_map_path);
  }
  if (j.contains("model")) {
    json merged = to_json(cfg.model);
    merged.update(j.at("model"));
    cfg.model = fusion_config_from_json(merged);
  }
  if (j.contains("train")) {
    json merged = to_json(cfg.train);
    merged.update(j.at("train"));
    cfg.train = train_config_from_json(merged);
  }
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    read_opt(p, "dataset", cfg.paths.dataset);
    read_opt(p, "validation", cfg.paths.validation);
    read_opt(p, "embeddings", cfg.paths.embeddings);
    read_opt(p, "context", cfg.paths.context);
    read_opt(p, "output_dir", cfg.paths.output_dir);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  try {
    return run_config_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw UsageError("invalid config file " + path + ": " + e.what());
  }
}

}  // namespace tweetfuse
