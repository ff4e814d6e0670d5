#include "tweetfuse/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "tweetfuse/checkpoint.hpp"
#include "tweetfuse/error.hpp"
#include "tweetfuse/hashing.hpp"
#include "tweetfuse/trainer.hpp"

namespace tweetfuse {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json_file(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", p);
  return buf;
}

json epoch_to_json(const EpochRecord& rec) {
  return json{{"epoch", rec.epoch},
              {"train_loss", rec.train_loss},
              {"train_accuracy", rec.train_accuracy},
              {"val_loss", rec.val_loss},
              {"max_grad_norm", rec.max_grad_norm},
              {"val_metrics", to_json(rec.val_metrics)}};
}

/// Model config with the data-dependent widths filled in.
FusionConfig resolve_model_config(const RunConfig& cfg, Variant variant, const StaticEmbeddingTable& table,
                                  const ContextVectorStore* store) {
  FusionConfig m = cfg.model;
  m.variant = variant;
  m.n_classes = num_classes(cfg.task);
  m.max_len = cfg.preprocess.max_len;
  m.embed_dim = table.dim();
  if (m.uses_context()) {
    if (!store) throw DataError("variant " + std::string(variant_name(variant)) + " needs context vectors");
    m.d2 = store->d2();
  }
  m.validate();
  return m;
}

void write_predictions(const fs::path& path, const std::vector<Example>& examples, const EvalOutput& eval,
                       Task task) {
  std::ostringstream os;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    os << examples[i].id << '\t' << class_names(task)[eval.predictions[i]] << '\n';
  }
  write_text_file(path, os.str());
}

// Removes the staging directory unless released.
class StagingDir {
 public:
  explicit StagingDir(fs::path path) : path_(std::move(path)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~StagingDir() {
    if (!released_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  StagingDir(const StagingDir&) = delete;
  StagingDir& operator=(const StagingDir&) = delete;

  const fs::path& path() const { return path_; }
  void commit(const fs::path& target) {
    fs::rename(path_, target);
    released_ = true;
  }

 private:
  fs::path path_;
  bool released_ = false;
};

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string config;
  std::string dataset;
  std::string embeddings;
  std::string output;
  std::string summary;
  PreprocessSettings settings;
  bool drop_hashtags = false;
  bool keep_diacritics = false;
  bool emit_text = false;
};

int cmd_preprocess(const PreprocessArgs& args, std::ostream& out) {
  PreprocessSettings settings = args.settings;
  if (args.drop_hashtags) settings.strip_hashmark_keep_word = false;
  if (args.keep_diacritics) settings.remove_diacritics = false;
  const PreprocessConfig cfg = settings.load();
  const Corpus corpus = load_corpus(args.dataset, Task::sarcasm, /*require_labels=*/false);

  std::ofstream cache(args.output, std::ios::binary | std::ios::trunc);
  if (!cache) throw DataError("cannot write " + args.output);

  if (args.emit_text) {
    for (const Tweet& t : corpus.examples) {
      const auto tokens = prepare_tokens(t.text, cfg);
      cache << t.id << '\t';
      for (std::size_t i = 0; i < tokens.size(); ++i) cache << (i ? " " : "") << tokens[i];
      cache << '\n';
    }
    out << "wrote cleaned text for " << corpus.size() << " examples to " << args.output << '\n';
    return kExitOk;
  }

  if (args.embeddings.empty()) throw UsageError("--embeddings is required unless --emit-text is given");
  const StaticEmbeddingTable table = load_static_embeddings(args.embeddings);
  PreprocessSummary summary;
  const auto seqs = encode_corpus(corpus, table.vocab(), cfg, &summary);
  write_token_cache(cache, seqs);
  cache.close();

  const std::string summary_path = args.summary.empty() ? args.output + ".summary.json" : args.summary;
  write_json_file(summary_path, summary.to_json());
  out << "examples\t" << summary.examples << '\n'
      << "tokens\t" << summary.tokens << '\n'
      << "truncated\t" << summary.truncated << '\n'
      << "oov_rate\t" << std::setprecision(6) << summary.oov_rate() << '\n';
  out << "token_count\texamples\n";
  for (const auto& [len, n] : summary.length_histogram) out << len << '\t' << n << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate / predict

struct ModelBundle {
  Checkpoint ckpt;
  FusionModel model;
  StaticEmbeddingTable table;
  std::optional<ContextVectorStore> store;
};

ModelBundle load_bundle(const std::string& checkpoint, const std::string& embeddings,
                        const std::string& context) {
  Checkpoint ckpt = load_checkpoint(checkpoint);
  FusionModel model = restore_model(ckpt);
  StaticEmbeddingTable table;
  if (ckpt.model.uses_static()) {
    if (embeddings.empty()) throw UsageError("--embeddings is required for this checkpoint");
    table = load_static_embeddings(embeddings);
    if (table.vocab_hash() != ckpt.vocab_hash) {
      throw DataError("embedding vocabulary does not match the checkpoint (vocab hash mismatch)");
    }
  } else if (!embeddings.empty()) {
    table = load_static_embeddings(embeddings);
  }
  std::optional<ContextVectorStore> store;
  if (ckpt.model.uses_context()) {
    if (context.empty()) throw UsageError("--context is required for this checkpoint");
    store = load_context_vectors(context);
    if (store->d2() != ckpt.model.d2) {
      throw DataError("context vectors have width " + std::to_string(store->d2()) + ", checkpoint expects " +
                      std::to_string(ckpt.model.d2));
    }
  }
  return {std::move(ckpt), std::move(model), std::move(table), std::move(store)};
}

struct EvaluateArgs {
  std::string checkpoint, dataset, embeddings, context, task, report, predictions;
};

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
  ModelBundle b = load_bundle(args.checkpoint, args.embeddings, args.context);
  if (!args.task.empty() && parse_task(args.task) != b.ckpt.task) {
    throw DataError("checkpoint was trained for the " + std::string(task_name(b.ckpt.task)) +
                    " task, not " + args.task);
  }
  const Corpus corpus = load_corpus(args.dataset, b.ckpt.task);
  const auto seqs = encode_corpus(corpus, b.table.vocab(), b.ckpt.preprocess);
  const auto examples = assemble_examples(corpus, seqs, b.store ? &*b.store : nullptr, b.ckpt.model.variant);
  const EvalOutput eval = evaluate_model(b.model, examples, b.table, b.ckpt.task);
  out << format_report_table(eval.report);
  if (!args.report.empty()) write_json_file(args.report, to_json(eval.report));
  if (!args.predictions.empty()) write_predictions(args.predictions, examples, eval, b.ckpt.task);
  return kExitOk;
}

struct PredictArgs {
  std::string checkpoint, embeddings, context, text, input, id = "text", output;
  bool has_text = false;
};

int cmd_predict(const PredictArgs& args, std::ostream& out) {
  if (args.has_text == !args.input.empty()) throw UsageError("give exactly one of --text or --input");
  ModelBundle b = load_bundle(args.checkpoint, args.embeddings, args.context);
  Corpus corpus;
  corpus.task = b.ckpt.task;
  if (args.has_text) {
    corpus.examples.push_back(Tweet{args.id, args.text, std::nullopt, std::nullopt, {}});
  } else {
    corpus = load_corpus(args.input, b.ckpt.task, /*require_labels=*/false);
  }
  const auto seqs = encode_corpus(corpus, b.table.vocab(), b.ckpt.preprocess);
  const auto examples =
      assemble_examples(corpus, seqs, b.store ? &*b.store : nullptr, b.ckpt.model.variant, /*labeled=*/false);
  const auto acts = b.model.predict(examples, b.table);

  std::ostringstream os;
  const auto& names = class_names(b.ckpt.task);
  os << "id\tlabel";
  for (const auto& n : names) os << "\tp_" << n;
  os << '\n';
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& p = acts[i].probs;
    const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    os << examples[i].id << '\t' << names[best];
    for (double v : p) os << '\t' << format_probability(v);
    os << '\n';
  }
  if (args.output.empty()) {
    out << os.str();
  } else {
    write_text_file(args.output, os.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extract-config

int cmd_extract_config(const std::string& checkpoint, const RunConfig& base, const std::string& output,
                       std::ostream& out) {
  json j;
  if (checkpoint.empty()) {
    j = to_json(base);
  } else {
    const Checkpoint ckpt = load_checkpoint(checkpoint);
    j = json{{"format_version", ckpt.format_version},
             {"task", task_name(ckpt.task)},
             {"model", to_json(ckpt.model)},
             {"preprocess", to_json(ckpt.preprocess)},
             {"vocab_hash", ckpt.vocab_hash},
             {"seed", ckpt.seed},
             {"metadata", ckpt.metadata}};
  }
  const std::string text = j.dump(2) + "\n";
  if (output.empty()) {
    out << text;
  } else {
    write_text_file(output, text);
  }
  return kExitOk;
}

std::string find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].starts_with("--config=")) return args[i].substr(9);
  }
  return {};
}

void add_preprocess_options(CLI::App* cmd, PreprocessSettings& s) {
  cmd->add_option("--max-len", s.max_len, "Tokens per sequence (pad/truncate)")->capture_default_str();
  cmd->add_option("--stopwords", s.stopwords_path, "Stopword file, one token per line");
  cmd->add_option("--emoji-map", s.emoji_map_path, "Emoji map file, emoji<TAB>phrase");
}

}  // namespace

// ---------------------------------------------------------------------------

json PreprocessSummary::to_json() const {
  json hist = json::object();
  for (const auto& [len, n] : length_histogram) hist[std::to_string(len)] = n;
  return json{{"examples", examples},   {"tokens", tokens},     {"encoded_tokens", encoded},
              {"oov_tokens", oov},      {"oov_rate", oov_rate()}, {"truncated", truncated},
              {"length_histogram", hist}};
}

std::vector<TokenSequence> encode_corpus(const Corpus& corpus, const Vocabulary& vocab,
                                         const PreprocessConfig& cfg, PreprocessSummary* summary) {
  std::vector<TokenSequence> out;
  out.reserve(corpus.size());
  for (const Tweet& t : corpus.examples) {
    const auto tokens = prepare_tokens(t.text, cfg);
    TokenSequence seq = encode_tokens(tokens, vocab, cfg, t.id);
    if (summary) {
      ++summary->examples;
      summary->tokens += tokens.size();
      summary->encoded += seq.true_len;
      if (tokens.size() > cfg.max_len) ++summary->truncated;
      ++summary->length_histogram[tokens.size()];
      for (std::size_t i = 0; i < seq.true_len; ++i) summary->oov += seq.ids[i] == kOovId ? 1 : 0;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

void write_token_cache(std::ostream& out, const std::vector<TokenSequence>& sequences) {
  for (const auto& seq : sequences) {
    out << seq.source_id << '\t';
    for (std::size_t i = 0; i < seq.ids.size(); ++i) out << (i ? " " : "") << seq.ids[i];
    out << '\n';
  }
}

std::vector<TokenSequence> read_token_cache(std::istream& in) {
  std::vector<TokenSequence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("token cache line " + std::to_string(lineno) + ": missing tab");
    TokenSequence seq;
    seq.source_id = line.substr(0, tab);
    std::istringstream ids(line.substr(tab + 1));
    std::int32_t id;
    while (ids >> id) seq.ids.push_back(id);
    seq.true_len = static_cast<std::size_t>(std::find(seq.ids.begin(), seq.ids.end(), kPadId) - seq.ids.begin());
    out.push_back(std::move(seq));
  }
  return out;
}

std::map<std::string, MetricsReport> run_training(const RunConfig& cfg, std::ostream& log, bool force) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();

  const PreprocessConfig pre = cfg.preprocess.load();
  const StaticEmbeddingTable table = load_static_embeddings(cfg.paths.embeddings);
  std::optional<ContextVectorStore> store;
  if (!cfg.paths.context.empty()) store = load_context_vectors(cfg.paths.context);

  const Corpus full = load_corpus(cfg.paths.dataset, cfg.task);
  Corpus train_corpus, val_corpus;
  if (cfg.paths.validation.empty()) {
    std::tie(train_corpus, val_corpus) = stratified_split(full, SplitSpec{cfg.validation_fraction, cfg.split_seed});
  } else {
    train_corpus = full;
    val_corpus = load_corpus(cfg.paths.validation, cfg.task);
  }
  const auto train_seqs = encode_corpus(train_corpus, table.vocab(), pre);
  const auto val_seqs = encode_corpus(val_corpus, table.vocab(), pre);

  // Resolve every variant and pair context vectors before any output exists.
  std::vector<FusionConfig> model_cfgs;
  std::vector<std::vector<Example>> train_sets, val_sets;
  for (Variant v : cfg.variants) {
    model_cfgs.push_back(resolve_model_config(cfg, v, table, store ? &*store : nullptr));
    train_sets.push_back(assemble_examples(train_corpus, train_seqs, store ? &*store : nullptr, v));
    val_sets.push_back(assemble_examples(val_corpus, val_seqs, store ? &*store : nullptr, v));
  }

  const fs::path out_dir(cfg.paths.output_dir);
  if (fs::exists(out_dir)) {
    if (!force) throw UsageError("output directory " + out_dir.string() + " exists (use --force to replace)");
    fs::remove_all(out_dir);
  }
  if (out_dir.has_parent_path()) fs::create_directories(out_dir.parent_path());
  StagingDir staging(fs::path(out_dir.string() + ".partial"));
  const fs::path root = staging.path();

  write_json_file(root / "config.json", to_json(cfg));
  {
    std::ostringstream tr, va;
    for (const auto& t : train_corpus.examples) tr << t.id << '\n';
    for (const auto& t : val_corpus.examples) va << t.id << '\n';
    write_text_file(root / "train_ids.txt", tr.str());
    write_text_file(root / "val_ids.txt", va.str());
  }

  const std::string static_before = table.checksum();
  const std::string context_before = store ? store->checksum() : "";

  std::map<std::string, MetricsReport> averaged;
  json variant_meta = json::object();
  std::ostringstream summary;
  {
    const auto cols = report_columns(cfg.task);
    summary << "variant";
    for (const auto& c : cols) summary << '\t' << c;
    summary << '\n';
  }

  for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
    const std::string vname(variant_name(cfg.variants[vi]));
    const fs::path vdir = root / vname;
    fs::create_directories(vdir);
    std::vector<MetricsReport> reports;
    json runs_meta = json::array();
    for (std::size_t r = 0; r < cfg.train.runs; ++r) {
      const std::uint64_t seed = cfg.train.seed + r;
      const fs::path rdir = vdir / ("run" + std::to_string(r));
      fs::create_directories(rdir);

      FusionModel model(model_cfgs[vi]);
      Rng init_rng(seed);
      model.init(init_rng, &table);
      TrainConfig tc = cfg.train;
      tc.seed = seed;

      std::ofstream history(rdir / "history.jsonl", std::ios::binary | std::ios::trunc);
      const TrainResult result =
          train(model, train_sets[vi], val_sets[vi], table, tc, cfg.task, [&](const EpochRecord& rec) {
            history << epoch_to_json(rec).dump() << '\n';
            log << vname << " run " << r << " epoch " << rec.epoch << "  train_loss " << std::setprecision(5)
                << rec.train_loss << "  val_loss " << rec.val_loss << "  train_acc " << rec.train_accuracy
                << "  val_score " << rec.val_metrics.task_score() << '\n';
          });
      history.close();

      Checkpoint ckpt = make_checkpoint(model, cfg.task, pre, table.vocab_hash(), seed);
      ckpt.metadata = json{{"variant", vname},
                           {"run", r},
                           {"best_epoch", result.best_epoch},
                           {"best_val_loss", result.best_val_loss},
                           {"epochs_run", result.history.size()}};
      save_checkpoint((rdir / "checkpoint.bin").string(), ckpt);

      const EvalOutput eval = evaluate_model(model, val_sets[vi], table, cfg.task);
      write_json_file(rdir / "report.json", to_json(eval.report));
      write_predictions(rdir / "predictions.tsv", val_sets[vi], eval, cfg.task);
      reports.push_back(eval.report);
      runs_meta.push_back(json{{"run", r},
                               {"seed", seed},
                               {"best_epoch", result.best_epoch},
                               {"best_val_loss", result.best_val_loss},
                               {"stopped_early", result.stopped_early}});
    }
    const MetricsReport avg = averaged_report(reports);
    write_json_file(vdir / "report.json", to_json(avg));
    averaged[vname] = avg;
    variant_meta[vname] = runs_meta;

    summary << vname;
    for (double v : report_row(avg)) summary << '\t' << std::fixed << std::setprecision(4) << v;
    summary << '\n';
    log << "[" << vname << ", mean of " << avg.runs << " run(s)]\n" << format_report_table(avg);
  }

  const std::string static_after = table.checksum();
  const std::string context_after = store ? store->checksum() : "";
  if (static_after != static_before || context_after != context_before) {
    throw NumericError("frozen embedding or context store changed during training");
  }

  const auto elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json inputs{{"dataset", sha256_file(cfg.paths.dataset)}, {"embeddings", sha256_file(cfg.paths.embeddings)}};
  if (!cfg.paths.validation.empty()) inputs["validation"] = sha256_file(cfg.paths.validation);
  if (!cfg.paths.context.empty()) inputs["context"] = sha256_file(cfg.paths.context);
  if (!cfg.preprocess.stopwords_path.empty()) inputs["stopwords"] = sha256_file(cfg.preprocess.stopwords_path);
  if (!cfg.preprocess.emoji_map_path.empty()) inputs["emoji_map"] = sha256_file(cfg.preprocess.emoji_map_path);
  write_json_file(root / "run_meta.json",
                  json{{"tool_version", kVersion},
                       {"split_seed", cfg.split_seed},
                       {"train_seed", cfg.train.seed},
                       {"train_examples", train_corpus.size()},
                       {"validation_examples", val_corpus.size()},
                       {"input_sha256", inputs},
                       {"vocab_hash", table.vocab_hash()},
                       {"static_embedding_checksum", {{"before", static_before}, {"after", static_after}}},
                       {"context_store_checksum", {{"before", context_before}, {"after", context_after}}},
                       {"variants", variant_meta},
                       {"elapsed_seconds", elapsed}});
  write_text_file(root / "summary.tsv", summary.str());
  staging.commit(out_dir);
  return averaged;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid CNN-BiLSTM + contextual-vector tweet classifier"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // Values from --config sit underneath explicit flags.
  RunConfig run;
  std::string config_path = find_config_arg(args);
  int code = kExitOk;
  try {
    if (!config_path.empty()) run = load_run_config(config_path);

    // preprocess
    PreprocessArgs pargs;
    pargs.settings = run.preprocess;
    pargs.dataset = run.paths.dataset;
    pargs.embeddings = run.paths.embeddings;
    auto* pre = app.add_subcommand("preprocess", "Clean, normalize and encode a dataset into a token cache");
    pre->add_option("--config", pargs.config, "JSON run config");
    pre->add_option("--dataset", pargs.dataset, "Dataset TSV");
    pre->add_option("--embeddings", pargs.embeddings, "word2vec text embeddings (vocabulary source)");
    pre->add_option("--output", pargs.output, "Cache file to write")->required();
    pre->add_option("--summary", pargs.summary, "Summary JSON (default: <output>.summary.json)");
    pre->add_flag("--drop-hashtags", pargs.drop_hashtags, "Drop whole hashtags instead of just '#'");
    pre->add_flag("--keep-diacritics", pargs.keep_diacritics, "Do not strip Arabic diacritics");
    pre->add_flag("--emit-text", pargs.emit_text, "Write id<TAB>cleaned text instead of ids");
    add_preprocess_options(pre, pargs.settings);

    // train
    auto* tr = app.add_subcommand("train", "Train one or more model variants and write a run directory");
    std::string task_str(task_name(run.task));
    std::vector<std::string> variant_names;
    bool drop_hashtags = false, keep_diacritics = false, force = false;
    std::string unused_config;
    tr->add_option("--config", unused_config, "JSON run config");
    tr->add_option("--task", task_str, "sarcasm or sentiment")->capture_default_str();
    tr->add_option("--dataset", run.paths.dataset, "Dataset TSV (split into train/validation)");
    tr->add_option("--val", run.paths.validation, "Explicit validation TSV (disables splitting)");
    tr->add_option("--embeddings", run.paths.embeddings, "word2vec text embeddings");
    tr->add_option("--context", run.paths.context, "Context-vector file");
    tr->add_option("--output", run.paths.output_dir, "Run output directory");
    tr->add_option("--variant", variant_names, "fusion, static_only, context_only (comma separated)")
        ->delimiter(',');
    tr->add_option("--runs", run.train.runs, "Independent seeded runs per variant")->capture_default_str();
    tr->add_option("--seed", run.train.seed, "Base training seed")->capture_default_str();
    tr->add_option("--split-seed", run.split_seed, "Stratified split seed")->capture_default_str();
    tr->add_option("--val-fraction", run.validation_fraction, "Validation fraction")->capture_default_str();
    tr->add_option("--lr", run.train.learning_rate, "Adam learning rate")->capture_default_str();
    tr->add_option("--beta1", run.train.adam_beta1)->capture_default_str();
    tr->add_option("--beta2", run.train.adam_beta2)->capture_default_str();
    tr->add_option("--epsilon", run.train.adam_epsilon)->capture_default_str();
    tr->add_option("--clipnorm", run.train.clipnorm, "Global gradient-norm clip")->capture_default_str();
    tr->add_option("--batch-size", run.train.batch_size)->capture_default_str();
    tr->add_option("--max-epochs", run.train.max_epochs)->capture_default_str();
    tr->add_option("--patience", run.train.early_stop_patience, "Early-stopping patience (val loss)")
        ->capture_default_str();
    tr->add_option("--d1", run.model.d1, "BiLSTM output width (2 x hidden)")->capture_default_str();
    tr->add_option("--filters", run.model.n_filters)->capture_default_str();
    tr->add_option("--kernel", run.model.kernel)->capture_default_str();
    tr->add_option("--pool", run.model.pool)->capture_default_str();
    tr->add_option("--head-dropout", run.model.head_dropout)->capture_default_str();
    tr->add_option("--recurrent-dropout", run.model.recurrent_dropout)->capture_default_str();
    tr->add_flag("--trainable-static", run.model.trainable_static, "Fine-tune the static embeddings");
    tr->add_flag("--drop-hashtags", drop_hashtags);
    tr->add_flag("--keep-diacritics", keep_diacritics);
    tr->add_flag("--force", force, "Replace an existing output directory");
    add_preprocess_options(tr, run.preprocess);

    // evaluate
    EvaluateArgs eargs;
    eargs.embeddings = run.paths.embeddings;
    eargs.context = run.paths.context;
    auto* ev = app.add_subcommand("evaluate", "Score a labeled dataset with a checkpoint");
    ev->add_option("--config", unused_config, "JSON run config");
    ev->add_option("--checkpoint", eargs.checkpoint)->required();
    ev->add_option("--dataset", eargs.dataset)->required();
    ev->add_option("--embeddings", eargs.embeddings);
    ev->add_option("--context", eargs.context);
    ev->add_option("--task", eargs.task, "Expected task; must match the checkpoint");
    ev->add_option("--report", eargs.report, "Write the metrics report as JSON");
    ev->add_option("--predictions", eargs.predictions, "Write id<TAB>predicted_label");

    // predict
    PredictArgs dargs;
    dargs.embeddings = run.paths.embeddings;
    dargs.context = run.paths.context;
    auto* pr = app.add_subcommand("predict", "Predict labels and class probabilities");
    pr->add_option("--config", unused_config, "JSON run config");
    pr->add_option("--checkpoint", dargs.checkpoint)->required();
    auto* text_opt = pr->add_option("--text", dargs.text, "Single input text");
    pr->add_option("--id", dargs.id, "Id of --text (selects its context vector)")->capture_default_str();
    pr->add_option("--input", dargs.input, "Dataset-format TSV; labels may be empty");
    pr->add_option("--embeddings", dargs.embeddings);
    pr->add_option("--context", dargs.context);
    pr->add_option("--output", dargs.output, "Output TSV (default: stdout)");

    // extract-config
    std::string xc_checkpoint, xc_output;
    auto* xc = app.add_subcommand("extract-config", "Print a run config (defaults, --config, or a checkpoint's)");
    xc->add_option("--config", unused_config, "JSON run config to echo");
    xc->add_option("--checkpoint", xc_checkpoint);
    xc->add_option("--output", xc_output);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e, out, err);
      return rc == 0 ? kExitOk : kExitUsage;
    }

    if (pre->parsed()) {
      if (pargs.dataset.empty()) throw UsageError("--dataset is required");
      code = cmd_preprocess(pargs, out);
    } else if (tr->parsed()) {
      run.task = parse_task(task_str);
      if (!variant_names.empty()) {
        run.variants.clear();
        for (const auto& v : variant_names) run.variants.push_back(parse_variant(v));
      }
      if (drop_hashtags) run.preprocess.strip_hashmark_keep_word = false;
      if (keep_diacritics) run.preprocess.remove_diacritics = false;
      run_training(run, out, force);
    } else if (ev->parsed()) {
      code = cmd_evaluate(eargs, out);
    } else if (pr->parsed()) {
      dargs.has_text = text_opt->count() > 0;
      code = cmd_predict(dargs, out);
    } else if (xc->parsed()) {
      code = cmd_extract_config(xc_checkpoint, run, xc_output, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return code;
}

}  // namespace tweetfuse
