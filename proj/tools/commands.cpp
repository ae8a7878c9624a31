#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pgorder/corpus.hpp"
#include "pgorder/embed.hpp"
#include "pgorder/ensemble.hpp"
#include "pgorder/error.hpp"
#include "pgorder/evaluation.hpp"
#include "pgorder/graph.hpp"
#include "pgorder/hash.hpp"
#include "pgorder/metrics.hpp"
#include "pgorder/nn/checkpoint.hpp"
#include "pgorder/nn/train.hpp"
#include "pgorder/pipeline.hpp"

namespace pgorder::cli {

namespace {

namespace fs = std::filesystem;

/// Writes through a temporary sibling file and renames it into place, so a
/// failed command never leaves a partial output. An empty path means `fallback`.
void write_output(const std::string& path, std::ostream& fallback,
                  const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + tmp.string());
      body(out);
      out.flush();
      if (!out) throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

struct CorpusFlags {
  std::string path;
  std::string format = "jsonl";
};

void add_corpus_flags(CLI::App* cmd, CorpusFlags& f, bool required = true) {
  auto* opt = cmd->add_option("--corpus", f.path, "story corpus (JSONL or TSV)");
  if (required) opt->required();
  cmd->add_option("--format", f.format, "corpus format")
      ->check(CLI::IsMember({"jsonl", "tsv"}))
      ->capture_default_str();
}

std::vector<Story> read_corpus(const CorpusFlags& f, int min_sentences = 2) {
  return load_corpus(f.path, parse_corpus_format(f.format), min_sentences);
}

const CLI::Validator kVariantCheck(
    [](std::string& s) -> std::string {
      try {
        parse_variant(s);
      } catch (const std::exception& e) {
        return e.what();
      }
      return {};
    },
    "VARIANT");

const CLI::Validator kDecodeCheck(
    [](std::string& s) -> std::string {
      try {
        nn::DecodeMode::parse(s);
      } catch (const std::exception& e) {
        return e.what();
      }
      return {};
    },
    "greedy|beam:W");

/// Hyper-parameters shared by train and ablate.
struct ModelFlags {
  std::string variant = "pg2";
  int hidden = 64;
  int embed_dim = 64;
  int steps = 3;
  int buckets = 4096;
  std::string embedder = "hash";
  std::string coref = "on";
  int batch = 32;
  double lr = 1e-3;
  int epochs = 30;
  double clip = 5.0;
  std::string decode = "greedy";
  std::uint64_t seed = 0;
  std::vector<double> ratios{0.8, 0.1, 0.1};
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_variant) {
  if (with_variant) {
    cmd->add_option("--variant", f.variant, "graph variant")->check(kVariantCheck)->capture_default_str();
  }
  cmd->add_option("--hidden", f.hidden, "hidden size h")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--embed-dim", f.embed_dim, "sentence embedding size d")
      ->check(CLI::Range(8, 1 << 16))
      ->capture_default_str();
  cmd->add_option("--steps", f.steps, "message-passing rounds T")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--buckets", f.buckets, "entity table rows")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--embedder", f.embedder, "hash, window or file:PATH")->capture_default_str();
  cmd->add_option("--coref", f.coref, "pronoun resolution")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  cmd->add_option("--batch", f.batch, "batch size")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lr", f.lr, "Adam learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--epochs", f.epochs, "training epochs")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--clip", f.clip, "gradient norm clip (0 disables)")->capture_default_str();
  cmd->add_option("--decode", f.decode, "validation decoding")->check(kDecodeCheck)->capture_default_str();
  cmd->add_option("--seed", f.seed, "root seed")->capture_default_str();
  cmd->add_option("--ratios", f.ratios, "train/validation/test fractions")->expected(3)->capture_default_str();
}

nn::TrainConfig train_config(const ModelFlags& f) {
  nn::TrainConfig c;
  c.model.hidden = f.hidden;
  c.model.embed_dim = f.embed_dim;
  c.model.steps = f.steps;
  c.model.entity_buckets = f.buckets;
  c.model.variant = parse_variant(f.variant);
  c.model.embedder = f.embedder;
  c.model.embed_seed = f.seed;
  c.model.coref = f.coref == "on";
  c.model.seed = f.seed;
  c.batch_size = f.batch;
  c.learning_rate = f.lr;
  c.epochs = f.epochs;
  c.clip_norm = f.clip;
  c.validation_decode = nn::DecodeMode::parse(f.decode);
  return c;
}

std::string describe(const nn::TrainConfig& c) {
  std::ostringstream s;
  s << "variant=" << variant_name(c.model.variant) << " hidden=" << c.model.hidden
    << " embed_dim=" << c.model.embed_dim << " steps=" << c.model.steps << " buckets=" << c.model.entity_buckets
    << " embedder=" << c.model.embedder << " coref=" << (c.model.coref ? "on" : "off") << " batch=" << c.batch_size
    << " lr=" << c.learning_rate << " epochs=" << c.epochs << " clip=" << c.clip_norm
    << " decode=" << c.validation_decode.str() << " seed=" << c.model.seed;
  return s.str();
}

SplitRatios ratios_of(const ModelFlags& f) { return {f.ratios[0], f.ratios[1], f.ratios[2]}; }

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fmt4(double v) { return fixed(v, 4); }

std::unique_ptr<Orderer> make_orderer(const std::string& checkpoint, const std::string& decode,
                                      const std::string& variant, bool force, const std::string& embedder,
                                      std::uint64_t seed) {
  if (checkpoint == "oracle") return std::make_unique<OracleOrderer>();
  if (checkpoint == "random") return std::make_unique<RandomOrderer>(seed);
  auto ckpt = nn::load_checkpoint(checkpoint);
  if (!embedder.empty()) ckpt.config.embedder = embedder;
  std::shared_ptr<const Embedder> emb =
      make_embedder(ckpt.config.embedder, ckpt.config.embed_dim, ckpt.config.embed_seed);
  auto orderer = std::make_unique<ModelOrderer>(ckpt, emb, nn::DecodeMode::parse(decode));
  if (!variant.empty()) {
    const auto v = parse_variant(variant);
    nn::require_compatible(ckpt, v, force);
    orderer->set_variant(v);
  }
  return orderer;
}

struct OrdererFlags {
  std::string checkpoint;
  std::string decode = "beam:8";
  std::string variant;
  std::string embedder;
  bool force = false;
};

void add_orderer_flags(CLI::App* cmd, OrdererFlags& f) {
  cmd->add_option("--checkpoint", f.checkpoint, "checkpoint file, or 'oracle' / 'random'")->required();
  cmd->add_option("--decode", f.decode, "greedy or beam:W")->check(kDecodeCheck)->capture_default_str();
  cmd->add_option("--variant", f.variant, "graph variant at inference (default: the checkpoint's)")
      ->check(kVariantCheck);
  cmd->add_option("--embedder", f.embedder, "override the checkpoint's embedder (hash, window, file:PATH)");
  cmd->add_flag("--force", f.force, "allow a variant other than the one trained");
}

// ---- commands ----

struct PrepareFlags {
  CorpusFlags corpus;
  std::string out;
  std::string stats;
  std::string coref = "on";
};

void cmd_prepare(const PrepareFlags& f, std::ostream& out, std::ostream& err) {
  auto stories = read_corpus(f.corpus);
  const bool coref = f.coref == "on";
  std::vector<Story> resolved;
  std::ostringstream stats;
  stats << "story_id\tentities\tsubstitutions\n";
  long total_subs = 0;
  long total_entities = 0;
  for (const auto& story : stories) {
    // Resolve in gold order, then store back in the story's own order.
    Story gold{story.id, story.gold_sentences(), identity_permutation(story.size())};
    ResolvedStory r = coref ? resolve_pronouns(gold) : unresolved(gold);
    const auto entities = extract_entities(r);
    Story result = story;
    for (int i = 0; i < story.size(); ++i) result.sentences[i] = r.story.sentences[story.gold_order[i]];
    stats << story.id << '\t' << entities.size() << '\t' << r.substitutions.size() << '\n';
    total_subs += static_cast<long>(r.substitutions.size());
    total_entities += static_cast<long>(entities.size());
    resolved.push_back(std::move(result));
  }
  write_output(f.out, out, [&](std::ostream& o) { write_corpus(o, resolved, parse_corpus_format(f.corpus.format)); });
  const std::string stats_path = f.stats.empty() && !f.out.empty() && f.out != "-" ? f.out + ".entities.tsv" : f.stats;
  if (!stats_path.empty()) write_output(stats_path, out, [&](std::ostream& o) { o << stats.str(); });
  err << "prepare: stories=" << stories.size() << " coref=" << f.coref << " substitutions=" << total_subs
      << " entities=" << total_entities << '\n';
}

struct ShuffleFlags {
  CorpusFlags corpus;
  std::string out;
  std::uint64_t seed = 0;
};

void cmd_shuffle(const ShuffleFlags& f, std::ostream& out, std::ostream& err) {
  const auto stories = read_corpus(f.corpus, 1);
  std::vector<Story> shuffled;
  for (std::size_t i = 0; i < stories.size(); ++i) {
    shuffled.push_back(to_story(shuffle_story(stories[i], presentation_seed(f.seed, i))));
  }
  write_output(f.out, out, [&](std::ostream& o) { write_corpus(o, shuffled, CorpusFormat::Jsonl); });
  err << "shuffle: stories=" << stories.size() << " seed=" << f.seed << '\n';
}

struct SynthFlags {
  int stories = 500;
  int sentences = 5;
  int vocab = 100;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_synth(const SynthFlags& f, std::ostream& out, std::ostream& err) {
  const auto stories = generate_synthetic(f.stories, f.sentences, f.vocab, f.seed);
  write_output(f.out, out, [&](std::ostream& o) { write_corpus(o, stories, CorpusFormat::Jsonl); });
  err << "synth: stories=" << f.stories << " sentences=" << f.sentences << " vocab=" << f.vocab
      << " seed=" << f.seed << '\n';
}

struct SplitFlags {
  CorpusFlags corpus;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<double> ratios{0.8, 0.1, 0.1};
};

void cmd_split(const SplitFlags& f, std::ostream& out, std::ostream& err) {
  const auto stories = read_corpus(f.corpus);
  const auto split = split_corpus(stories, {f.ratios[0], f.ratios[1], f.ratios[2]}, f.seed);
  fs::create_directories(f.out_dir);
  const auto fmt = parse_corpus_format(f.corpus.format);
  const std::string ext = f.corpus.format;
  write_output((fs::path(f.out_dir) / ("train." + ext)).string(), out,
               [&](std::ostream& o) { write_corpus(o, split.train, fmt); });
  write_output((fs::path(f.out_dir) / ("validation." + ext)).string(), out,
               [&](std::ostream& o) { write_corpus(o, split.validation, fmt); });
  write_output((fs::path(f.out_dir) / ("test." + ext)).string(), out,
               [&](std::ostream& o) { write_corpus(o, split.test, fmt); });
  err << "split: train=" << split.train.size() << " validation=" << split.validation.size()
      << " test=" << split.test.size() << " seed=" << f.seed << '\n';
}

struct TrainFlags {
  CorpusFlags corpus;
  ModelFlags model;
  std::string out;
};

void cmd_train(const TrainFlags& f, std::ostream&, std::ostream& err) {
  const auto config = train_config(f.model);
  err << "train: " << describe(config) << '\n';
  const auto stories = read_corpus(f.corpus);
  const auto split = split_corpus(stories, ratios_of(f.model), config.model.seed);
  err << "train: split train=" << split.train.size() << " validation=" << split.validation.size()
      << " test=" << split.test.size() << '\n';
  const auto embedder = make_embedder(config.model.embedder, config.model.embed_dim, config.model.embed_seed);
  const auto ckpt = nn::train_on_split(split, config, *embedder, [&](const nn::EpochRecord& r) {
    err << "epoch " << r.epoch << " loss " << fmt4(r.train_loss) << " val_tau " << fmt4(r.val_tau) << " val_pmr "
        << fmt4(r.val_pmr) << '\n';
  });
  nn::save_checkpoint(f.out, ckpt);
  err << "train: kept epoch " << ckpt.epoch << ", wrote " << f.out << '\n';
}

struct OrderFlags {
  CorpusFlags corpus;
  OrdererFlags orderer;
  std::string out;
  std::uint64_t seed = 0;
};

void cmd_order(const OrderFlags& f, std::ostream& out, std::ostream& err) {
  const auto orderer = make_orderer(f.orderer.checkpoint, f.orderer.decode, f.orderer.variant, f.orderer.force,
                                    f.orderer.embedder, f.seed);
  const auto stories = read_corpus(f.corpus, 1);
  std::vector<StoryOrdering> result;
  for (const auto& story : stories) {
    result.push_back({story.id, orderer->order(present_as_stored(story))});
  }
  write_output(f.out, out, [&](std::ostream& o) { write_orderings(o, result); });
  err << "order: " << orderer->name() << " stories=" << stories.size() << " seed=" << f.seed << '\n';
}

struct EvalFlags {
  CorpusFlags corpus;
  OrdererFlags orderer;
  std::string out;
  std::string records;
  std::uint64_t seed = 0;
};

std::string row_label(const Orderer& orderer) {
  if (const auto* m = dynamic_cast<const ModelOrderer*>(&orderer)) {
    return std::string(variant_label(m->checkpoint().config.variant)) + " [" + orderer.name() + "]";
  }
  return orderer.name();
}

void cmd_eval(const EvalFlags& f, std::ostream& out, std::ostream& err) {
  const auto orderer = make_orderer(f.orderer.checkpoint, f.orderer.decode, f.orderer.variant, f.orderer.force,
                                    f.orderer.embedder, f.seed);
  const auto stories = read_corpus(f.corpus);
  const auto report = evaluate(*orderer, stories, f.seed);
  const std::vector<ReportRow> rows{{row_label(*orderer), report, "seed=" + std::to_string(f.seed)}};
  write_output(f.out, out, [&](std::ostream& o) { write_report_table(o, rows); });
  if (!f.records.empty()) {
    write_output(f.records, out, [&](std::ostream& o) { write_report_records(o, report, orderer->name()); });
  }
  err << "eval: " << orderer->name() << " stories=" << report.n_stories << " seed=" << f.seed << '\n';
}

struct EnsembleFlags {
  std::vector<std::string> orderings;
  CorpusFlags corpus;
  std::string out;
  std::string report;
};

EvalReport score_orderings(const std::vector<StoryOrdering>& preds, const std::vector<Story>& gold) {
  std::map<std::string, const Story*> by_id;
  for (const auto& s : gold) by_id[s.id] = &s;
  std::vector<StoryResult> results;
  for (const auto& p : preds) {
    const auto it = by_id.find(p.story_id);
    if (it == by_id.end()) throw Error("story '" + p.story_id + "' is not in the gold corpus");
    const Ordering g = Ordering::from_rank(it->second->gold_order);
    if (g.size() != p.ordering.size()) throw Error("story '" + p.story_id + "' length differs from the gold corpus");
    results.push_back({p.story_id, g.size() < 2 ? 1.0 : kendall_tau(p.ordering, g), p.ordering == g});
  }
  return summarize(std::move(results));
}

void cmd_ensemble(const EnsembleFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<std::vector<StoryOrdering>> inputs;
  for (const auto& path : f.orderings) inputs.push_back(load_orderings(path));
  const auto fused = fuse_orderings(inputs);
  write_output(f.out, out, [&](std::ostream& o) { write_orderings(o, fused); });
  if (!f.corpus.path.empty()) {
    const auto gold = read_corpus(f.corpus, 1);
    std::vector<ReportRow> rows;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      rows.push_back({fs::path(f.orderings[i]).filename().string(), score_orderings(inputs[i], gold), "input"});
    }
    rows.push_back({"majority vote", score_orderings(fused, gold), "k=" + std::to_string(inputs.size())});
    write_output(f.report, err, [&](std::ostream& o) { write_report_table(o, rows); });
  }
  err << "ensemble: inputs=" << inputs.size() << " stories=" << fused.size() << '\n';
}

struct AblateFlags {
  CorpusFlags corpus;
  ModelFlags model;
  std::string variants;
  std::string eval_decode = "beam:8";
  std::string out;
  std::string records;
};

void cmd_ablate(const AblateFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<GraphVariant> variants;
  if (f.variants.empty()) {
    variants.assign(all_variants().begin(), all_variants().end());
  } else {
    std::stringstream list(f.variants);
    std::string item;
    while (std::getline(list, item, ',')) variants.push_back(parse_variant(item));
  }
  const auto base = train_config(f.model);
  err << "ablate: " << describe(base) << '\n';
  const auto stories = read_corpus(f.corpus);
  const auto split = split_corpus(stories, ratios_of(f.model), base.model.seed);
  const std::shared_ptr<const Embedder> embedder =
      make_embedder(base.model.embedder, base.model.embed_dim, base.model.embed_seed);

  std::vector<ReportRow> rows;
  std::map<GraphVariant, std::pair<double, EvalReport>> summary;
  std::ostringstream records;
  for (const auto variant : variants) {
    auto config = base;
    config.model.variant = variant;
    const auto ckpt = nn::train_on_split(split, config, *embedder, [&](const nn::EpochRecord& r) {
      err << variant_name(variant) << " epoch " << r.epoch << " loss " << fmt4(r.train_loss) << " val_tau "
          << fmt4(r.val_tau) << " val_pmr " << fmt4(r.val_pmr) << '\n';
    });
    ModelOrderer orderer(ckpt, embedder, nn::DecodeMode::parse(f.eval_decode));
    const auto report = evaluate(orderer, split.test, base.model.seed);

    double edges = 0.0;
    double entities = 0.0;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
      const auto prepared =
          prepare_story(shuffle_story(split.test[i], presentation_seed(base.model.seed, i)), *embedder, config.model);
      edges += static_cast<double>(prepared.graph.ss_edges.size());
      entities += static_cast<double>(prepared.graph.entities.size());
    }
    const double n = std::max<double>(1.0, static_cast<double>(split.test.size()));
    rows.push_back({std::string(variant_label(variant)), report,
                    "ss_edges=" + fixed(edges / n, 2) + " entities=" + fixed(entities / n, 2) +
                        " epoch=" + std::to_string(ckpt.epoch)});
    summary[variant] = {edges / n, report};
    write_report_records(records, report, std::string(variant_name(variant)));
  }
  write_output(f.out, out, [&](std::ostream& o) {
    write_report_table(o, rows);
    const auto raw = summary.find(GraphVariant::SEGraphShared);
    const auto coref = summary.find(GraphVariant::SEGraphCoref);
    if (raw != summary.end() && coref != summary.end()) {
      char line[160];
      std::snprintf(line, sizeof(line), "coref delta (SE-Graph + coref minus SE-Graph): ss_edges %+.2f tau %+.4f PMR %+.4f\n",
                    coref->second.first - raw->second.first,
                    coref->second.second.mean_tau - raw->second.second.mean_tau,
                    coref->second.second.pmr - raw->second.second.pmr);
      o << line;
    }
  });
  if (!f.records.empty()) write_output(f.records, out, [&](std::ostream& o) { o << records.str(); });
}

struct GraphFlags {
  CorpusFlags corpus;
  std::string variant = "pg2";
  std::string embedder = "hash";
  int embed_dim = 64;
  std::string coref = "on";
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_graph(const GraphFlags& f, std::ostream& out, std::ostream& err) {
  nn::ModelConfig config;
  config.variant = parse_variant(f.variant);
  config.embedder = f.embedder;
  config.embed_dim = f.embed_dim;
  config.embed_seed = f.seed;
  config.coref = f.coref == "on";
  const auto embedder = make_embedder(f.embedder, f.embed_dim, f.seed);
  const auto stories = read_corpus(f.corpus, 1);
  write_output(f.out, out, [&](std::ostream& o) {
    for (const auto& story : stories) {
      o << "# " << story.id << '\n';
      write_graph_dump(o, prepare_story(present_as_stored(story), *embedder, config).graph);
    }
  });
  err << "graph: variant=" << f.variant << " stories=" << stories.size() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentence ordering with pruned sentence-entity graphs"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every command");

  auto with_config = [](CLI::App* cmd) {
    cmd->set_config("--config", "", "key=value file; command-line flags take precedence");
    return cmd;
  };

  PrepareFlags prepare;
  auto* c_prepare = with_config(app.add_subcommand("prepare", "resolve pronouns in a corpus"));
  add_corpus_flags(c_prepare, prepare.corpus);
  c_prepare->add_option("--out", prepare.out, "output corpus (default stdout)");
  c_prepare->add_option("--stats", prepare.stats, "per-story entity counts (default <out>.entities.tsv)");
  c_prepare->add_option("--coref", prepare.coref, "pronoun resolution")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();

  ShuffleFlags shuffle;
  auto* c_shuffle = with_config(app.add_subcommand("shuffle", "store every story in a seeded shuffled order"));
  add_corpus_flags(c_shuffle, shuffle.corpus);
  c_shuffle->add_option("--out", shuffle.out, "output JSONL corpus (default stdout)");
  c_shuffle->add_option("--seed", shuffle.seed, "root seed")->capture_default_str();

  SynthFlags synth;
  auto* c_synth = with_config(app.add_subcommand("synth", "generate synthetic ordinal stories"));
  c_synth->add_option("--stories", synth.stories, "number of stories")->capture_default_str();
  c_synth->add_option("--sentences", synth.sentences, "sentences per story")->check(CLI::Range(2, 8))->capture_default_str();
  c_synth->add_option("--vocab", synth.vocab, "words drawn per pool")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "root seed")->capture_default_str();
  c_synth->add_option("--out", synth.out, "output JSONL corpus (default stdout)");

  SplitFlags split;
  auto* c_split = with_config(app.add_subcommand("split", "seeded train/validation/test split"));
  add_corpus_flags(c_split, split.corpus);
  c_split->add_option("--out", split.out_dir, "output directory")->required();
  c_split->add_option("--seed", split.seed, "root seed")->capture_default_str();
  c_split->add_option("--ratios", split.ratios, "train/validation/test fractions")->expected(3)->capture_default_str();

  TrainFlags train;
  auto* c_train = with_config(app.add_subcommand("train", "train a model and write a checkpoint"));
  add_corpus_flags(c_train, train.corpus);
  add_model_flags(c_train, train.model, true);
  c_train->add_option("--out", train.out, "checkpoint path")->required();

  OrderFlags order;
  auto* c_order = with_config(app.add_subcommand("order", "predict orderings for stories as stored"));
  add_corpus_flags(c_order, order.corpus);
  add_orderer_flags(c_order, order.orderer);
  c_order->add_option("--out", order.out, "orderings file (default stdout)");
  c_order->add_option("--seed", order.seed, "seed for the random orderer")->capture_default_str();

  EvalFlags eval;
  auto* c_eval = with_config(app.add_subcommand("eval", "shuffle, order and score a gold corpus"));
  add_corpus_flags(c_eval, eval.corpus);
  add_orderer_flags(c_eval, eval.orderer);
  c_eval->add_option("--seed", eval.seed, "presentation seed")->capture_default_str();
  c_eval->add_option("--out", eval.out, "report table (default stdout)");
  c_eval->add_option("--records", eval.records, "per-story JSONL records");

  EnsembleFlags ensemble;
  auto* c_ensemble = with_config(app.add_subcommand("ensemble", "fuse orderings files by pairwise majority"));
  c_ensemble->add_option("--orderings", ensemble.orderings, "orderings files")->required()->expected(1, -1);
  add_corpus_flags(c_ensemble, ensemble.corpus, false);
  c_ensemble->add_option("--out", ensemble.out, "fused orderings (default stdout)");
  c_ensemble->add_option("--report", ensemble.report, "report table when --corpus is given (default stderr)");

  AblateFlags ablate;
  auto* c_ablate = with_config(app.add_subcommand("ablate", "train and score every graph variant"));
  add_corpus_flags(c_ablate, ablate.corpus);
  add_model_flags(c_ablate, ablate.model, false);
  c_ablate->add_option("--variants", ablate.variants, "comma-separated variants (default all)")
      ->check([](const std::string& s) -> std::string {
        std::stringstream list(s);
        std::string item;
        try {
          while (std::getline(list, item, ',')) parse_variant(item);
        } catch (const std::exception& e) {
          return e.what();
        }
        return {};
      });
  c_ablate->add_option("--eval-decode", ablate.eval_decode, "test-set decoding")
      ->check(kDecodeCheck)
      ->capture_default_str();
  c_ablate->add_option("--out", ablate.out, "report table (default stdout)");
  c_ablate->add_option("--records", ablate.records, "per-story JSONL records");

  GraphFlags graph;
  auto* c_graph = with_config(app.add_subcommand("graph", "dump the graph built for each story as stored"));
  add_corpus_flags(c_graph, graph.corpus);
  c_graph->add_option("--variant", graph.variant, "graph variant")->check(kVariantCheck)->capture_default_str();
  c_graph->add_option("--embedder", graph.embedder, "hash, window or file:PATH")->capture_default_str();
  c_graph->add_option("--embed-dim", graph.embed_dim, "embedding size")->capture_default_str();
  c_graph->add_option("--coref", graph.coref, "pronoun resolution")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  c_graph->add_option("--seed", graph.seed, "embedder seed")->capture_default_str();
  c_graph->add_option("--out", graph.out, "output (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*c_prepare) cmd_prepare(prepare, out, err);
    if (*c_shuffle) cmd_shuffle(shuffle, out, err);
    if (*c_synth) cmd_synth(synth, out, err);
    if (*c_split) cmd_split(split, out, err);
    if (*c_train) cmd_train(train, out, err);
    if (*c_order) cmd_order(order, out, err);
    if (*c_eval) cmd_eval(eval, out, err);
    if (*c_ensemble) cmd_ensemble(ensemble, out, err);
    if (*c_ablate) cmd_ablate(ablate, out, err);
    if (*c_graph) cmd_graph(graph, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pgorder::cli
