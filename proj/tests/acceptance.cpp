// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "helpers.hpp"
#include "pgorder/corpus.hpp"
#include "pgorder/embed.hpp"
#include "pgorder/ensemble.hpp"
#include "pgorder/evaluation.hpp"
#include "pgorder/graph.hpp"
#include "pgorder/metrics.hpp"
#include "pgorder/nn/grad_check.hpp"
#include "pgorder/nn/train.hpp"
#include "pgorder/pipeline.hpp"
#include "pgorder/text.hpp"

namespace fs = std::filesystem;
using namespace pgorder;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

// ---- 1. metrics -----------------------------------------------------------

Outcome metrics() {
  Outcome o;
  const auto perms = testing::all_permutations(5);
  long mismatches = 0;
  for (const auto& p : perms) {
    for (const auto& g : perms) {
      const double expected = 1.0 - 2.0 * testing::brute_inversions(p, g) / 10.0;
      if (kendall_tau(p, g) != expected) ++mismatches;
    }
  }
  o.require(perms.size() * perms.size() == 14400, "pair count");
  o.require(mismatches == 0, std::to_string(mismatches) + " tau mismatches");
  const auto id = identity_permutation(5);
  o.require(kendall_tau(id, id) == 1.0, "identity");
  o.require(kendall_tau(std::vector<int>{4, 3, 2, 1, 0}, id) == -1.0, "reversal");
  const auto a = Ordering::from_rank({0, 1, 2});
  const auto b = Ordering::from_rank({2, 1, 0});
  o.require(pmr(std::vector<Ordering>{a, b, a, b}, std::vector<Ordering>{a, a, a, a}) == 0.5, "pmr 2/4");
  o.require(pmr(std::vector<Ordering>{a}, std::vector<Ordering>{a}) == 1.0, "pmr 1/1");
  o.require(pmr(std::vector<Ordering>{b}, std::vector<Ordering>{a}) == 0.0, "pmr 0/1");
  o.detail = o.pass ? "14400 pairs exact" : o.detail;
  return o;
}

// ---- 2. gradients ---------------------------------------------------------

Outcome gradients() {
  Outcome o;
  nn::ModelConfig config;
  config.hidden = 16;
  config.embed_dim = 16;
  config.entity_buckets = 64;
  const auto params = nn::ParamStore<double>::initialize(config, 21);
  const HashEmbedder embedder(config.embed_dim, 0);
  const std::vector<Story> stories{
      testing::make_story("three", {"Tom fed the dog.", "The dog chased Tom.", "Tom, the dog, home."}),
      testing::make_story("five", {"Tom fed the dog.", "The dog chased the ball.", "Tom threw the ball.",
                                   "The ball, the dog, Tom.", "Tom went home."})};
  std::map<std::string, int> touched;
  double worst = 0.0;
  std::string worst_at;
  for (const auto& story : stories) {
    const auto sample = prepare_sample(shuffle_story(story, 5), embedder, config);
    const auto r = nn::grad_check(sample, params, config.steps, 1e-5, 1e-4);
    for (const auto& e : params.entries()) touched[e.name] += 0;
    for (const auto& [name, err] : r.group_max) {
      if (std::find(r.untouched.begin(), r.untouched.end(), name) == r.untouched.end()) ++touched[name];
    }
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_at = story.id + ":" + r.worst_param + "[" + std::to_string(r.worst_index) + "]";
    }
  }
  for (const auto& [name, count] : touched) o.require(count > 0, "group " + name + " never exercised");
  o.require(worst < 1e-4, "max rel error " + std::to_string(worst) + " at " + worst_at);
  if (o.pass) o.detail = "max rel error " + std::to_string(worst) + ", " + std::to_string(touched.size()) + " groups";
  return o;
}

// ---- 3. learnability ------------------------------------------------------

Outcome learnability() {
  Outcome o;
  const auto stories = generate_synthetic(500, 5, 100, 0);
  const auto split = split_corpus(stories, SplitRatios{0.8, 0.1, 0.1}, 7);
  nn::TrainConfig config;  // d = h = 64, T = 3, batch 32, 30 epochs, PG2, hash embedder
  config.model.seed = 7;
  const HashEmbedder embedder(config.model.embed_dim, config.model.embed_seed);
  const auto ckpt = nn::train_on_split(split, config, embedder);
  const auto& best = ckpt.history.at(static_cast<std::size_t>(ckpt.epoch - 1));
  o.require(config.epochs <= 30, "epoch budget");
  o.require(best.val_pmr >= 0.9, "val PMR " + fmt(best.val_pmr));
  o.require(best.val_tau >= 0.95, "val tau " + fmt(best.val_tau));

  const RandomOrderer random(11);
  const auto baseline = evaluate(random, stories, 11);
  o.require(std::abs(baseline.mean_tau) <= 0.05, "random tau " + fmt(baseline.mean_tau));
  // 500 Bernoulli(1/120) draws: mean 4.2, sd 2.0.
  o.require(baseline.pmr <= 12.0 / 500.0, "random PMR " + fmt(baseline.pmr));
  if (o.pass) {
    o.detail = "epoch " + std::to_string(ckpt.epoch) + " val PMR " + fmt(best.val_pmr) + " tau " +
               fmt(best.val_tau) + "; random PMR " + fmt(baseline.pmr) + " tau " + fmt(baseline.mean_tau);
  }
  return o;
}

// ---- 4. overfit -----------------------------------------------------------

Outcome overfit() {
  Outcome o;
  nn::TrainConfig config;
  config.epochs = 200;
  config.batch_size = 10;
  config.learning_rate = 3e-3;
  config.target_val_pmr = 1.0;
  const HashEmbedder embedder(config.model.embed_dim, 0);
  const auto stories = generate_synthetic(10, 5, 100, 3);
  std::vector<ShuffledStory> shuffled;
  for (std::size_t i = 0; i < stories.size(); ++i) shuffled.push_back(shuffle_story(stories[i], 100 + i));
  const auto samples = prepare_samples(shuffled, embedder, config.model);
  // Validate on the training set itself.
  const auto ckpt = nn::train(samples, samples, config);
  const auto report = nn::evaluate_samples(samples, ckpt.params, config.model.steps, nn::DecodeMode::greedy());
  o.require(report.pmr == 1.0, "training PMR " + fmt(report.pmr) + " after " + std::to_string(ckpt.history.size()) +
                                   " epochs");
  if (o.pass) o.detail = "PMR 1.0 at epoch " + std::to_string(ckpt.epoch);
  return o;
}

// ---- 5. graphs ------------------------------------------------------------

std::set<std::pair<int, int>> mapped_edges(const SEGraph& g, const std::vector<int>& map) {
  std::set<std::pair<int, int>> out;
  for (auto [a, b] : g.ss_edges) out.insert(std::minmax(map[a], map[b]));
  return out;
}

std::multiset<std::tuple<std::string, int, int>> mapped_entity_edges(const SEGraph& g, const std::vector<int>& map) {
  std::multiset<std::tuple<std::string, int, int>> out;
  for (const auto& e : g.se_edges) {
    out.emplace(g.entities[e.entity].canonical, map[e.sentence], static_cast<int>(e.role));
  }
  return out;
}

bool invariants_hold(const SEGraph& g) {
  std::set<std::pair<int, int>> ss;
  for (auto [a, b] : g.ss_edges) {
    if (a < 0 || a >= b || b >= g.n_sentences || !ss.insert({a, b}).second) return false;
  }
  std::set<std::pair<int, int>> se;
  for (const auto& e : g.se_edges) {
    if (e.sentence < 0 || e.sentence >= g.n_sentences) return false;
    if (e.entity < 0 || e.entity >= static_cast<int>(g.entities.size())) return false;
    if (!se.insert({e.sentence, e.entity}).second) return false;
  }
  try {
    g.validate();
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

std::vector<SentenceEmbedding> embed_all(const Story& story) {
  std::vector<SentenceEmbedding> out;
  for (const auto& s : story.sentences) out.push_back(embed_hash(s, 64, 0));
  return out;
}

Outcome graphs() {
  Outcome o;
  long violations = 0;
  long pg2_out_of_range = 0;
  const auto stories = testing::random_stories(1000, 2, 8, 42);
  for (const auto& story : stories) {
    const auto resolved = resolve_pronouns(story);
    const auto emb = embed_all(resolved.story);
    for (const auto v : all_variants()) {
      const auto g = build_variant(resolved, emb, v);
      if (!invariants_hold(g)) ++violations;
      if (v == GraphVariant::PG2 && story.size() == 5) {
        const auto e = g.ss_edges.size();
        if (e < 5 || e > 10) ++pg2_out_of_range;
      }
    }
  }
  o.require(violations == 0, std::to_string(violations) + " invariant violations");
  o.require(pg2_out_of_range == 0, std::to_string(pg2_out_of_range) + " PG2 n=5 edge counts outside [5,10]");

  long broken = 0;
  std::mt19937_64 rng(5);
  const auto fixtures = testing::random_stories(10, 3, 8, 77);
  for (const auto& story : fixtures) {
    const auto base = unresolved(story);
    const auto base_emb = embed_all(story);
    for (int t = 0; t < 100; ++t) {
      const auto order = testing::random_permutation(story.size(), rng);  // new position -> old sentence
      std::vector<int> to_new(order.size());
      Story permuted = story;
      for (std::size_t p = 0; p < order.size(); ++p) {
        permuted.sentences[p] = story.sentences[order[p]];
        to_new[order[p]] = static_cast<int>(p);
      }
      const auto identity = identity_permutation(story.size());
      const auto perm_res = unresolved(permuted);
      const auto perm_emb = embed_all(permuted);
      for (const auto v : all_variants()) {
        const auto g0 = build_variant(base, base_emb, v);
        const auto g1 = build_variant(perm_res, perm_emb, v);
        if (mapped_edges(g0, to_new) != mapped_edges(g1, identity) ||
            mapped_entity_edges(g0, to_new) != mapped_entity_edges(g1, identity)) {
          ++broken;
        }
      }
    }
  }
  o.require(broken == 0, std::to_string(broken) + " equivariance failures");
  if (o.pass) o.detail = "7000 graphs valid, 7000 shuffled constructions equivariant";
  return o;
}

// ---- 6. ensemble ----------------------------------------------------------

std::vector<int> scan_best(const PairVoteMatrix& votes) {
  long best = -1;
  std::vector<int> out;
  for (const auto& s : testing::all_permutations(votes.n())) {
    long score = 0;
    for (int a = 0; a < votes.n(); ++a) {
      for (int b = a + 1; b < votes.n(); ++b) score += votes(s[a], s[b]);
    }
    if (score > best) {
      best = score;
      out = s;
    }
  }
  return out;
}

Outcome ensemble() {
  Outcome o;
  std::mt19937_64 rng(9);
  long dp_mismatch = 0;
  long unanimity = 0;
  long round_trip = 0;
  MajorityOptions scan;
  scan.exhaustive_scan = true;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + t % 5;
    std::vector<Ordering> triple;
    for (int k = 0; k < 3; ++k) triple.push_back(Ordering::from_sequence(testing::random_permutation(n, rng)));
    const auto votes = pair_votes(triple);
    const auto dp = majority_order(votes);
    if (dp.sequence() != scan_best(votes) || !(majority_order(votes, scan) == dp)) ++dp_mismatch;
    const std::vector<Ordering> same(3, triple[0]);
    if (!(majority_order(pair_votes(same)) == triple[0])) ++unanimity;
    if (!(majority_order(pair_votes(std::span<const Ordering>(&triple[1], 1))) == triple[1])) ++round_trip;
  }
  o.require(dp_mismatch == 0, std::to_string(dp_mismatch) + " DP/scan mismatches");
  o.require(unanimity == 0, std::to_string(unanimity) + " unanimity failures");
  o.require(round_trip == 0, std::to_string(round_trip) + " round-trip failures");
  // Two voters put s1 before s2, one puts s2 first.
  const std::vector<Ordering> two_vs_one{Ordering::from_sequence(std::vector<int>{0, 1}),
                                       Ordering::from_sequence(std::vector<int>{0, 1}),
                                       Ordering::from_sequence(std::vector<int>{1, 0})};
  const auto fv = pair_votes(two_vs_one);
  o.require(fv(0, 1) == 2 && fv(1, 0) == 1, "two-vs-one votes");
  o.require(majority_order(fv).sequence() == std::vector<int>{0, 1}, "two-vs-one winner");
  if (o.pass) o.detail = "1000 triples, two-vs-one case gives s1 s2";
  return o;
}

// ---- 7. coreference -------------------------------------------------------

Outcome coref() {
  Outcome o;
  const std::string corpus = std::string(PGORDER_TEST_DATA) + "/pronoun_stories.tsv";
  const auto stories = load_corpus(corpus, CorpusFormat::Tsv);
  double raw_edges = 0.0;
  double coref_edges = 0.0;
  long fewer = 0;
  for (const auto& s : stories) {
    const auto r = resolve_pronouns(s);
    const auto raw = build_se_graph(r, false).ss_edges.size();
    const auto res = build_se_graph(r, true).ss_edges.size();
    raw_edges += static_cast<double>(raw);
    coref_edges += static_cast<double>(res);
    if (res < raw) ++fewer;
  }
  o.require(fewer == 0, std::to_string(fewer) + " stories lost edges with coref");
  o.require(coref_edges >= raw_edges, "total edges");

  const auto dir = fs::temp_directory_path() / "pgorder_acceptance_coref";
  fs::create_directories(dir);
  const int rc = run_cli({"ablate", "--corpus", corpus, "--format", "tsv", "--variants", "se-graph,se-graph-coref",
                          "--hidden", "16", "--embed-dim", "16", "--epochs", "3", "--ratios", "0.6", "0.2", "0.2",
                          "--eval-decode", "greedy", "--out", (dir / "ablate.md").string()});
  const auto table = slurp(dir / "ablate.md");
  fs::remove_all(dir);
  o.require(rc == 0, "ablate exit code " + std::to_string(rc));
  const auto at = table.find("coref delta");
  o.require(at != std::string::npos, "delta line missing from ablation table");
  if (o.pass) {
    auto line = table.substr(at);
    if (!line.empty() && line.back() == '\n') line.pop_back();
    o.detail = "mean ss_edges raw " + fmt(raw_edges / stories.size(), 2) + " coref " +
               fmt(coref_edges / stories.size(), 2) + "; " + line;
  }
  return o;
}

// ---- 8. determinism -------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const auto dir = fs::temp_directory_path() / "pgorder_acceptance_eval";
  fs::create_directories(dir);
  const auto p = [&](const char* name) { return (dir / name).string(); };
  o.require(run_cli({"synth", "--stories", "60", "--seed", "4", "--out", p("syn.jsonl")}) == 0, "synth");
  o.require(run_cli({"train", "--corpus", p("syn.jsonl"), "--hidden", "16", "--embed-dim", "16", "--epochs", "2",
                     "--out", p("m.ckpt")}) == 0,
            "train");
  for (const char* name : {"1", "2"}) {
    o.require(run_cli({"eval", "--corpus", p("syn.jsonl"), "--checkpoint", p("m.ckpt"), "--seed", "13", "--out",
                       p((std::string("report") + name + ".md").c_str()), "--records",
                       p((std::string("records") + name + ".jsonl").c_str())}) == 0,
              "eval");
  }
  const auto r1 = slurp(p("report1.md"));
  o.require(!r1.empty(), "empty report");
  o.require(r1 == slurp(p("report2.md")), "reports differ");
  o.require(slurp(p("records1.jsonl")) == slurp(p("records2.jsonl")), "records differ");
  fs::remove_all(dir);
  if (o.pass) o.detail = "reports and records byte-identical";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {"metric oracles", metrics, 5},
      {"gradient check", gradients, 60},
      {"learnability", learnability, 600},
      {"overfit 10 stories", overfit, 600},
      {"graph invariants", graphs, 600},
      {"ensemble", ensemble, 30},
      {"coref effect", coref, 600},
      {"eval determinism", determinism, 600},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += "; runtime " + fmt(secs, 1) + " s over budget " + fmt(c.budget_s, 0) + " s";
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << c.name << " (" << fmt(secs, 1) << " s): "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
