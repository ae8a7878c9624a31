#include "pgorder/graph.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pgorder/error.hpp"
#include "pgorder/hash.hpp"

namespace pgorder {

namespace {

constexpr std::array kVariants{GraphVariant::FullyConnected, GraphVariant::SemiFullSE,
                               GraphVariant::SEGraphShared,  GraphVariant::SEGraphCoref,
                               GraphVariant::PG1,            GraphVariant::PG2,
                               GraphVariant::PG3};

void require_sentences(int n) {
  if (n < 2) throw std::invalid_argument("a story graph needs at least 2 sentences");
}

void attach_entities(SEGraph& g, std::vector<Entity> entities) {
  g.entities = std::move(entities);
  g.se_edges.clear();
  for (std::size_t e = 0; e < g.entities.size(); ++e) {
    for (int s : g.entities[e].sentences()) {
      g.se_edges.push_back(EntityEdge{s, static_cast<int>(e), *g.entities[e].sentence_role(s)});
    }
  }
  std::sort(g.se_edges.begin(), g.se_edges.end(), [](const EntityEdge& a, const EntityEdge& b) {
    return std::pair(a.sentence, a.entity) < std::pair(b.sentence, b.entity);
  });
}

void set_edges(SEGraph& g, std::set<std::pair<int, int>> edges) {
  g.ss_edges.assign(edges.begin(), edges.end());
}

}  // namespace

std::span<const GraphVariant> all_variants() { return kVariants; }

std::string_view variant_name(GraphVariant variant) {
  switch (variant) {
    case GraphVariant::FullyConnected: return "fully-connected";
    case GraphVariant::SemiFullSE: return "semi-full-se";
    case GraphVariant::SEGraphShared: return "se-graph";
    case GraphVariant::SEGraphCoref: return "se-graph-coref";
    case GraphVariant::PG1: return "pg1";
    case GraphVariant::PG2: return "pg2";
    case GraphVariant::PG3: return "pg3";
  }
  return "?";
}

std::string_view variant_label(GraphVariant variant) {
  switch (variant) {
    case GraphVariant::FullyConnected: return "Fully connected (sentences only)";
    case GraphVariant::SemiFullSE: return "Fully connected SE-Graph";
    case GraphVariant::SEGraphShared: return "SE-Graph";
    case GraphVariant::SEGraphCoref: return "SE-Graph + coref";
    case GraphVariant::PG1: return "Pruned graph, 1 SS";
    case GraphVariant::PG2: return "Pruned graph, 2 SS";
    case GraphVariant::PG3: return "Pruned graph, 3 SS";
  }
  return "?";
}

GraphVariant parse_variant(std::string_view name) {
  for (auto v : kVariants) {
    if (variant_name(v) == name) return v;
  }
  throw std::invalid_argument("unknown graph variant '" + std::string(name) + "'");
}

void SEGraph::validate() const {
  if (n_sentences < 1) throw Error("graph has no sentence nodes");
  for (std::size_t i = 0; i < ss_edges.size(); ++i) {
    auto [a, b] = ss_edges[i];
    if (a == b) throw Error("self-loop on sentence " + std::to_string(a));
    if (a < 0 || a >= b || b >= n_sentences) {
      throw Error("sentence edge (" + std::to_string(a) + ", " + std::to_string(b) +
                  ") out of range or not normalized");
    }
    if (i > 0 && !(ss_edges[i - 1] < ss_edges[i])) throw Error("sentence edges not sorted/unique");
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : se_edges) {
    if (e.sentence < 0 || e.sentence >= n_sentences) {
      throw Error("entity edge references sentence " + std::to_string(e.sentence));
    }
    if (e.entity < 0 || static_cast<std::size_t>(e.entity) >= entities.size()) {
      throw Error("entity edge references entity " + std::to_string(e.entity));
    }
    if (!seen.insert({e.sentence, e.entity}).second) throw Error("duplicate entity edge");
    const auto role = entities[e.entity].sentence_role(e.sentence);
    if (!role || *role != e.role) {
      throw Error("entity edge role disagrees with mentions of '" + entities[e.entity].canonical +
                  "'");
    }
  }
  std::set<std::string> names;
  for (const auto& ent : entities) {
    if (ent.sentences().size() < 2) {
      throw Error("entity '" + ent.canonical + "' is mentioned in fewer than 2 sentences");
    }
    if (!names.insert(ent.canonical).second) throw Error("duplicate entity '" + ent.canonical + "'");
  }
}

std::vector<int> SEGraph::ss_degree() const {
  std::vector<int> deg(static_cast<std::size_t>(n_sentences), 0);
  for (auto [a, b] : ss_edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

std::vector<int> canonical_rank(std::span<const std::string> sentences) {
  std::vector<int> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> h(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) h[i] = fnv1a64(sentences[i]);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::pair(h[a], a) < std::pair(h[b], b); });
  std::vector<int> rank(sentences.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
  return rank;
}

SEGraph build_pg(const ResolvedStory& story, std::span<const SentenceEmbedding> embeddings, int k,
                 const Tagger& tagger) {
  const int n = story.story.size();
  require_sentences(n);
  if (static_cast<int>(embeddings.size()) != n) {
    throw std::invalid_argument("pruned graph needs one embedding per sentence");
  }
  if (k < 1 || k >= n) {
    throw std::invalid_argument("pruned graph neighbour count k=" + std::to_string(k) +
                                " must satisfy 1 <= k < n=" + std::to_string(n));
  }
  const auto rank = canonical_rank(story.story.sentences);
  std::set<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> scored;
    for (int j = 0; j < n; ++j) {
      if (j != i) scored.emplace_back(cosine_similarity(embeddings[i], embeddings[j]), j);
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return rank[a.second] < rank[b.second];
    });
    for (int t = 0; t < k; ++t) {
      const int j = scored[t].second;
      edges.insert({std::min(i, j), std::max(i, j)});
    }
  }
  SEGraph g;
  g.n_sentences = n;
  set_edges(g, std::move(edges));
  attach_entities(g, extract_entities(story.story, tagger));
  return g;
}

SEGraph build_se_graph(const ResolvedStory& story, bool use_coref, const Tagger& tagger) {
  const Story& text = use_coref ? story.story : story.original;
  require_sentences(text.size());
  SEGraph g;
  g.n_sentences = text.size();
  attach_entities(g, extract_entities(text, tagger));
  std::set<std::pair<int, int>> edges;
  for (const auto& ent : g.entities) {
    const auto s = ent.sentences();
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = a + 1; b < s.size(); ++b) edges.insert({s[a], s[b]});
    }
  }
  set_edges(g, std::move(edges));
  return g;
}

SEGraph build_fully_connected(int n_sentences) {
  if (n_sentences < 1) throw std::invalid_argument("a story graph needs at least 1 sentence");
  SEGraph g;
  g.n_sentences = n_sentences;
  for (int i = 0; i < n_sentences; ++i) {
    for (int j = i + 1; j < n_sentences; ++j) g.ss_edges.emplace_back(i, j);
  }
  return g;
}

SEGraph build_fully_connected(const Story& story) { return build_fully_connected(story.size()); }

SEGraph build_semi_full(const ResolvedStory& story, const Tagger& tagger) {
  SEGraph g = build_fully_connected(story.story.size());
  attach_entities(g, extract_entities(story.story, tagger));
  return g;
}

SEGraph build_variant(const ResolvedStory& story, std::span<const SentenceEmbedding> embeddings,
                      GraphVariant variant, const Tagger& tagger) {
  // Pruned variants on stories shorter than k+1 sentences link everything.
  const int max_k = story.story.size() - 1;
  switch (variant) {
    case GraphVariant::FullyConnected: return build_fully_connected(story.story);
    case GraphVariant::SemiFullSE: return build_semi_full(story, tagger);
    case GraphVariant::SEGraphShared: return build_se_graph(story, false, tagger);
    case GraphVariant::SEGraphCoref: return build_se_graph(story, true, tagger);
    case GraphVariant::PG1: return build_pg(story, embeddings, std::min(1, max_k), tagger);
    case GraphVariant::PG2: return build_pg(story, embeddings, std::min(2, max_k), tagger);
    case GraphVariant::PG3: return build_pg(story, embeddings, std::min(3, max_k), tagger);
  }
  throw std::invalid_argument("unknown graph variant");
}

void write_graph_dump(std::ostream& out, const SEGraph& graph) {
  out << "n=" << graph.n_sentences << '\n';
  for (auto [a, b] : graph.ss_edges) out << "S " << a << ' ' << b << '\n';
  for (const auto& e : graph.se_edges) {
    out << "E " << e.sentence << ' ' << graph.entities[e.entity].canonical << ' '
        << role_name(e.role) << '\n';
  }
}

std::string graph_dump(const SEGraph& graph) {
  std::ostringstream out;
  write_graph_dump(out, graph);
  return out.str();
}

}  // namespace pgorder
