#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgorder/embed.hpp"
#include "pgorder/text.hpp"

namespace pgorder {

enum class GraphVariant { FullyConnected, SemiFullSE, SEGraphShared, SEGraphCoref, PG1, PG2, PG3 };

std::span<const GraphVariant> all_variants();
// Short identifier used on the command line and in checkpoints ("pg2", ...).
std::string_view variant_name(GraphVariant variant);
// Row label for result tables.
std::string_view variant_label(GraphVariant variant);
GraphVariant parse_variant(std::string_view name);

struct EntityEdge {
  int sentence = 0;
  int entity = 0;
  Role role = Role::Other;

  friend bool operator==(const EntityEdge&, const EntityEdge&) = default;
};

/// Undirected sentence-entity graph. Entity nodes connect only to sentence
/// nodes; sentence-sentence edges are stored once as (i, j) with i < j.
struct SEGraph {
  int n_sentences = 0;
  std::vector<Entity> entities;
  std::vector<std::pair<int, int>> ss_edges;  // sorted, unique
  std::vector<EntityEdge> se_edges;           // sorted by (sentence, entity)

  // Throws Error describing the first violated structural invariant.
  void validate() const;
  std::vector<int> ss_degree() const;
};

/// Rank of each sentence in the content-canonical order: by FNV-1a hash of
/// the text, then by index. Used to break exact ties independently of the
/// order sentences are presented in.
std::vector<int> canonical_rank(std::span<const std::string> sentences);

/// Pruned graph: every sentence links to its k most cosine-similar
/// sentences (ties by canonical rank); the edge set is the undirected union
/// of those selections. Entity nodes come from the resolved text.
SEGraph build_pg(const ResolvedStory& story, std::span<const SentenceEmbedding> embeddings, int k,
                 const Tagger& tagger = default_tagger());

/// Sentences sharing at least one entity are linked. Entities come from the
/// resolved text when `use_coref` is set, else from the original text.
SEGraph build_se_graph(const ResolvedStory& story, bool use_coref,
                       const Tagger& tagger = default_tagger());

// Complete sentence graph, no entity nodes.
SEGraph build_fully_connected(int n_sentences);
SEGraph build_fully_connected(const Story& story);

// Complete sentence graph plus entity nodes from the resolved text.
SEGraph build_semi_full(const ResolvedStory& story, const Tagger& tagger = default_tagger());

// Pruned variants use k = min(k, n - 1).
SEGraph build_variant(const ResolvedStory& story, std::span<const SentenceEmbedding> embeddings,
                      GraphVariant variant, const Tagger& tagger = default_tagger());

/// "n=<count>", then "S i j" per sentence edge, then "E i entity role" per
/// sentence-entity edge.
void write_graph_dump(std::ostream& out, const SEGraph& graph);
std::string graph_dump(const SEGraph& graph);

}  // namespace pgorder
