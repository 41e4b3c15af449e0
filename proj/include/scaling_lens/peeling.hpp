#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "scaling_lens/degree.hpp"

namespace scaling_lens {

/// Sparse concept-text bipartite graph stored text-major (CSR).
struct BipartiteGraph {
  std::uint64_t n_texts = 0;
  std::uint64_t n_concepts = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> offsets{0};  // n_texts + 1 entries
  std::vector<std::uint32_t> concepts;    // sorted within each text

  std::span<const std::uint32_t> neighbors(std::uint64_t text) const {
    return {concepts.data() + offsets[text],
            concepts.data() + offsets[text + 1]};
  }
  std::uint64_t edge_count() const { return concepts.size(); }

  /// Builds a graph from explicit per-text lists (sorted and validated).
  static BipartiteGraph from_lists(
      std::uint64_t n_concepts,
      const std::vector<std::vector<std::uint32_t>>& texts);

  /// Throws ValidationError on duplicate edges or out-of-range indices.
  void validate() const;
};

struct PeelingOutcome {
  std::vector<std::uint32_t> learned;  // sorted concept indices
  std::uint64_t unlearned_count = 0;
  std::uint64_t iterations = 0;
};

struct PeelOptions {
  // When set, the worklist is processed in a random order drawn from this
  // seed instead of FIFO. The learned set does not depend on it.
  std::optional<std::uint64_t> order_seed;
};

/// Upper limit on expected edges R*T*p for sampled graphs.
inline constexpr double kMaxExpectedEdges = 1e8;

/// Each (text, concept) pair is an edge independently with probability p.
/// Throws BudgetExceeded when R*T*p exceeds kMaxExpectedEdges.
BipartiteGraph sample_graph(std::uint64_t concepts, std::uint64_t texts,
                            double p, std::uint64_t seed);

/// Learns concepts from texts with exactly one unlearned neighbour until no
/// such text remains. O(#edges).
PeelingOutcome peel(const BipartiteGraph& graph, const PeelOptions& options = {});

/// Peeling where concepts flagged in `known` start out learned. `learned` in
/// the outcome lists only the concepts recovered by peeling, and
/// unlearned_count counts the initially unknown concepts left over.
PeelingOutcome peel_erasures(const BipartiteGraph& graph,
                             std::span<const std::uint8_t> known,
                             const PeelOptions& options = {});

/// True when no text has exactly one neighbour outside `learned` (the
/// residual is a stopping set).
bool residual_is_stopping_set(const BipartiteGraph& graph,
                              const PeelingOutcome& outcome);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

/// Mean and standard error of |R_+| over `trials` sampled graphs with
/// p = d_t / R. Trial i uses stream_seed(seed, i).
McEstimate mc_expected_learned(std::uint64_t concepts, std::uint64_t texts,
                               double text_degree, std::uint64_t trials,
                               std::uint64_t seed, unsigned threads = 0);

struct ErasureTrial {
  std::uint64_t parent_concepts = 0;
  std::uint64_t erased = 0;
  std::uint64_t unrecovered = 0;
};

/// One parent-graph decoding run: `erased` of `parent_concepts` concepts
/// chosen uniformly start unknown; texts recover them by peeling.
ErasureTrial simulate_erasure_decoding(std::uint64_t parent_concepts,
                                       std::uint64_t erased,
                                       std::uint64_t texts, double p,
                                       std::uint64_t seed);

struct ErasureEstimate {
  // Unrecovered concepts per parent-graph concept (the bit erasure rate P_b).
  double pb_mean = 0.0;
  double pb_stderr = 0.0;
  // Unrecovered fraction of the erased concepts (= P_b / eps).
  double unlearned_mean = 0.0;
  double unlearned_stderr = 0.0;
  std::uint64_t trials = 0;
};

/// Parent graph with ceil(R/eps) concepts of which exactly R are erased.
ErasureEstimate mc_parent_graph_erasure(const DegreeModel& model,
                                        std::uint64_t trials,
                                        std::uint64_t seed,
                                        unsigned threads = 0);

/// Debug dump: header "R=<n> T=<n> p=<float> seed=<u64>" then one
/// "t <text_id>: <concept ids...>" line per text.
void write_graph_dump(std::ostream& out, const BipartiteGraph& graph);
BipartiteGraph read_graph_dump(std::istream& in);

}  // namespace scaling_lens
