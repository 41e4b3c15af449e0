#include "scaling_lens/peeling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "scaling_lens/errors.hpp"
#include "scaling_lens/parallel.hpp"
#include "scaling_lens/rng.hpp"

namespace scaling_lens {
namespace {

struct MeanAndError {
  double mean;
  double std_error;
};

MeanAndError summarize(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  if (values.size() < 2) return {mean, 0.0};
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    sq[i] = (values[i] - mean) * (values[i] - mean);
  }
  const double var = pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

PeelingOutcome run_peeling(const BipartiteGraph& graph,
                           std::span<const std::uint8_t> known,
                           const PeelOptions& options) {
  const std::uint64_t n_texts = graph.n_texts;
  const std::uint64_t n_concepts = graph.n_concepts;
  auto is_known = [&](std::uint32_t c) {
    return !known.empty() && known[c] != 0;
  };

  // Unknown-neighbour count and XOR of unknown neighbour ids per text: when
  // the count is 1 the XOR is that neighbour.
  std::vector<std::uint32_t> count(n_texts, 0);
  std::vector<std::uint32_t> xor_ids(n_texts, 0);
  std::vector<std::uint64_t> concept_offsets(n_concepts + 1, 0);
  for (std::uint64_t t = 0; t < n_texts; ++t) {
    for (std::uint32_t c : graph.neighbors(t)) {
      if (is_known(c)) continue;
      ++count[t];
      xor_ids[t] ^= c;
      ++concept_offsets[c + 1];
    }
  }
  for (std::uint64_t c = 0; c < n_concepts; ++c) {
    concept_offsets[c + 1] += concept_offsets[c];
  }
  std::vector<std::uint32_t> concept_texts(concept_offsets.back());
  {
    std::vector<std::uint64_t> fill(concept_offsets.begin(),
                                    concept_offsets.end() - 1);
    for (std::uint64_t t = 0; t < n_texts; ++t) {
      for (std::uint32_t c : graph.neighbors(t)) {
        if (!is_known(c)) concept_texts[fill[c]++] = static_cast<std::uint32_t>(t);
      }
    }
  }

  std::vector<std::uint8_t> learned(n_concepts, 0);
  std::vector<std::uint32_t> worklist;
  for (std::uint64_t t = 0; t < n_texts; ++t) {
    if (count[t] == 1) worklist.push_back(static_cast<std::uint32_t>(t));
  }

  std::optional<Rng> order_rng;
  if (options.order_seed) order_rng.emplace(*options.order_seed);

  PeelingOutcome out;
  std::size_t head = 0;
  while (head < worklist.size()) {
    std::uint32_t t;
    if (order_rng) {
      const std::size_t pick = head + order_rng->below(worklist.size() - head);
      std::swap(worklist[head], worklist[pick]);
    }
    t = worklist[head++];
    if (count[t] != 1) continue;
    const std::uint32_t c = xor_ids[t];
    learned[c] = 1;
    ++out.iterations;
    for (std::uint64_t k = concept_offsets[c]; k < concept_offsets[c + 1]; ++k) {
      const std::uint32_t t2 = concept_texts[k];
      --count[t2];
      xor_ids[t2] ^= c;
      if (count[t2] == 1) worklist.push_back(t2);
    }
    // Compact occasionally so the worklist stays bounded by live entries.
    if (head > 4096 && head * 2 > worklist.size()) {
      worklist.erase(worklist.begin(), worklist.begin() + head);
      head = 0;
    }
  }

  std::uint64_t unknown_total = 0;
  for (std::uint64_t c = 0; c < n_concepts; ++c) {
    const auto id = static_cast<std::uint32_t>(c);
    if (learned[c]) {
      out.learned.push_back(id);
    } else if (!is_known(id)) {
      ++unknown_total;
    }
  }
  out.unlearned_count = unknown_total;
  return out;
}

}  // namespace

BipartiteGraph BipartiteGraph::from_lists(
    std::uint64_t n_concepts,
    const std::vector<std::vector<std::uint32_t>>& texts) {
  BipartiteGraph g;
  g.n_concepts = n_concepts;
  g.n_texts = texts.size();
  g.offsets.assign(1, 0);
  for (const auto& list : texts) {
    std::vector<std::uint32_t> sorted = list;
    std::sort(sorted.begin(), sorted.end());
    g.concepts.insert(g.concepts.end(), sorted.begin(), sorted.end());
    g.offsets.push_back(g.concepts.size());
  }
  g.validate();
  return g;
}

void BipartiteGraph::validate() const {
  if (offsets.size() != n_texts + 1 || offsets.back() != concepts.size()) {
    throw ValidationError("BipartiteGraph: inconsistent offsets");
  }
  for (std::uint64_t t = 0; t < n_texts; ++t) {
    auto nb = neighbors(t);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] >= n_concepts) {
        throw ValidationError("BipartiteGraph: concept index out of range in text " +
                              std::to_string(t));
      }
      if (i > 0 && nb[i] <= nb[i - 1]) {
        throw ValidationError("BipartiteGraph: unsorted or duplicate edge in text " +
                              std::to_string(t));
      }
    }
  }
}

BipartiteGraph sample_graph(std::uint64_t concepts, std::uint64_t texts,
                            double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("sample_graph: p must lie in [0,1]");
  }
  if (concepts > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("sample_graph: too many concepts");
  }
  const double expected =
      static_cast<double>(concepts) * static_cast<double>(texts) * p;
  if (expected > kMaxExpectedEdges) {
    std::ostringstream msg;
    msg << "sample_graph: expected edge count " << expected << " exceeds cap "
        << kMaxExpectedEdges;
    throw BudgetExceeded(msg.str());
  }

  BipartiteGraph g;
  g.n_concepts = concepts;
  g.n_texts = texts;
  g.p = p;
  g.seed = seed;
  g.offsets.reserve(texts + 1);
  g.concepts.reserve(static_cast<std::size_t>(expected * 1.1) + 16);

  Rng rng(seed);
  const double log_q = std::log1p(-p);
  for (std::uint64_t t = 0; t < texts; ++t) {
    if (p >= 1.0) {
      for (std::uint64_t c = 0; c < concepts; ++c) {
        g.concepts.push_back(static_cast<std::uint32_t>(c));
      }
    } else if (p > 0.0) {
      // Geometric gaps between successive edges.
      double next = -1.0;
      for (;;) {
        const double gap = std::floor(std::log(rng.uniform_open_zero()) / log_q);
        next += gap + 1.0;
        if (next >= static_cast<double>(concepts)) break;
        g.concepts.push_back(static_cast<std::uint32_t>(next));
      }
    }
    g.offsets.push_back(g.concepts.size());
  }
  return g;
}

PeelingOutcome peel(const BipartiteGraph& graph, const PeelOptions& options) {
  return run_peeling(graph, {}, options);
}

PeelingOutcome peel_erasures(const BipartiteGraph& graph,
                             std::span<const std::uint8_t> known,
                             const PeelOptions& options) {
  if (known.size() != graph.n_concepts) {
    throw ValidationError("peel_erasures: mask size must equal n_concepts");
  }
  return run_peeling(graph, known, options);
}

bool residual_is_stopping_set(const BipartiteGraph& graph,
                              const PeelingOutcome& outcome) {
  std::vector<std::uint8_t> learned(graph.n_concepts, 0);
  for (std::uint32_t c : outcome.learned) learned[c] = 1;
  for (std::uint64_t t = 0; t < graph.n_texts; ++t) {
    int unknown = 0;
    for (std::uint32_t c : graph.neighbors(t)) unknown += learned[c] ? 0 : 1;
    if (unknown == 1) return false;
  }
  return true;
}

McEstimate mc_expected_learned(std::uint64_t concepts, std::uint64_t texts,
                               double text_degree, std::uint64_t trials,
                               std::uint64_t seed, unsigned threads) {
  if (trials == 0) throw ValidationError("mc_expected_learned: trials >= 1");
  if (concepts == 0) throw ValidationError("mc_expected_learned: R >= 1");
  const double p = text_degree / static_cast<double>(concepts);
  if (!(p > 0.0 && p <= 1.0)) {
    throw ValidationError("mc_expected_learned: need 0 < d_t <= R");
  }
  std::vector<double> learned(trials);
  parallel_for(
      trials,
      [&](std::size_t i) {
        const BipartiteGraph g =
            sample_graph(concepts, texts, p, stream_seed(seed, i));
        learned[i] = static_cast<double>(peel(g).learned.size());
      },
      threads);
  const MeanAndError s = summarize(learned);
  return {s.mean, s.std_error, trials};
}

ErasureTrial simulate_erasure_decoding(std::uint64_t parent_concepts,
                                       std::uint64_t erased,
                                       std::uint64_t texts, double p,
                                       std::uint64_t seed) {
  if (erased > parent_concepts) {
    throw ValidationError("simulate_erasure_decoding: erased > concepts");
  }
  Rng rng(mix64(seed ^ 0x5bd1e995ULL));
  const BipartiteGraph g = sample_graph(parent_concepts, texts, p, seed);

  // Partial Fisher-Yates picks exactly `erased` concepts.
  std::vector<std::uint32_t> perm(parent_concepts);
  for (std::uint64_t i = 0; i < parent_concepts; ++i) {
    perm[i] = static_cast<std::uint32_t>(i);
  }
  std::vector<std::uint8_t> known(parent_concepts, 1);
  for (std::uint64_t i = 0; i < erased; ++i) {
    const std::uint64_t j = i + rng.below(parent_concepts - i);
    std::swap(perm[i], perm[j]);
    known[perm[i]] = 0;
  }
  const PeelingOutcome out = peel_erasures(g, known);
  return {parent_concepts, erased, out.unlearned_count};
}

ErasureEstimate mc_parent_graph_erasure(const DegreeModel& model,
                                        std::uint64_t trials,
                                        std::uint64_t seed, unsigned threads) {
  if (trials == 0) throw ValidationError("mc_parent_graph_erasure: trials >= 1");
  const auto n = static_cast<std::uint64_t>(std::ceil(model.parent_concepts()));
  const std::uint64_t erased = model.concepts();
  std::vector<double> pb(trials), unlearned(trials);
  parallel_for(
      trials,
      [&](std::size_t i) {
        const ErasureTrial r = simulate_erasure_decoding(
            n, erased, model.texts(), model.edge_probability(),
            stream_seed(seed, i));
        pb[i] = static_cast<double>(r.unrecovered) / static_cast<double>(n);
        unlearned[i] =
            static_cast<double>(r.unrecovered) / static_cast<double>(erased);
      },
      threads);
  const MeanAndError a = summarize(pb);
  const MeanAndError b = summarize(unlearned);
  return {a.mean, a.std_error, b.mean, b.std_error, trials};
}

void write_graph_dump(std::ostream& out, const BipartiteGraph& graph) {
  out << "R=" << graph.n_concepts << " T=" << graph.n_texts
      << " p=" << std::setprecision(17) << graph.p << " seed=" << graph.seed
      << '\n';
  for (std::uint64_t t = 0; t < graph.n_texts; ++t) {
    out << "t " << t << ':';
    for (std::uint32_t c : graph.neighbors(t)) out << ' ' << c;
    out << '\n';
  }
}

BipartiteGraph read_graph_dump(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("graph dump: missing header");
  }
  BipartiteGraph g;
  {
    unsigned long long r = 0, t = 0, seed = 0;
    double p = 0.0;
    if (std::sscanf(line.c_str(), "R=%llu T=%llu p=%lf seed=%llu", &r, &t, &p,
                    &seed) != 4) {
      throw ValidationError("graph dump: malformed header: " + line);
    }
    g.n_concepts = r;
    g.n_texts = t;
    g.p = p;
    g.seed = seed;
  }
  g.offsets.assign(1, 0);
  for (std::uint64_t t = 0; t < g.n_texts; ++t) {
    if (!std::getline(in, line)) {
      throw ValidationError("graph dump: expected " + std::to_string(g.n_texts) +
                            " text lines");
    }
    std::istringstream row(line);
    std::string tag, id;
    row >> tag >> id;
    if (tag != "t" || id != std::to_string(t) + ":") {
      throw ValidationError("graph dump: bad text line: " + line);
    }
    std::uint64_t c;
    while (row >> c) g.concepts.push_back(static_cast<std::uint32_t>(c));
    g.offsets.push_back(g.concepts.size());
  }
  g.validate();
  return g;
}

}  // namespace scaling_lens
