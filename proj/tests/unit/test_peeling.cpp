#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "scaling_lens/errors.hpp"
#include "scaling_lens/peeling.hpp"
#include "scaling_lens/rng.hpp"
#include "scaling_lens/threshold.hpp"

using namespace scaling_lens;

namespace {

// Fixpoint by repeated full sweeps: learn every concept that is the only
// unlearned neighbour of some text, until a sweep changes nothing.
std::vector<std::uint32_t> fixpoint_oracle(const BipartiteGraph& g,
                                           const std::vector<std::uint8_t>& known = {}) {
  std::vector<std::uint8_t> learned(g.n_concepts, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint64_t t = 0; t < g.n_texts; ++t) {
      int unknown = 0;
      std::uint32_t last = 0;
      for (std::uint32_t c : g.neighbors(t)) {
        const bool k = learned[c] || (!known.empty() && known[c]);
        if (!k) {
          ++unknown;
          last = c;
        }
      }
      if (unknown == 1) {
        learned[last] = 1;
        changed = true;
      }
    }
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t c = 0; c < g.n_concepts; ++c) {
    if (learned[c]) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("sampling edge cases") {
  const BipartiteGraph empty = sample_graph(10, 10, 0.0, 1);
  CHECK(empty.edge_count() == 0);
  const BipartiteGraph full = sample_graph(3, 2, 1.0, 1);
  CHECK(full.edge_count() == 6);
  full.validate();
  CHECK(peel(full).learned.empty());
}

TEST_CASE("edge count concentrates around R T p") {
  const BipartiteGraph g = sample_graph(1000, 1000, 6e-3, 12345);
  g.validate();
  const double sigma = std::sqrt(1e6 * 6e-3 * (1 - 6e-3));
  CHECK(std::abs(static_cast<double>(g.edge_count()) - 6000.0) < 4 * sigma);
}

TEST_CASE("sampling is uniform over concepts") {
  std::vector<double> hits(50, 0.0);
  const BipartiteGraph g = sample_graph(50, 20000, 0.1, 3);
  for (std::uint64_t t = 0; t < g.n_texts; ++t) {
    for (std::uint32_t c : g.neighbors(t)) hits[c] += 1.0;
  }
  const double sigma = std::sqrt(20000 * 0.1 * 0.9);
  for (double h : hits) CHECK(std::abs(h - 2000.0) < 5 * sigma);
}

TEST_CASE("tiny hand-built graphs") {
  const auto one = BipartiteGraph::from_lists(1, {{0}});
  CHECK(peel(one).learned == std::vector<std::uint32_t>{0});
  const auto square = BipartiteGraph::from_lists(2, {{0, 1}, {0, 1}});
  const PeelingOutcome o = peel(square);
  CHECK(o.learned.empty());
  CHECK(o.unlearned_count == 2);
  CHECK(residual_is_stopping_set(square, o));
  const auto chain = BipartiteGraph::from_lists(3, {{0}, {0, 1}, {1, 2}});
  CHECK(peel(chain).learned == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(peel(chain).iterations == 3);
}

TEST_CASE("peel equals the fixpoint oracle and is order independent") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> up(0.05, 0.35);
  for (int g_i = 0; g_i < 100; ++g_i) {
    const BipartiteGraph g = sample_graph(12, 18, up(rng), rng());
    const PeelingOutcome base = peel(g);
    CHECK(base.learned == fixpoint_oracle(g));
    CHECK(base.learned.size() + base.unlearned_count == 12);
    CHECK(residual_is_stopping_set(g, base));
    for (std::uint64_t k = 0; k < 20; ++k) {
      PeelOptions opt;
      opt.order_seed = stream_seed(g_i, k);
      CHECK(peel(g, opt).learned == base.learned);
    }
  }
}

TEST_CASE("adding a text never shrinks the learned set") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> uc(0, 29);
  for (int i = 0; i < 100; ++i) {
    const BipartiteGraph g = sample_graph(30, 25, 0.08, rng());
    std::vector<std::vector<std::uint32_t>> lists;
    for (std::uint64_t t = 0; t < g.n_texts; ++t) {
      auto nb = g.neighbors(t);
      lists.emplace_back(nb.begin(), nb.end());
    }
    std::set<std::uint32_t> extra;
    const int k = 1 + uc(rng) % 4;
    while (static_cast<int>(extra.size()) < k) extra.insert(uc(rng));
    lists.emplace_back(extra.begin(), extra.end());
    const auto bigger = BipartiteGraph::from_lists(30, lists);
    const auto a = peel(g).learned, b = peel(bigger).learned;
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("erasure peeling against the oracle") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 50; ++i) {
    const BipartiteGraph g = sample_graph(40, 60, 0.06, rng());
    std::vector<std::uint8_t> known(40);
    for (auto& k : known) k = rng() % 2;
    const PeelingOutcome o = peel_erasures(g, known);
    CHECK(o.learned == fixpoint_oracle(g, known));
    const auto erased = std::count(known.begin(), known.end(), 0);
    CHECK(o.learned.size() + o.unlearned_count == static_cast<std::size_t>(erased));
  }
  const BipartiteGraph g = sample_graph(5, 5, 0.5, 1);
  CHECK_THROWS_AS(peel_erasures(g, std::vector<std::uint8_t>(4, 0)), ValidationError);
}

TEST_CASE("same seed, same graph and outcome") {
  const BipartiteGraph a = sample_graph(500, 800, 0.01, 99);
  const BipartiteGraph b = sample_graph(500, 800, 0.01, 99);
  CHECK(a.offsets == b.offsets);
  CHECK(a.concepts == b.concepts);
  CHECK(peel(a).learned == peel(b).learned);
  const BipartiteGraph c = sample_graph(500, 800, 0.01, 100);
  CHECK(a.concepts != c.concepts);
}

TEST_CASE("Monte-Carlo estimates do not depend on the thread count") {
  const McEstimate one = mc_expected_learned(300, 500, 4.0, 64, 5, 1);
  const McEstimate many = mc_expected_learned(300, 500, 4.0, 64, 5, 8);
  CHECK(one.mean == many.mean);
  CHECK(one.std_error == many.std_error);
  const DegreeModel m(300, 1200, 6.0);
  const ErasureEstimate e1 = mc_parent_graph_erasure(m, 40, 9, 1);
  const ErasureEstimate e8 = mc_parent_graph_erasure(m, 40, 9, 8);
  CHECK(e1.pb_mean == e8.pb_mean);
  CHECK(e1.pb_stderr == e8.pb_stderr);
}

TEST_CASE("mc_expected_learned trivial cases") {
  const McEstimate none = mc_expected_learned(100, 0, 2.0, 10, 1);
  CHECK(none.mean == 0.0);
  CHECK(none.std_error == 0.0);
  const McEstimate few = mc_expected_learned(1000, 10, 1.0, 200, 1);
  CHECK(few.mean <= 10.0);
  CHECK(few.mean > 0.0);
  CHECK_THROWS_AS(mc_expected_learned(100, 10, 1.0, 0, 1), ValidationError);
}

TEST_CASE("mc_expected_learned against the analytic prediction") {
  const DegreeModel m(200, 400, 4.0);
  const double predicted = 200.0 * (1.0 - analyze_model(m).prob_unlearned);
  const McEstimate e = mc_expected_learned(200, 400, 4.0, 2000, 31);
  const bool within_3sigma = std::abs(e.mean - predicted) <= 3 * e.std_error;
  const bool within_10pct = std::abs(e.mean - predicted) <= 0.1 * predicted;
  MESSAGE("MC " << e.mean << " +- " << e.std_error << ", predicted " << predicted);
  CHECK((within_3sigma || within_10pct));
}

TEST_CASE("parent-graph erasure trivial cases") {
  const ErasureTrial none = simulate_erasure_decoding(100, 0, 50, 0.05, 1);
  CHECK(none.unrecovered == 0);
  const ErasureTrial no_texts = simulate_erasure_decoding(100, 50, 0, 0.05, 1);
  CHECK(no_texts.unrecovered == 50);
  CHECK_THROWS_AS(simulate_erasure_decoding(10, 11, 5, 0.1, 1), ValidationError);
}

TEST_CASE("erasure pattern has exactly R erased concepts") {
  const DegreeModel m(101, 1, 1.0, 0.3);  // parent graph ceil(101/0.3) = 337
  const ErasureEstimate e = mc_parent_graph_erasure(m, 20, 4);
  // With one text almost nothing is recovered.
  CHECK(e.unlearned_mean > 0.95);
  CHECK(e.pb_mean == doctest::Approx(e.unlearned_mean * 101.0 / 337.0).epsilon(1e-12));
}

TEST_CASE("sampling budget cap") {
  CHECK_THROWS_AS(sample_graph(100000, 100000, 0.5, 1), BudgetExceeded);
  CHECK_THROWS_AS(sample_graph(10, 10, 1.5, 1), ValidationError);
}

TEST_CASE("graph dump round trip") {
  const BipartiteGraph g = sample_graph(40, 30, 0.1, 17);
  std::stringstream ss;
  write_graph_dump(ss, g);
  const std::string text = ss.str();
  CHECK(text.rfind("R=40 T=30 p=", 0) == 0);
  CHECK(text.find("seed=17\n") != std::string::npos);
  CHECK(text.find("\nt 0:") != std::string::npos);
  const BipartiteGraph back = read_graph_dump(ss);
  CHECK(back.n_concepts == 40);
  CHECK(back.n_texts == 30);
  CHECK(back.seed == 17);
  CHECK(back.p == g.p);
  CHECK(back.concepts == g.concepts);
  CHECK(back.offsets == g.offsets);
  std::stringstream bad("R=2 T=1 p=0.5 seed=1\nt 0: 0 5\n");
  CHECK_THROWS_AS(read_graph_dump(bad), ValidationError);
}

TEST_CASE("from_lists validation") {
  CHECK_THROWS_AS(BipartiteGraph::from_lists(3, {{0, 0}}), ValidationError);
  CHECK_THROWS_AS(BipartiteGraph::from_lists(3, {{3}}), ValidationError);
  const auto g = BipartiteGraph::from_lists(3, {{2, 0}});
  CHECK(g.concepts == std::vector<std::uint32_t>{0, 2});
}
