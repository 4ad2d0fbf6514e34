#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roundcover/instance.hpp"
#include "roundcover/realization.hpp"
#include "roundcover/transcript.hpp"

namespace roundcover {

// Directed graph on nodes 0..nodes-1.
struct Graph {
  std::size_t nodes = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

// Whitespace separated "u v" lines, '#' or '%' comments. Node labels are
// arbitrary non-negative integers, renumbered in increasing order.
Graph parse_edge_list(std::string_view text);
// Subgraph induced by the k nodes of largest out-degree (lower label first
// on ties), renumbered in label order.
Graph top_out_degree_subgraph(const Graph& g, std::size_t k);
// Each ordered pair (u, v), u != v, is an edge with probability edge_p.
Graph random_graph(std::size_t nodes, double edge_p, std::uint64_t seed);

// One item per node. Item u's distribution is the empirical distribution of
// `samples` draws of {u} plus a Binomial(p) subset of u's out-neighbours.
// Unit costs, Q = ceil(delta * n).
IndependentInstance gen_graph_coverage(const Graph& g, double p, std::size_t samples, const Rational& delta,
                                       std::uint64_t seed);

enum class CostMode { kUnit, kRandom };  // random: {1,4,7,10} w.p. {.1,.2,.4,.3}

// Optimal decision tree reduction. Scenario rows of a 0/1 test matrix become
// elements; test e realizes to the scenarios it rules out. f = min(|S|, s'-1)
// with s' the number of distinct rows, uniform prior.
ScenarioInstance odt_from_matrix(const std::vector<std::vector<bool>>& rows, std::vector<Cost> costs,
                                 Metadata metadata);
// Random s x m matrix with P(entry = 1) = p.
ScenarioInstance gen_odt(std::size_t s, std::size_t m, double p, CostMode cost_mode, std::uint64_t seed);

// Rows of '0', '1' or '?' separated by commas or whitespace.
std::vector<std::vector<char>> parse_test_table(std::string_view text);
// Unknown entries drawn uniformly, then as odt_from_matrix.
ScenarioInstance gen_odt_from_table(const std::vector<std::vector<char>>& table, CostMode cost_mode,
                                    std::uint64_t seed);

// Depth-r, 2^ell-ary tree instance with 2^(r*ell) uniform scenarios.
// Elements 0, 1, star (2), bottom (3); f(S) = |S ∩ {star}|, unit costs.
// Items: ell Y-items per internal node in breadth-first node order, then one
// Z-item per leaf in leaf order. Scenario w is leaf w. Requires r*ell <= 20.
ScenarioInstance gen_hard_instance(int ell, int r);

struct HardInstanceLayout {
  int ell = 0;
  int r = 0;
  std::uint64_t arity = 0;  // N = 2^ell
  std::uint64_t leaves = 0;

  std::uint64_t item_count() const;
  ItemId y_item(int depth, std::uint64_t node, int bit) const;  // node: index within its depth
  ItemId z_item(std::uint64_t leaf) const;
};

HardInstanceLayout hard_instance_layout(int ell, int r);

// Probe Y(root), decode the child index, descend; finally probe the
// indicated Z-item. One transcript round per depth plus one for Z.
PolicyTranscript hard_instance_top_down(const ScenarioInstance& instance, int ell, int r, RealizationSource& oracle);

// Filter i realizes {T_i} with probability probs[i], else {F_i}.
IndependentInstance gen_filter_eval(std::size_t n, std::vector<std::vector<std::uint32_t>> queries,
                                    std::vector<Rational> probs, std::vector<Cost> costs);
IndependentInstance random_filter_eval(std::size_t n, std::size_t queries, std::size_t query_size,
                                       std::uint64_t seed);

// values[w][i] = a_i in scenario w. Elements are the distinct (item, value)
// pairs; item i realizes {(i, a_i(w))}. Values are clamped to Q. A scenario
// whose total is below Q makes the instance infeasible.
ScenarioInstance gen_correlated_knapsack(const std::vector<std::vector<Value>>& values, std::vector<Rational> probs,
                                         std::vector<Cost> costs, Value q);
ScenarioInstance random_correlated_knapsack(std::size_t scenarios, std::size_t items, Value max_value, Value q,
                                            std::uint64_t seed);

}  // namespace roundcover
