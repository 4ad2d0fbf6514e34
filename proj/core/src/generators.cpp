#include "roundcover/generators.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace roundcover {

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

std::vector<Cost> draw_costs(std::size_t m, CostMode mode, Rng& rng) {
  std::vector<Cost> costs(m, 1);
  if (mode == CostMode::kRandom) {
    static constexpr Cost kValues[] = {1, 4, 7, 10};
    static constexpr double kWeights[] = {0.1, 0.2, 0.4, 0.3};
    for (auto& c : costs) c = kValues[rng.weighted_index(kWeights)];
  }
  return costs;
}

std::string cost_mode_name(CostMode mode) { return mode == CostMode::kUnit ? "unit" : "random"; }

}  // namespace

Graph parse_edge_list(std::string_view text) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto c = line.find_first_of("#%"); c != std::string_view::npos) line = line.substr(0, c);
    std::uint64_t ids[2];
    int found = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r' || line[i] == ',') {
        ++i;
        continue;
      }
      if (found == 2) throw InputError("edge list line " + std::to_string(line_no) + ": expected two node ids");
      auto [p, ec] = std::from_chars(line.data() + i, line.data() + line.size(), ids[found]);
      if (ec != std::errc()) throw InputError("edge list line " + std::to_string(line_no) + ": bad node id");
      i = static_cast<std::size_t>(p - line.data());
      ++found;
    }
    if (found == 0) continue;
    if (found != 2) throw InputError("edge list line " + std::to_string(line_no) + ": expected two node ids");
    raw.emplace_back(ids[0], ids[1]);
  }
  std::map<std::uint64_t, std::uint32_t> index;
  for (const auto& [u, v] : raw) {
    index.emplace(u, 0);
    index.emplace(v, 0);
  }
  std::uint32_t next = 0;
  for (auto& [label, id] : index) id = next++;
  Graph g;
  g.nodes = index.size();
  for (const auto& [u, v] : raw) g.edges.emplace_back(index[u], index[v]);
  return g;
}

Graph top_out_degree_subgraph(const Graph& g, std::size_t k) {
  std::vector<std::size_t> degree(g.nodes, 0);
  for (const auto& [u, v] : g.edges) ++degree[u];
  std::vector<std::uint32_t> order(g.nodes);
  std::iota(order.begin(), order.end(), 0U);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return degree[a] > degree[b]; });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  std::vector<std::int64_t> remap(g.nodes, -1);
  for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<std::int64_t>(i);
  Graph out;
  out.nodes = order.size();
  for (const auto& [u, v] : g.edges) {
    if (remap[u] >= 0 && remap[v] >= 0) {
      out.edges.emplace_back(static_cast<std::uint32_t>(remap[u]), static_cast<std::uint32_t>(remap[v]));
    }
  }
  return out;
}

Graph random_graph(std::size_t nodes, double edge_p, std::uint64_t seed) {
  if (!(edge_p >= 0 && edge_p <= 1)) throw InputError("edge probability must lie in [0, 1]");
  Rng rng(seed);
  Graph g;
  g.nodes = nodes;
  for (std::uint32_t u = 0; u < nodes; ++u) {
    for (std::uint32_t v = 0; v < nodes; ++v) {
      if (u != v && rng.bernoulli(edge_p)) g.edges.emplace_back(u, v);
    }
  }
  return g;
}

IndependentInstance gen_graph_coverage(const Graph& g, double p, std::size_t samples, const Rational& delta,
                                       std::uint64_t seed) {
  if (g.nodes == 0) throw InputError("graph coverage needs a non-empty graph");
  if (!(p > 0 && p <= 1)) throw InputError("p must lie in (0, 1]");
  if (samples < 1) throw InputError("samples must be >= 1");
  if (delta <= 0 || delta > 1) throw InputError("delta must lie in (0, 1]");
  const std::size_t n = g.nodes;
  std::vector<std::vector<std::uint32_t>> out(n);
  for (const auto& [u, v] : g.edges) {
    if (u >= n || v >= n) throw InputError("edge endpoint out of range");
    if (u != v) out[u].push_back(v);
  }
  Rng rng(seed);
  std::vector<IndependentItem> items(n);
  for (std::uint32_t u = 0; u < n; ++u) {
    auto& nbrs = out[u];
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    std::unordered_map<ElementSet, std::size_t, ElementSetHash> counts;
    for (std::size_t t = 0; t < samples; ++t) {
      ElementSet s(n, {u});
      for (std::uint32_t v : nbrs) {
        if (rng.bernoulli(p)) s.insert(v);
      }
      ++counts[s];
    }
    std::vector<std::pair<ElementSet, std::size_t>> support(counts.begin(), counts.end());
    std::sort(support.begin(), support.end(), [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
    items[u].cost = 1;
    for (auto& [s, c] : support) {
      items[u].outcomes.push_back({std::move(s), ratio(BigInt(static_cast<unsigned long>(c)),
                                                       BigInt(static_cast<unsigned long>(samples)))});
    }
  }
  const Value q = static_cast<Value>(ceil(delta * Rational(BigInt(static_cast<unsigned long>(n)))).get_si());
  Metadata meta{{"generator", "graph"},
                {"nodes", std::to_string(n)},
                {"edges", std::to_string(g.edges.size())},
                {"p", format_double(p)},
                {"samples", std::to_string(samples)},
                {"delta", to_string(delta)},
                {"seed", std::to_string(seed)}};
  return IndependentInstance(std::make_shared<TruncatedCoverage>(n, q), std::move(items), std::move(meta));
}

ScenarioInstance odt_from_matrix(const std::vector<std::vector<bool>>& rows, std::vector<Cost> costs,
                                 Metadata metadata) {
  if (rows.empty()) throw InputError("test matrix is empty");
  const std::size_t m = rows.front().size();
  if (m == 0) throw InputError("test matrix has no tests");
  for (const auto& row : rows) {
    if (row.size() != m) throw InputError("test matrix rows differ in length");
  }
  if (costs.size() != m) throw InputError("one cost per test required");
  std::vector<const std::vector<bool>*> kept;
  std::set<std::vector<bool>> seen;
  for (const auto& row : rows) {
    if (seen.insert(row).second) kept.push_back(&row);
  }
  const std::size_t s = kept.size();
  if (s < 2) throw InputError("all scenarios coincide after removing duplicates");

  std::vector<ScenarioItem> items(m);
  for (std::size_t e = 0; e < m; ++e) {
    ElementSet in(s);
    for (std::size_t y = 0; y < s; ++y) {
      if ((*kept[y])[e]) in.insert(static_cast<Element>(y));
    }
    ElementSet complement = ElementSet::full(s);
    complement.subtract(in);
    std::vector<OutcomeIndex> per(s);
    for (std::size_t y = 0; y < s; ++y) per[y] = in.contains(static_cast<Element>(y)) ? 0 : 1;
    items[e].cost = costs[e];
    items[e].outcomes = {std::move(complement), std::move(in)};
    items[e].assignment = OutcomeAssignment::dense(std::move(per));
  }
  metadata["scenarios_input"] = std::to_string(rows.size());
  metadata["scenarios_distinct"] = std::to_string(s);
  std::vector<Rational> probs(s, Rational(BigInt(1), BigInt(static_cast<unsigned long>(s))));
  return ScenarioInstance(std::make_shared<TruncatedCoverage>(s, static_cast<Value>(s - 1)), std::move(items),
                          std::move(probs), std::move(metadata));
}

ScenarioInstance gen_odt(std::size_t s, std::size_t m, double p, CostMode cost_mode, std::uint64_t seed) {
  if (s < 2 || m < 1) throw InputError("odt needs s >= 2 and m >= 1");
  if (!(p > 0 && p < 1)) throw InputError("p must lie in (0, 1)");
  Rng rng(seed);
  std::vector<std::vector<bool>> rows(s, std::vector<bool>(m));
  for (auto& row : rows) {
    for (std::size_t e = 0; e < m; ++e) row[e] = rng.bernoulli(p);
  }
  auto costs = draw_costs(m, cost_mode, rng);
  Metadata meta{{"generator", "odt"},
                {"s", std::to_string(s)},
                {"m", std::to_string(m)},
                {"p", format_double(p)},
                {"cost_mode", cost_mode_name(cost_mode)},
                {"seed", std::to_string(seed)}};
  return odt_from_matrix(rows, std::move(costs), std::move(meta));
}

std::vector<std::vector<char>> parse_test_table(std::string_view text) {
  std::vector<std::vector<char>> table;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    std::vector<char> row;
    for (char c : line) {
      if (c == '0' || c == '1' || c == '?') {
        row.push_back(c);
      } else if (c != ',' && c != ' ' && c != '\t' && c != '\r') {
        throw InputError(std::string("test table: unexpected character '") + c + "'");
      }
    }
    if (!row.empty()) table.push_back(std::move(row));
  }
  return table;
}

ScenarioInstance gen_odt_from_table(const std::vector<std::vector<char>>& table, CostMode cost_mode,
                                    std::uint64_t seed) {
  if (table.empty() || table.front().empty()) throw InputError("test table is empty");
  Rng rng(seed);
  std::size_t unknown = 0;
  std::vector<std::vector<bool>> rows;
  for (const auto& r : table) {
    std::vector<bool> row(r.size());
    for (std::size_t e = 0; e < r.size(); ++e) {
      if (r[e] == '?') {
        row[e] = rng.bernoulli(0.5);
        ++unknown;
      } else {
        row[e] = r[e] == '1';
      }
    }
    rows.push_back(std::move(row));
  }
  auto costs = draw_costs(table.front().size(), cost_mode, rng);
  Metadata meta{{"generator", "odt-table"},
                {"unknown_entries", std::to_string(unknown)},
                {"cost_mode", cost_mode_name(cost_mode)},
                {"seed", std::to_string(seed)}};
  return odt_from_matrix(rows, std::move(costs), std::move(meta));
}

std::uint64_t HardInstanceLayout::item_count() const {
  return static_cast<std::uint64_t>(ell) * ((leaves - 1) / (arity - 1)) + leaves;
}

ItemId HardInstanceLayout::y_item(int depth, std::uint64_t node, int bit) const {
  std::uint64_t before = 0;
  std::uint64_t width = 1;
  for (int d = 0; d < depth; ++d) {
    before += width;
    width *= arity;
  }
  return static_cast<ItemId>((before + node) * static_cast<std::uint64_t>(ell) + static_cast<std::uint64_t>(bit));
}

ItemId HardInstanceLayout::z_item(std::uint64_t leaf) const {
  return static_cast<ItemId>(static_cast<std::uint64_t>(ell) * ((leaves - 1) / (arity - 1)) + leaf);
}

HardInstanceLayout hard_instance_layout(int ell, int r) {
  if (ell < 1 || r < 1) throw InputError("hard instance needs ell >= 1 and r >= 1");
  if (ell * r > 20) throw SizeGuardError("hard instance needs r * ell <= 20 (2^(r*ell) scenarios)");
  HardInstanceLayout layout;
  layout.ell = ell;
  layout.r = r;
  layout.arity = std::uint64_t{1} << ell;
  layout.leaves = std::uint64_t{1} << (ell * r);
  return layout;
}

ScenarioInstance gen_hard_instance(int ell, int r) {
  const HardInstanceLayout layout = hard_instance_layout(ell, r);
  const std::uint64_t s = layout.leaves;
  const std::uint64_t n_arity = layout.arity;
  std::vector<ScenarioItem> items(layout.item_count());

  std::uint64_t width = 1;  // nodes at this depth
  for (int depth = 0; depth < r; ++depth, width *= n_arity) {
    const std::uint64_t subtree = s / width;  // leaves below a node at this depth
    const std::uint64_t child = subtree / n_arity;
    for (std::uint64_t node = 0; node < width; ++node) {
      for (int bit = 0; bit < ell; ++bit) {
        std::vector<std::pair<ScenarioId, OutcomeIndex>> ones;
        for (std::uint64_t w = node * subtree; w < (node + 1) * subtree; ++w) {
          const std::uint64_t b = (w / child) % n_arity;
          if ((b >> (ell - 1 - bit)) & 1U) ones.emplace_back(static_cast<ScenarioId>(w), 1);
        }
        auto& item = items[layout.y_item(depth, node, bit)];
        item.cost = 1;
        item.outcomes = {ElementSet(4, {0}), ElementSet(4, {1})};
        item.assignment = OutcomeAssignment::sparse(s, 0, std::move(ones));
      }
    }
  }
  for (std::uint64_t leaf = 0; leaf < s; ++leaf) {
    auto& item = items[layout.z_item(leaf)];
    item.cost = 1;
    item.outcomes = {ElementSet(4, {3}), ElementSet(4, {2})};
    item.assignment = OutcomeAssignment::sparse(s, 0, {{static_cast<ScenarioId>(leaf), 1}});
  }
  std::vector<Rational> probs(s, Rational(BigInt(1), BigInt(static_cast<unsigned long>(s))));
  Metadata meta{{"generator", "hard"}, {"ell", std::to_string(ell)}, {"r", std::to_string(r)}};
  auto f = std::make_shared<TruncatedCoverage>(4, 1, ElementSet(4, {2}));
  return ScenarioInstance(std::move(f), std::move(items), std::move(probs), std::move(meta));
}

PolicyTranscript hard_instance_top_down(const ScenarioInstance& instance, int ell, int r, RealizationSource& oracle) {
  const HardInstanceLayout layout = hard_instance_layout(ell, r);
  if (instance.item_count() != layout.item_count() || instance.scenario_count() != layout.leaves) {
    throw InputError("instance does not have the hard-instance layout for these parameters");
  }
  const Objective& f = *instance.objective();
  PolicyTranscript t;
  t.target = f.max_value();
  ElementSet realized(instance.groundset_size());
  auto probe = [&](RoundRecord& round, ItemId e) {
    const auto& item = instance.item(e);
    const ElementSet& x = item.outcomes.at(oracle.observe(e));
    round.probed.push_back(e);
    round.observed.push_back(x);
    round.cost += item.cost;
    realized |= x;
    return x;
  };
  std::uint64_t node = 0;
  for (int depth = 0; depth < r; ++depth) {
    RoundRecord round;
    round.kind = "top-down";
    std::uint64_t b = 0;
    for (int bit = 0; bit < ell; ++bit) b = 2 * b + (probe(round, layout.y_item(depth, node, bit)).contains(1) ? 1 : 0);
    node = node * layout.arity + b;
    round.value_after = f.value(realized);
    t.total_cost += round.cost;
    t.rounds.push_back(std::move(round));
  }
  RoundRecord last;
  last.kind = "top-down";
  probe(last, layout.z_item(node));
  last.value_after = f.value(realized);
  t.total_cost += last.cost;
  t.rounds.push_back(std::move(last));
  t.final_value = f.value(realized);
  t.covered = t.final_value == t.target;
  if (!t.covered) throw InvariantViolation("top-down policy did not find the active item");
  return t;
}

IndependentInstance gen_filter_eval(std::size_t n, std::vector<std::vector<std::uint32_t>> queries,
                                    std::vector<Rational> probs, std::vector<Cost> costs) {
  if (n == 0) throw InputError("filter evaluation needs at least one filter");
  if (probs.size() != n || costs.size() != n) throw InputError("one probability and one cost per filter required");
  for (const auto& q : queries) {
    if (q.empty()) throw InputError("queries must be non-empty");
  }
  std::vector<IndependentItem> items(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (probs[i] <= 0 || probs[i] > 1) throw InputError("filter probabilities must lie in (0, 1]");
    items[i].cost = costs[i];
    items[i].outcomes.push_back({ElementSet(2 * n, {FilterEval::true_element(i)}), probs[i]});
    if (probs[i] < 1) items[i].outcomes.push_back({ElementSet(2 * n, {FilterEval::false_element(i)}), 1 - probs[i]});
  }
  Metadata meta{{"generator", "filter"}, {"filters", std::to_string(n)}, {"queries", std::to_string(queries.size())}};
  auto f = std::make_shared<FilterEval>(n, std::move(queries));
  return IndependentInstance(std::move(f), std::move(items), std::move(meta));
}

IndependentInstance random_filter_eval(std::size_t n, std::size_t queries, std::size_t query_size,
                                       std::uint64_t seed) {
  if (query_size < 1 || query_size > n) throw InputError("query size must lie in [1, n]");
  Rng rng(seed);
  std::vector<std::vector<std::uint32_t>> qs(queries);
  for (auto& q : qs) {
    std::vector<std::uint32_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0U);
    for (std::size_t i = 0; i < query_size; ++i) {
      std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
    }
    q.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(query_size));
    std::sort(q.begin(), q.end());
  }
  std::vector<Rational> probs(n);
  std::vector<Cost> costs(n);
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = ratio(BigInt(static_cast<long>(1 + rng.uniform_index(9))), BigInt(10));
    costs[i] = static_cast<Cost>(1 + rng.uniform_index(4));
  }
  auto inst = gen_filter_eval(n, std::move(qs), std::move(probs), std::move(costs));
  Metadata meta = inst.metadata();
  meta["seed"] = std::to_string(seed);
  meta["query_size"] = std::to_string(query_size);
  return IndependentInstance(inst.objective(), inst.items(), std::move(meta));
}

ScenarioInstance gen_correlated_knapsack(const std::vector<std::vector<Value>>& values, std::vector<Rational> probs,
                                         std::vector<Cost> costs, Value q) {
  if (q < 1) throw InputError("knapsack target Q must be >= 1");
  if (values.empty()) throw InputError("knapsack needs at least one scenario");
  const std::size_t m = values.front().size();
  if (m == 0 || costs.size() != m) throw InputError("knapsack needs one cost per item");
  if (probs.size() != values.size()) throw InputError("knapsack needs one probability per scenario");
  for (std::size_t w = 0; w < values.size(); ++w) {
    if (values[w].size() != m) throw InputError("knapsack value rows differ in length");
    Value total = 0;
    for (Value a : values[w]) {
      if (a < 0) throw InputError("knapsack values must be non-negative");
      total += std::min(a, q);
    }
    if (total < q) throw InfeasibleError("knapsack scenario " + std::to_string(w) + " cannot reach Q");
  }
  // element ids: (item, clamped value) pairs in item-then-value order
  std::vector<std::map<Value, Element>> ids(m);
  for (const auto& row : values) {
    for (std::size_t i = 0; i < m; ++i) ids[i].emplace(std::min(row[i], q), 0);
  }
  std::vector<Value> element_values;
  for (auto& per_item : ids) {
    for (auto& [v, id] : per_item) {
      id = static_cast<Element>(element_values.size());
      element_values.push_back(v);
    }
  }
  const std::size_t n = element_values.size();
  std::vector<ScenarioItem> items(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::map<Value, OutcomeIndex> outcome_of;
    for (const auto& [v, id] : ids[i]) {
      outcome_of[v] = static_cast<OutcomeIndex>(items[i].outcomes.size());
      items[i].outcomes.push_back(ElementSet(n, {id}));
    }
    std::vector<OutcomeIndex> per(values.size());
    for (std::size_t w = 0; w < values.size(); ++w) per[w] = outcome_of[std::min(values[w][i], q)];
    items[i].cost = costs[i];
    items[i].assignment = OutcomeAssignment::dense(std::move(per));
  }
  Metadata meta{{"generator", "knapsack"}, {"q", std::to_string(q)}};
  return ScenarioInstance(std::make_shared<TruncatedAdditive>(std::move(element_values), q), std::move(items),
                          normalize_probabilities(std::move(probs), "scenario probabilities"), std::move(meta));
}

ScenarioInstance random_correlated_knapsack(std::size_t scenarios, std::size_t items, Value max_value, Value q,
                                            std::uint64_t seed) {
  if (scenarios < 1 || items < 1 || max_value < 1) throw InputError("knapsack needs scenarios, items, max value >= 1");
  if (static_cast<Value>(items) * std::min(max_value, q) < q) throw InputError("knapsack target is unreachable");
  Rng rng(seed);
  std::vector<std::vector<Value>> values(scenarios, std::vector<Value>(items));
  for (auto& row : values) {
    do {
      Value total = 0;
      for (auto& a : row) {
        a = static_cast<Value>(rng.uniform_index(static_cast<std::uint64_t>(max_value) + 1));
        total += std::min(a, q);
      }
      if (total >= q) break;
    } while (true);
  }
  std::vector<Rational> probs(scenarios, Rational(BigInt(1), BigInt(static_cast<unsigned long>(scenarios))));
  std::vector<Cost> costs(items);
  for (auto& c : costs) c = static_cast<Cost>(1 + rng.uniform_index(10));
  auto inst = gen_correlated_knapsack(values, std::move(probs), std::move(costs), q);
  Metadata meta = inst.metadata();
  meta["seed"] = std::to_string(seed);
  meta["max_value"] = std::to_string(max_value);
  return ScenarioInstance(inst.objective(), inst.items(), inst.probabilities(), std::move(meta));
}

}  // namespace roundcover
