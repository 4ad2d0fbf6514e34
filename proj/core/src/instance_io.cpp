#include "roundcover/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace roundcover {

using nlohmann::json;

namespace {

// Exact rational from a JSON number or "n/d" / decimal string. Doubles are
// first printed in shortest round-trip form, so 0.1 reads as 1/10.
Rational rational_from(const json& j, const std::string& what) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(std::to_string(j.get<std::int64_t>()));
  if (j.is_number_unsigned()) return Rational(std::to_string(j.get<std::uint64_t>()));
  if (j.is_number_float()) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, j.get<double>());
    if (ec != std::errc()) throw InputError(what + ": unprintable number");
    return parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)));
  }
  throw InputError(what + ": expected a number or rational string");
}

const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(what + ": missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T integer_from(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + ": expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0) throw InputError(what + ": expected a non-negative integer");
  return static_cast<T>(v);
}

ElementSet set_from(const json& j, std::size_t n, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array of element ids");
  ElementSet s(n);
  for (const auto& e : j) {
    const auto id = integer_from<std::uint64_t>(e, what);
    if (id >= n) throw InputError(what + ": element " + std::to_string(id) + " out of range");
    s.insert(static_cast<Element>(id));
  }
  return s;
}

std::vector<Value> values_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + ": expected an array");
  std::vector<Value> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw InputError(what + ": expected integers");
    out.push_back(v.get<Value>());
  }
  return out;
}

ObjectivePtr objective_from(const json& j, std::size_t n) {
  const std::string family = field(j, "family", "objective").get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (family == "truncated_coverage") {
    const auto q = field(params, "q", "objective").get<Value>();
    std::optional<ElementSet> relevant;
    if (params.contains("relevant")) relevant = set_from(params.at("relevant"), n, "objective.relevant");
    return std::make_shared<TruncatedCoverage>(n, q, std::move(relevant));
  }
  if (family == "weighted_truncated_coverage") {
    auto weights = values_from(field(params, "weights", "objective"), "objective.weights");
    if (weights.size() != n) throw InputError("objective.weights must have groundset_size entries");
    return std::make_shared<WeightedTruncatedCoverage>(std::move(weights), field(params, "q", "objective").get<Value>());
  }
  if (family == "truncated_additive") {
    auto values = values_from(field(params, "values", "objective"), "objective.values");
    if (values.size() != n) throw InputError("objective.values must have groundset_size entries");
    return std::make_shared<TruncatedAdditive>(std::move(values), field(params, "q", "objective").get<Value>());
  }
  if (family == "filter_eval") {
    const auto filters = integer_from<std::size_t>(field(params, "filters", "objective"), "objective.filters");
    if (2 * filters != n) throw InputError("filter_eval needs groundset_size = 2 * filters");
    std::vector<std::vector<std::uint32_t>> queries;
    for (const auto& q : field(params, "queries", "objective")) {
      std::vector<std::uint32_t> query;
      for (const auto& i : q) query.push_back(integer_from<std::uint32_t>(i, "objective.queries"));
      queries.push_back(std::move(query));
    }
    return std::make_shared<FilterEval>(filters, std::move(queries));
  }
  throw InputError("unknown objective family '" + family + "'");
}

json objective_to_json(const Objective& f) {
  json j;
  j["family"] = family_name(f.family());
  json params = json::object();
  if (const auto* tc = dynamic_cast<const TruncatedCoverage*>(&f)) {
    params["q"] = tc->max_value();
    if (tc->relevant()) params["relevant"] = tc->relevant()->elements();
  } else if (const auto* wc = dynamic_cast<const WeightedTruncatedCoverage*>(&f)) {
    params["q"] = wc->max_value();
    params["weights"] = wc->weights();
  } else if (const auto* ta = dynamic_cast<const TruncatedAdditive*>(&f)) {
    params["q"] = ta->max_value();
    params["values"] = ta->values();
  } else if (const auto* fe = dynamic_cast<const FilterEval*>(&f)) {
    params["filters"] = fe->filters();
    params["queries"] = fe->queries();
  } else {
    throw InputError("objective family '" + family_name(f.family()) + "' cannot be serialized");
  }
  j["params"] = std::move(params);
  return j;
}

Metadata metadata_from(const json& j) {
  Metadata out;
  if (!j.contains("metadata")) return out;
  for (const auto& [k, v] : j.at("metadata").items()) out[k] = v.is_string() ? v.get<std::string>() : v.dump();
  return out;
}

// Items sorted by their "id" field (which must be a permutation of 0..m-1),
// or taken in file order when ids are absent.
std::vector<const json*> ordered_items(const json& items) {
  if (!items.is_array()) throw InputError("'items' must be an array");
  std::vector<const json*> out(items.size(), nullptr);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const json& item = items[i];
    std::size_t id = i;
    if (item.contains("id")) id = integer_from<std::size_t>(item.at("id"), "item id");
    if (id >= items.size() || out[id] != nullptr) throw InputError("item ids must be a permutation of 0..m-1");
    out[id] = &item;
  }
  return out;
}

std::vector<Cost> costs_from(const std::vector<const json*>& items, Metadata& metadata) {
  std::vector<Rational> raw;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const json& item = *items[i];
    raw.push_back(item.contains("cost") ? rational_from(item.at("cost"), "item " + std::to_string(i) + " cost")
                                        : Rational(1));
  }
  ScaledCosts scaled = scale_costs(raw);
  if (scaled.factor != 1) metadata["cost_scale"] = to_string(scaled.factor);
  return scaled.costs;
}

IndependentInstance independent_from(const json& j, std::size_t n, ObjectivePtr f, Metadata metadata) {
  const auto items_json = ordered_items(field(j, "items", "instance"));
  const auto costs = costs_from(items_json, metadata);
  std::vector<IndependentItem> items;
  for (std::size_t i = 0; i < items_json.size(); ++i) {
    const std::string what = "item " + std::to_string(i);
    IndependentItem item;
    item.cost = costs[i];
    for (const auto& o : field(*items_json[i], "outcomes", what)) {
      item.outcomes.push_back(
          {set_from(field(o, "elements", what), n, what), rational_from(field(o, "probability", what), what)});
    }
    items.push_back(std::move(item));
  }
  return IndependentInstance(std::move(f), std::move(items), std::move(metadata));
}

ScenarioInstance scenario_from(const json& j, std::size_t n, ObjectivePtr f, Metadata metadata) {
  std::vector<Rational> probabilities;
  for (const auto& p : field(j, "scenarios", "instance")) probabilities.push_back(rational_from(p, "scenario"));
  const std::size_t s = probabilities.size();
  const auto items_json = ordered_items(field(j, "items", "instance"));
  const auto costs = costs_from(items_json, metadata);
  std::vector<ScenarioItem> items;
  for (std::size_t i = 0; i < items_json.size(); ++i) {
    const std::string what = "item " + std::to_string(i);
    const json& ij = *items_json[i];
    ScenarioItem item;
    item.cost = costs[i];
    for (const auto& o : field(ij, "outcomes", what)) item.outcomes.push_back(set_from(o, n, what));
    const json& a = field(ij, "assignment", what);
    if (a.is_array()) {
      if (a.size() != s) throw InputError(what + ": assignment must list every scenario");
      std::vector<OutcomeIndex> dense;
      for (const auto& o : a) dense.push_back(integer_from<OutcomeIndex>(o, what));
      item.assignment = OutcomeAssignment::dense(std::move(dense));
    } else {
      std::vector<std::pair<ScenarioId, OutcomeIndex>> exceptions;
      if (a.contains("exceptions")) {
        for (const auto& e : a.at("exceptions")) {
          if (!e.is_array() || e.size() != 2) throw InputError(what + ": exceptions are [scenario, outcome] pairs");
          exceptions.emplace_back(integer_from<ScenarioId>(e[0], what), integer_from<OutcomeIndex>(e[1], what));
        }
      }
      item.assignment = OutcomeAssignment::sparse(s, integer_from<OutcomeIndex>(field(a, "default", what), what),
                                                  std::move(exceptions));
    }
    items.push_back(std::move(item));
  }
  return ScenarioInstance(std::move(f), std::move(items), std::move(probabilities), std::move(metadata));
}

json metadata_to_json(const Metadata& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

json to_json(const IndependentInstance& inst) {
  json j;
  j["model"] = "independent";
  j["groundset_size"] = inst.groundset_size();
  j["objective"] = objective_to_json(*inst.objective());
  j["metadata"] = metadata_to_json(inst.metadata());
  json items = json::array();
  for (std::size_t i = 0; i < inst.item_count(); ++i) {
    const auto& item = inst.item(static_cast<ItemId>(i));
    json ji;
    ji["id"] = i;
    ji["cost"] = item.cost;
    json outcomes = json::array();
    for (const auto& o : item.outcomes) {
      outcomes.push_back({{"elements", o.elements.elements()}, {"probability", to_string(o.probability)}});
    }
    ji["outcomes"] = std::move(outcomes);
    items.push_back(std::move(ji));
  }
  j["items"] = std::move(items);
  return j;
}

json to_json(const ScenarioInstance& inst) {
  json j;
  j["model"] = "scenario";
  j["groundset_size"] = inst.groundset_size();
  j["objective"] = objective_to_json(*inst.objective());
  j["metadata"] = metadata_to_json(inst.metadata());
  json scenarios = json::array();
  for (const auto& p : inst.probabilities()) scenarios.push_back(to_string(p));
  j["scenarios"] = std::move(scenarios);
  json items = json::array();
  for (std::size_t i = 0; i < inst.item_count(); ++i) {
    const auto& item = inst.item(static_cast<ItemId>(i));
    json ji;
    ji["id"] = i;
    ji["cost"] = item.cost;
    json outcomes = json::array();
    for (const auto& o : item.outcomes) outcomes.push_back(o.elements());
    ji["outcomes"] = std::move(outcomes);
    if (item.assignment.is_dense()) {
      json dense = json::array();
      for (std::size_t w = 0; w < inst.scenario_count(); ++w) dense.push_back(item.assignment(static_cast<ScenarioId>(w)));
      ji["assignment"] = std::move(dense);
    } else {
      json exceptions = json::array();
      item.assignment.for_each_exception([&](ScenarioId w, OutcomeIndex o) { exceptions.push_back({w, o}); });
      ji["assignment"] = {{"default", item.assignment.default_outcome()}, {"exceptions", std::move(exceptions)}};
    }
    items.push_back(std::move(ji));
  }
  j["items"] = std::move(items);
  return j;
}

}  // namespace

Instance parse_instance(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed instance JSON: ") + e.what());
  }
  try {
    const std::string model = field(j, "model", "instance").get<std::string>();
    const auto n = integer_from<std::size_t>(field(j, "groundset_size", "instance"), "groundset_size");
    auto f = objective_from(field(j, "objective", "instance"), n);
    Metadata metadata = metadata_from(j);
    if (model == "independent") return independent_from(j, n, std::move(f), std::move(metadata));
    if (model == "scenario") return scenario_from(j, n, std::move(f), std::move(metadata));
    throw InputError("unknown model '" + model + "'");
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid instance JSON: ") + e.what());
  }
}

std::string serialize_instance(const Instance& instance) {
  return std::visit([](const auto& inst) { return to_json(inst).dump() + "\n"; }, instance);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

Instance load_instance(const std::string& path) { return parse_instance(read_text_file(path)); }

void save_instance(const Instance& instance, const std::string& path) {
  write_text_file(path, serialize_instance(instance));
}

std::string model_name(const Instance& instance) {
  return std::holds_alternative<IndependentInstance>(instance) ? "independent" : "scenario";
}

}  // namespace roundcover
