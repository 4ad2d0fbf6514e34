#include "roundcover/transcript.hpp"

#include <json.hpp>
#include <unordered_set>

namespace roundcover {

std::vector<ItemId> PolicyTranscript::probed_items() const {
  std::vector<ItemId> out;
  for (const auto& r : rounds) out.insert(out.end(), r.probed.begin(), r.probed.end());
  return out;
}

std::size_t PolicyTranscript::probe_count() const {
  std::size_t n = 0;
  for (const auto& r : rounds) n += r.probed.size();
  return n;
}

void check_transcript(const PolicyTranscript& t, const std::vector<Cost>& item_costs) {
  std::unordered_set<ItemId> seen;
  Cost total = 0;
  for (const auto& r : t.rounds) {
    Cost round_cost = 0;
    if (r.observed.size() != r.probed.size()) throw InvariantViolation("round records a probe without observation");
    for (ItemId id : r.probed) {
      if (id >= item_costs.size()) throw InvariantViolation("transcript probes an unknown item");
      if (!seen.insert(id).second) throw InvariantViolation("item " + std::to_string(id) + " probed twice");
      round_cost += item_costs[id];
    }
    if (round_cost != r.cost) throw InvariantViolation("round cost differs from the sum of its probes");
    total += round_cost;
  }
  if (total != t.total_cost) throw InvariantViolation("total cost differs from the sum of probed costs");
  if (t.covered != (t.final_value == t.target)) throw InvariantViolation("covered flag disagrees with final value");
}

std::string transcript_to_json(const PolicyTranscript& t) {
  nlohmann::json j;
  j["total_cost"] = t.total_cost;
  j["covered"] = t.covered;
  j["final_value"] = t.final_value;
  j["target"] = t.target;
  j["rounds"] = nlohmann::json::array();
  for (const auto& r : t.rounds) {
    nlohmann::json jr;
    jr["kind"] = r.kind;
    jr["delta"] = r.delta;
    if (!r.epsilon.empty()) jr["epsilon"] = r.epsilon;
    jr["probed"] = r.probed;
    nlohmann::json observed = nlohmann::json::array();
    for (const auto& s : r.observed) observed.push_back(s.elements());
    jr["observed"] = std::move(observed);
    jr["cost"] = r.cost;
    jr["value_after"] = r.value_after;
    jr["compatible_after"] = r.compatible_after;
    j["rounds"].push_back(std::move(jr));
  }
  return j.dump();
}

}  // namespace roundcover
