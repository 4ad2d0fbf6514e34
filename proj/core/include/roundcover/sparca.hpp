#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "roundcover/instance.hpp"
#include "roundcover/realization.hpp"
#include "roundcover/transcript.hpp"

namespace roundcover {

// delta = radicand^(1/degree) etc. epsilon set => SSPC stopping/large-part
// rule (f(R) <= Q(1 - epsilon) keeps probing); unset => classic SParCA
// (probe until covered).
struct SparcaConfig {
  RationalRoot delta{Rational(1), 1};
  std::optional<RationalRoot> epsilon;
};

// Which parts count as large: |Y| >= delta * s, and in SSPC mode also
// f(S(Y)) <= Q(1 - epsilon). s is the number of scenarios live when the
// call started, Q the residual target.
struct LargePartRule {
  RationalRoot delta{Rational(1), 1};
  std::optional<RationalRoot> epsilon;
  std::size_t scenarios = 0;
  Value q = 0;

  bool large_size(std::size_t part_size) const;
  bool below_target(Value v) const;  // SSPC: v <= Q(1 - epsilon); classic: always true
  bool large(std::size_t part_size, Value v) const { return large_size(part_size) && below_target(v); }
};

struct ScenarioPartition {
  // Parts ordered by their smallest scenario id; members sorted.
  std::vector<std::vector<ScenarioId>> parts;
  std::vector<ElementSet> realized;  // S(Y), realization of the prefix on part Y
  std::vector<Value> values;         // f(S(Y))
  std::vector<std::size_t> large;    // indices of large parts
};

// Groups `live` by realization vector on `prefix`.
ScenarioPartition partition_by_prefix(const ScenarioInstance& instance, const Objective& f,
                                      std::span<const ItemId> prefix, std::span<const ScenarioId> live,
                                      const LargePartRule& rule);

struct ItemSplit {
  std::vector<ScenarioId> big;     // B_e(Z)
  std::vector<ScenarioId> little;  // L_e(Z) = Z \ B_e(Z)
  OutcomeIndex big_outcome = 0;
};

// B_e(Z) is a largest class of Z under e's realization; equal sizes are
// resolved towards the lexicographically smallest realization.
ItemSplit split_by_item(const ScenarioInstance& instance, std::span<const ScenarioId> z, ItemId e);

// score(e) = 1/c_e * sum over large parts Z of
//   p(L_e(Z)) + sum_{w in Z} p_w (f(S(Z) + X_e(w)) - f(S(Z))) / (Q - f(S(Z))),
// the function term being 0 on parts with Q - f(S(Z)) = 0.
Rational scenario_score(const ScenarioInstance& instance, const Objective& f, Value q,
                        const ScenarioPartition& partition, ItemId e);

// Lazily built greedy list of one SParCA / SSPC call. Only large parts are
// tracked: a part that stops being large never becomes large again, since
// refining shrinks it and only adds realized elements.
class SparcaList {
 public:
  SparcaList(const ScenarioInstance& instance, ObjectivePtr f, std::vector<ItemId> available,
             std::vector<ScenarioId> live, const SparcaConfig& config);

  ItemId at(std::size_t i);
  std::size_t size() const { return available_.size(); }
  std::size_t built() const { return list_.size(); }
  const std::vector<ItemId>& materialize();
  const std::vector<Rational>& last_scores() const { return last_scores_; }
  const std::vector<ItemId>& available() const { return available_; }
  const LargePartRule& rule() const { return rule_; }
  const std::vector<ScenarioId>& live() const { return live_; }
  std::size_t tracked_parts() const { return parts_.size(); }

 private:
  struct Part {
    std::vector<ScenarioId> members;
    ElementSet realized;
    Value value;
  };

  void extend();
  void refine(ItemId e);

  const ScenarioInstance* instance_;
  ObjectivePtr f_;
  std::vector<ItemId> available_;
  std::vector<ScenarioId> live_;
  LargePartRule rule_;
  std::vector<bool> taken_;
  std::vector<ItemId> list_;
  std::vector<Rational> last_scores_;
  std::vector<Part> parts_;
};

class SparcaListCache {
 public:
  explicit SparcaListCache(std::size_t max_entries = 4096) : max_entries_(max_entries) {}
  // State = (probed items, live scenarios, rule parameters); the realized
  // set is implied since every live scenario agrees on the probed items.
  SparcaList& get(const ScenarioInstance& instance, const ObjectivePtr& base, const ElementSet& probed,
                  const std::vector<ScenarioId>& live, const ElementSet& realized, const SparcaConfig& config);
  std::size_t size() const { return entries_; }
  std::size_t hits() const { return hits_; }

 private:
  std::size_t max_entries_;
  std::size_t entries_ = 0;
  std::size_t hits_ = 0;
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::vector<std::uint64_t>, std::unique_ptr<SparcaList>>>>
      lists_;
};

std::unique_ptr<SparcaList> make_state_list(const ScenarioInstance& instance, const ObjectivePtr& base,
                                            const ElementSet& probed, const std::vector<ScenarioId>& live,
                                            const ElementSet& realized, const SparcaConfig& config);
std::vector<std::uint64_t> sparca_state_key(const ScenarioInstance& instance, const ElementSet& probed,
                                            const std::vector<ScenarioId>& live, const SparcaConfig& config);

struct SparcaResult {
  std::vector<ItemId> probed;
  std::vector<OutcomeIndex> outcomes;
  ElementSet realized;
  std::vector<ScenarioId> compatible;  // H
  Cost cost = 0;
  Value value = 0;
};

// Probes the list until |H| < delta*s or (classic) f(R) = Q / (SSPC)
// f(R) > Q(1 - epsilon). An observation that no live scenario explains is an
// InputError; running out of items first is an InvariantViolation.
SparcaResult sparca_probe(const ScenarioInstance& instance, const Objective& f, SparcaList& list,
                          RealizationSource& oracle);

// One SParCA (or SSPC) call on the whole instance.
SparcaResult sparca_run(const ScenarioInstance& instance, const SparcaConfig& config, RealizationSource& oracle);

// r-round recursion; round k uses delta = s_k^(-1/(r-k+1)) on the s_k
// surviving scenarios and the residual objective.
PolicyTranscript nsc_solve(int r, const ScenarioInstance& instance, RealizationSource& oracle,
                           SparcaListCache* cache = nullptr);

// Up to 2r SSPC rounds with delta = s^(-1/r) and epsilon = Q^(-1/r) (s, Q of
// the input), each applied to the current compatible set and residual target.
PolicyTranscript nsc2r_solve(int r, const ScenarioInstance& instance, RealizationSource& oracle,
                             SparcaListCache* cache = nullptr);

}  // namespace roundcover
