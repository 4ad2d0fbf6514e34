#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "roundcover/instance.hpp"
#include "roundcover/parca.hpp"
#include "roundcover/realization.hpp"
#include "roundcover/sparca.hpp"
#include "roundcover/transcript.hpp"

namespace roundcover {

enum class SetMode {
  kSmallR,  // r rounds, prefix budget ceil((r/eta) * mu)
  kLargeR,  // 2r (independent) / 4r (scenario) rounds, budget ceil(4 * mu)
};

struct SetRoundPolicy {
  SetMode mode = SetMode::kSmallR;
  int rounds = 1;         // r
  Rational eta{1, 5};     // small_r only, in (0, 1)
  std::size_t mu_trials = 200;
  std::uint64_t seed = 0;
  ParcaConfig parca;      // scoring options for the independent model
};

struct RoundCostEstimate {
  Rational mu;
  bool exact = false;
  std::size_t samples = 0;
};

// Expected cost of probing `list` under its stopping rule, conditioned on the
// current state. Exact when the outcome space is small (independent: product
// of supports of the list items <= exact_limit; scenario: <= exact_limit live
// scenarios), otherwise the mean over `trials` simulations seeded from `seed`.
RoundCostEstimate estimate_round_cost(const IndependentInstance& instance, const Objective& f, ParcaList& list,
                                      std::size_t trials, std::uint64_t seed, std::uint64_t exact_limit = 4096);
RoundCostEstimate estimate_round_cost(const ScenarioInstance& instance, const Objective& f, SparcaList& list,
                                      std::size_t trials, std::uint64_t seed, std::uint64_t exact_limit = 4096);

struct SetRoundTranscript {
  PolicyTranscript transcript;  // one "batch" record per round
  std::vector<bool> success;    // stopping rule fired inside the batch
  std::vector<Rational> mu;
  std::vector<Cost> budget;
  int round_limit = 0;

  std::size_t rounds_used() const { return transcript.rounds.size(); }
  bool covered() const { return transcript.covered; }
};

// Lists and round-cost estimates are pure functions of the state, so
// repeated trials share them through this cache. One per worker.
struct SetBasedCache {
  ParcaListCache parca;
  SparcaListCache sparca;
  std::map<std::vector<std::uint64_t>, RoundCostEstimate> mu;
};

// Runs the set-based conversion. Each round probes the whole budgeted prefix
// and pays for all of it. small_r stops after r rounds whether or not f is
// covered; large_r stops when covered or after its round limit.
SetRoundTranscript run_set_based(const SetRoundPolicy& policy, const IndependentInstance& instance,
                                 RealizationSource& oracle, SetBasedCache* cache = nullptr);
SetRoundTranscript run_set_based(const SetRoundPolicy& policy, const ScenarioInstance& instance,
                                 RealizationSource& oracle, SetBasedCache* cache = nullptr);

// The instance used to show that exact coverage is expensive in the
// set-based model: one element, Q = 1; item i < m costs 2^i and realizes the
// element with probability 1/2; item m costs 2^m and always realizes it.
IndependentInstance motivating_example(int m);

// Expected cost of probing the items in order 1..m until covered.
Rational motivating_permutation_cost(int m);

// Minimum expected cost over all r-round set-based policies that cover with
// probability 1, by enumerating every assignment of items to rounds (or to
// no round). Requires (r+1)^m <= 10^7.
Rational motivating_set_based_optimum(int m, int r);

}  // namespace roundcover
