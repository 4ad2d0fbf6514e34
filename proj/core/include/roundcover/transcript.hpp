#pragma once

#include <string>
#include <vector>

#include "roundcover/element_set.hpp"
#include "roundcover/types.hpp"

namespace roundcover {

struct RoundRecord {
  std::string kind;     // "parca", "sparca", "sspc", "batch"
  std::string delta;    // effective delta, exact text (may be "(a/b)^(1/d)")
  std::string epsilon;  // SSPC only
  std::vector<ItemId> probed;
  std::vector<ElementSet> observed;  // realization of probed[i]
  Cost cost = 0;
  Value value_after = 0;             // f over everything realized so far
  std::size_t compatible_after = 0;  // scenario model: |H| after the round
};

struct PolicyTranscript {
  std::vector<RoundRecord> rounds;
  Cost total_cost = 0;
  bool covered = false;
  Value final_value = 0;
  Value target = 0;

  std::size_t rounds_used() const { return rounds.size(); }
  std::vector<ItemId> probed_items() const;
  std::size_t probe_count() const;
};

// Throws InvariantViolation if total_cost differs from the sum of probed
// costs, an item is probed twice, round costs do not add up, or covered
// disagrees with final_value == target.
void check_transcript(const PolicyTranscript& t, const std::vector<Cost>& item_costs);

std::string transcript_to_json(const PolicyTranscript& t);

}  // namespace roundcover
