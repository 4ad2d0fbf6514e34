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

// Stopping threshold tau = Q(1 - delta) with delta rounded down to a power
// of two, 2^-t. Since f is integer valued, f(S) <= tau is the same test as
// f(S) <= floor(tau). A zero target is already met: below() is never true.
struct Threshold {
  Value q = 0;
  unsigned t = 0;
  Value tau_floor = 0;

  static Threshold from_delta(Value q, const RationalRoot& delta);
  static Threshold from_exponent(Value q, unsigned t);

  bool below(Value v) const { return v <= tau_floor; }
  Rational tau() const;
  Rational effective_delta() const;  // 2^-t
};

enum class Sampler { kExact, kSampled };

struct ParcaConfig {
  RationalRoot delta{Rational(1), 1};
  Sampler sampler = Sampler::kExact;
  std::uint64_t samples = 0;     // K; 0 selects default_sample_count
  double sample_constant = 4.0;  // C in the default K
  std::optional<Rational> epsilon;  // defaults to 1/(m^2 c_max)
  std::uint64_t seed = 0;
  // Exact mode refuses when the distribution of the list prefix's union
  // (restricted to f <= tau) has more support points than this.
  std::size_t max_support = 200000;
};

// C * m^2 * c_max * ceil(log2(m * c_max + 2)), capped at 10^6.
std::uint64_t default_sample_count(std::size_t m, Cost c_max, double constant = 4.0);
Rational default_epsilon(std::size_t m, Cost c_max);

// score(X_e) = 1/c_e * sum over prefix unions S with f(S) <= tau of
// Pr(S) * E[(f(S + X_e) - f(S)) / (Q - f(S))], computed exactly. `f` is the
// (possibly residual) objective; Q is threshold.q. Refuses with
// SizeGuardError when the prefix support product exceeds 10^6.
Rational score_exact(const IndependentInstance& instance, const Objective& f, const Threshold& threshold,
                     std::span<const ItemId> prefix, ItemId e);

// Unbiased estimate from K joint samples of (prefix, X_e), divided by c_e.
Rational score_sampled(const IndependentInstance& instance, const Objective& f, const Threshold& threshold,
                       std::span<const ItemId> prefix, ItemId e, std::uint64_t k, Rng& rng);

// The greedy list of one ParCA call, built lazily: at(i) computes list items
// up to position i on demand. Selection never looks at realizations, so the
// lazily built list is exactly the eagerly built one.
//
// Exact mode keeps the distribution of the prefix union restricted to
// f <= tau. Sampled mode keeps K persistent sample paths of the prefix; once
// every remaining item has estimated g_e < epsilon the rest of the list is
// filled in item-id order.
class ParcaList {
 public:
  ParcaList(const IndependentInstance& instance, ObjectivePtr f, std::vector<ItemId> available,
            Threshold threshold, const ParcaConfig& config);

  ItemId at(std::size_t i);
  std::size_t size() const { return available_.size(); }
  std::size_t built() const { return list_.size(); }
  const std::vector<ItemId>& materialize();
  // Exact scores (or estimates, divided by cost) of the candidates at the
  // most recent greedy step, indexed like available().
  const std::vector<Rational>& last_scores() const { return last_scores_; }
  const std::vector<ItemId>& available() const { return available_; }
  // Number of list items chosen by score before the epsilon fallback.
  std::size_t informed_prefix() const { return informed_; }
  const Threshold& threshold() const { return threshold_; }

 private:
  void extend();
  ItemId choose_exact();
  ItemId choose_sampled();
  void append_exact(ItemId e);
  void append_sampled(ItemId e);

  const IndependentInstance* instance_;
  ObjectivePtr f_;
  std::vector<ItemId> available_;
  Threshold threshold_;
  Sampler sampler_;
  std::size_t max_support_;
  std::vector<bool> taken_;
  std::vector<ItemId> list_;
  std::vector<Rational> last_scores_;
  std::size_t informed_ = 0;

  // exact
  struct Point {
    ElementSet set;
    Value value;
    Rational probability;
  };
  std::vector<Point> live_;

  // sampled
  std::uint64_t k_ = 0;
  Rational epsilon_;
  bool fallback_ = false;
  std::unique_ptr<Rng> rng_;
  std::vector<ElementSet> paths_;
  std::vector<Value> path_values_;
};

// Greedy lists keyed by (probed items, realized elements, t). Lists are pure
// functions of that state, so trials that reach the same state share one.
// Not thread safe; use one cache per worker.
class ParcaListCache {
 public:
  explicit ParcaListCache(std::size_t max_entries = 4096) : max_entries_(max_entries) {}
  ParcaList& get(const IndependentInstance& instance, const ObjectivePtr& base, const ElementSet& probed,
                 const ElementSet& realized, Threshold threshold, const ParcaConfig& config);
  std::size_t size() const { return lists_.size(); }
  std::size_t hits() const { return hits_; }

 private:
  std::size_t max_entries_;
  std::size_t hits_ = 0;
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::vector<std::uint64_t>, std::unique_ptr<ParcaList>>>>
      lists_;
  std::size_t entries_ = 0;
};

// Fresh list for the state (probed items, realized elements): candidates are
// the unprobed items, the objective is the residual of `base` at `realized`,
// and sampled mode derives its seed from config.seed and the state.
std::unique_ptr<ParcaList> make_state_list(const IndependentInstance& instance, const ObjectivePtr& base,
                                           const ElementSet& probed, const ElementSet& realized,
                                           Threshold threshold, const ParcaConfig& config);
std::vector<std::uint64_t> parca_state_key(const ElementSet& probed, const ElementSet& realized, unsigned t);

struct ParcaResult {
  std::vector<ItemId> probed;
  std::vector<OutcomeIndex> outcomes;
  ElementSet realized;  // union of the probed realizations
  Cost cost = 0;
  Value value = 0;      // f(realized) for the objective the call covered
  Threshold threshold;
};

// Probes `list` in order until f(R) > tau. Throws InvariantViolation when the
// list runs out first.
ParcaResult parca_probe(const IndependentInstance& instance, const Objective& f, ParcaList& list,
                        RealizationSource& oracle);

// One ParCA call on the whole instance with config.delta.
ParcaResult parca_run(const IndependentInstance& instance, const ParcaConfig& config, RealizationSource& oracle);

// r-round recursion: round k runs ParCA on the unprobed items with the
// residual objective and delta = Q_k^(-1/(r-k+1)), stopping once the residual
// target is 0. config.delta is ignored.
PolicyTranscript ssc_solve(int r, const IndependentInstance& instance, RealizationSource& oracle,
                           const ParcaConfig& config, ParcaListCache* cache = nullptr);

}  // namespace roundcover
