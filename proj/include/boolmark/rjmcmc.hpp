#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "boolmark/coverage.hpp"
#include "boolmark/dataset.hpp"
#include "boolmark/posterior.hpp"
#include "boolmark/rng.hpp"

namespace boolmark {

// Birth/death moves on the term set via symmetric difference.
//
// Death: an unordered pair {u, v} (chosen with probability 1/C(m,2)) is
// replaced by the single term u ^ v. Birth: a term u (chosen with
// probability 1/m) and a uniform variable pattern w out of the 2^p possible
// are replaced by the pair {w, u ^ w}; since (u ^ w) ^ w = u, death exactly
// reverses birth.
//
// Hastings corrections. A death target g is reachable from f in at most one
// way (the pair is determined by which terms disappeared), so
// q(f -> g) = 1/C(m,2). For the reverse birth there are exactly two
// generating labelings: picking w = u1 yields the companion u2 and vice
// versa, so q(g -> f) = 2 * (1/m_g) * 2^-p with m_g = m - 1. The acceptance
// log ratio for death is therefore
//     dlogpost + log C(m,2) + log 2 - log(m-1) - p log 2
//   = dlogpost + log m - p log 2,
// and the birth move from m_g terms into m_g + 1 gets the negation,
// dlogpost + p log 2 - log(m_g + 1).

struct RjDeath {
  std::size_t keep = 0;        // slot that receives the merged term
  std::size_t drop = 0;
  Conjunction merged;
  double log_hastings = 0.0;
};

struct RjBirth {
  std::size_t term = 0;        // slot replaced by `first`
  Conjunction first;           // the drawn pattern w
  Conjunction second;          // u ^ w, appended
  double log_hastings = 0.0;
};

// Deterministic proposal builders given the random choices; nullopt when a
// guard fires (empty term produced, or a duplicate against the remaining
// terms). Exposed so kernels can be enumerated exactly in tests.
std::optional<RjDeath> rj_death(const DnfFunction& f, std::size_t i, std::size_t j);
std::optional<RjBirth> rj_birth(const DnfFunction& f, std::size_t t, const Conjunction& w);

struct RjConfig {
  std::size_t iters = 100000;
  std::uint64_t seed = 1;
  double p_birth = 0.25;
  double p_death = 0.25;  // remainder is the within-model move
  std::size_t max_terms = 0;  // 0 = unbounded; births beyond the cap are rejected

  void validate() const;
};

struct RjTraceRow {
  std::size_t iteration = 0;
  std::size_t m = 0;
  double log_post = 0.0;
};

struct RjResult {
  std::vector<RjTraceRow> trace;
  DnfFunction final_f;
  ProbPair final_probs;
  std::size_t births_proposed = 0, births_accepted = 0;
  std::size_t deaths_proposed = 0, deaths_accepted = 0;
  std::size_t flips_proposed = 0, flips_accepted = 0;
};

// The pattern proposal is uniform over all 2^p subsets, so the chain is only
// run for small variable counts.
inline constexpr std::size_t kRjMaxVars = 12;

RjResult run_rj(const Dataset& d, const PriorConfig& cfg, const RjConfig& run);

// Observer variant for diagnostics and distribution checks; called after
// every iteration with the current state.
using RjObserver = std::function<void(std::size_t, const DnfFunction&, const ProbPair&)>;
RjResult run_rj(const Dataset& d, const PriorConfig& cfg, const RjConfig& run,
                const RjObserver& observe);

}  // namespace boolmark
