#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "boolmark/coverage.hpp"
#include "boolmark/dataset.hpp"
#include "boolmark/posterior.hpp"
#include "boolmark/rng.hpp"

namespace boolmark {

// Move kinds, in fixed order. The two Gibbs moves are always accepted; the
// structural moves are Metropolis steps on (f | pi0, pi1); the
// birth-from-data move additionally gets the lambda boost.
enum class AnnealMove : int {
  GibbsPi0 = 0,
  GibbsPi1 = 1,
  ShrinkTerm = 2,     // term chosen proportional to its size, one variable removed
  GrowTerm = 3,       // term chosen proportional to 1/size, one variable added
  BirthFromData = 4,  // new term from the on-set of a random positive row
  MergePair = 5,      // a term pair replaced by its intersection
  DeathTerm = 6,      // a uniformly chosen term removed
};

struct AnnealConfig {
  std::size_t steps = 10000;
  double ln_lambda0 = 1000.0;  // boost starts at exp(1000), kept in log space
  double rho = 0.9;            // lambda <- rho * lambda once per step
  // Heavier shrink wins the race between whittling a fresh row-term down to
  // its informative core and the death move deleting it first.
  std::array<double, 7> move_weights{1, 1, 16, 1, 1, 2, 1};
  std::size_t m0 = 1;          // initial terms drawn from distinct positive rows
  std::size_t restarts = 1;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  // The boost always applies to the birth-from-data move; this extends it to
  // merge and death as well.
  bool boost_all_dimension_moves = false;
  bool record_trace = true;
  std::size_t check_interval = 0;  // full-rebuild consistency check cadence

  void validate() const;
};

struct AnnealStepRow {
  std::size_t step = 0;
  int move = 0;  // 1-based, matching the enum order
  bool accepted = false;
  std::size_t m = 0;
  std::size_t sum_k = 0;
  double log_post = 0.0;
};

struct AnnealResult {
  DnfFunction best_f;
  ProbPair best_probs;
  LogPosterior best_parts;
  double best_log_post = 0.0;
  std::vector<AnnealStepRow> trace;
  std::size_t restart_index = 0;
  std::uint64_t seed = 0;
  double final_ln_lambda = 0.0;  // ln_lambda0 + steps * log(rho)
};

AnnealResult anneal(const Dataset& d, const PriorConfig& cfg, const AnnealConfig& run,
                    std::uint64_t seed);

struct RestartsResult {
  std::size_t best_index = 0;  // into runs, highest best_log_post (ties: lowest index)
  std::vector<AnnealResult> runs;

  const AnnealResult& best() const { return runs.at(best_index); }
};

RestartsResult run_restarts(const Dataset& d, const PriorConfig& cfg,
                            const AnnealConfig& run);

}  // namespace boolmark
