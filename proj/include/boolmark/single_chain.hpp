#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "boolmark/dataset.hpp"
#include "boolmark/posterior.hpp"
#include "boolmark/rng.hpp"

namespace boolmark {

struct SingleChainConfig {
  std::size_t iters = 10000;
  std::size_t burnin = 5000;  // first draws discarded from the trace
  std::uint64_t seed = 1;
  std::size_t num_chains = 4;
  // 0 disables; otherwise every k-th sweep rebuilds coverage from scratch
  // and verifies the incremental state.
  std::size_t check_interval = 0;

  void validate() const;
};

struct SingleTraceRow {
  std::size_t iteration = 0;  // global sweep index, starting at 0
  std::size_t k = 0;          // marker size
  double pi0 = 0.0;
  double pi1 = 0.0;
  double log_post = 0.0;
};

struct ChainTrace {
  std::vector<SingleTraceRow> rows;                // post-burnin states
  std::vector<std::size_t> inclusion_counts;       // per variable, over rows
  std::size_t accepted_flips = 0;
  std::uint64_t seed = 0;
};

// One marker (a single conjunctive term encoded as a variable subset) plus
// (pi0, pi1), updated by a Gibbs draw of the probabilities followed by a
// Metropolis flip of one uniformly chosen variable. The flip proposal is
// symmetric, so it is accepted with the posterior ratio.
class SingleMarkerChain {
public:
  SingleMarkerChain(const Dataset& d, const PriorConfig& cfg, std::uint64_t seed);

  // Marker taken from the on-set of a uniformly chosen positive row; falls
  // back to a random single-variable marker when there is no positive row or
  // the chosen row is all zeros.
  void init_from_positive_row();
  void set_marker(const BitVec& pattern);

  void sweep();

  const BitVec& marker() const { return xi_; }
  std::size_t marker_size() const { return k_; }
  const ProbPair& probs() const { return pp_; }
  const SuffStats& stats() const { return stats_; }
  double log_post() const;
  bool last_flip_accepted() const { return last_flip_accepted_; }

  void check_consistency() const;  // throws when the incremental state drifted

private:
  void recompute_cover();
  void refresh_stats();
  double marker_log_prior() const;

  const Dataset& d_;
  PriorTables priors_;
  Rng rng_;

  BitVec xi_;      // width p
  std::size_t k_ = 0;
  BitVec cover_;   // width n, AND of selected columns (all rows when k = 0)
  SuffStats stats_;
  ProbPair pp_;
  double log_like_ = 0.0;
  double log_prior_marker_ = 0.0;
  double log_prior_pp_ = 0.0;
  bool last_flip_accepted_ = false;
};

ChainTrace run_chain(const Dataset& d, const PriorConfig& cfg,
                     const SingleChainConfig& run, std::uint64_t seed);

// num_chains chains with seeds derived from run.seed, run on up to `jobs`
// threads; results are ordered by chain index regardless of scheduling.
std::vector<ChainTrace> run_chains(const Dataset& d, const PriorConfig& cfg,
                                   const SingleChainConfig& run, std::size_t jobs = 1);

}  // namespace boolmark
