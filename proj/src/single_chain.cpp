#include "boolmark/single_chain.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "boolmark/mcmc_util.hpp"
#include "boolmark/parallel.hpp"

namespace boolmark {

void SingleChainConfig::validate() const {
  if (iters == 0) throw std::invalid_argument("SingleChainConfig: iters must be positive");
  if (burnin >= iters) throw std::invalid_argument("SingleChainConfig: burnin >= iters");
  if (num_chains == 0) throw std::invalid_argument("SingleChainConfig: num_chains == 0");
}

SingleMarkerChain::SingleMarkerChain(const Dataset& d, const PriorConfig& cfg,
                                     std::uint64_t seed)
    : d_(d), priors_(cfg, d.p), rng_(seed), xi_(d.p), cover_(d.n, true) {
  d.validate();
  if (d.n == 0 || d.p == 0) throw std::invalid_argument("SingleMarkerChain: empty dataset");
  refresh_stats();
  const GibbsParams g = gibbs_conditionals(stats_, priors_.config());
  pp_.pi0 = rng_.beta(g.pi0.a, g.pi0.b);
  pp_.pi1 = rng_.beta(g.pi1.a, g.pi1.b);
  // The rejection step keeps the chain inside the ordered region only if it
  // starts there.
  if (cfg.enforce_order && pp_.pi0 > pp_.pi1) std::swap(pp_.pi0, pp_.pi1);
  log_like_ = log_likelihood(stats_, pp_);
  log_prior_pp_ = log_prior_probs(pp_, priors_.config());
}

void SingleMarkerChain::init_from_positive_row() {
  const auto positive = d_.y.on_bits();
  BitVec pattern(d_.p);
  if (!positive.empty()) {
    const std::size_t i = positive[rng_.uniform_below(positive.size())];
    pattern = d_.row(i);
  }
  if (pattern.none()) pattern.set(rng_.uniform_below(d_.p), true);
  set_marker(pattern);
}

void SingleMarkerChain::set_marker(const BitVec& pattern) {
  if (pattern.width() != d_.p)
    throw std::invalid_argument("SingleMarkerChain: marker width != p");
  xi_ = pattern;
  k_ = xi_.count();
  recompute_cover();
  refresh_stats();
  log_like_ = log_likelihood(stats_, pp_);
}

void SingleMarkerChain::recompute_cover() {
  cover_ = BitVec(d_.n, true);
  for (auto j : xi_.on_bits()) cover_ &= d_.columns[j];
}

void SingleMarkerChain::refresh_stats() {
  stats_.n = d_.n;
  stats_.n_p = d_.y.count();
  stats_.n_m = cover_.count();
  stats_.n_pm = BitVec::and_count(cover_, d_.y);
  log_prior_marker_ = marker_log_prior();
}

double SingleMarkerChain::marker_log_prior() const {
  return priors_.term(k_) + priors_.count(1);
}

double SingleMarkerChain::log_post() const {
  return log_like_ + log_prior_marker_ + log_prior_pp_;
}

void SingleMarkerChain::sweep() {
  // Gibbs stage: conjugate draws of the two regime probabilities.
  const GibbsParams g = gibbs_conditionals(stats_, priors_.config());
  if (gibbs_draw_probs(rng_, g, priors_.config().enforce_order, pp_)) {
    log_like_ = log_likelihood(stats_, pp_);
    log_prior_pp_ = log_prior_probs(pp_, priors_.config());
  }

  // Metropolis stage: flip one uniformly chosen variable.
  const std::size_t j = rng_.uniform_below(d_.p);
  const bool turn_on = !xi_.get(j);

  BitVec cand_cover(d_.n);
  if (turn_on) {
    cand_cover = cover_ & d_.columns[j];
  } else {
    cand_cover.fill(true);
    for (auto v : xi_.on_bits())
      if (v != j) cand_cover &= d_.columns[v];
  }
  SuffStats cand_stats = stats_;
  cand_stats.n_m = cand_cover.count();
  cand_stats.n_pm = BitVec::and_count(cand_cover, d_.y);

  const std::size_t cand_k = turn_on ? k_ + 1 : k_ - 1;
  const double cand_ll = log_likelihood(cand_stats, pp_);
  const double cand_prior = priors_.term(cand_k) + priors_.count(1);
  const double log_alpha = (cand_ll + cand_prior) - (log_like_ + log_prior_marker_);

  last_flip_accepted_ = accept_log_alpha(rng_, log_alpha);
  if (last_flip_accepted_) {
    xi_.set(j, turn_on);
    k_ = cand_k;
    cover_ = std::move(cand_cover);
    stats_ = cand_stats;
    log_like_ = cand_ll;
    log_prior_marker_ = cand_prior;
  }
}

void SingleMarkerChain::check_consistency() const {
  BitVec fresh(d_.n, true);
  for (auto j : xi_.on_bits()) fresh &= d_.columns[j];
  if (!(fresh == cover_))
    throw std::logic_error("SingleMarkerChain: incremental cover drifted");
  SuffStats s;
  s.n = d_.n;
  s.n_p = d_.y.count();
  s.n_m = fresh.count();
  s.n_pm = BitVec::and_count(fresh, d_.y);
  if (!(s == stats_))
    throw std::logic_error("SingleMarkerChain: incremental stats drifted");
}

ChainTrace run_chain(const Dataset& d, const PriorConfig& cfg,
                     const SingleChainConfig& run, std::uint64_t seed) {
  run.validate();
  SingleMarkerChain chain(d, cfg, seed);
  chain.init_from_positive_row();

  ChainTrace trace;
  trace.seed = seed;
  trace.rows.reserve(run.iters - run.burnin);
  trace.inclusion_counts.assign(d.p, 0);
  for (std::size_t it = 0; it < run.iters; ++it) {
    chain.sweep();
    if (run.check_interval && (it + 1) % run.check_interval == 0)
      chain.check_consistency();
    if (chain.last_flip_accepted()) ++trace.accepted_flips;
    if (it >= run.burnin) {
      trace.rows.push_back({it, chain.marker_size(), chain.probs().pi0,
                            chain.probs().pi1, chain.log_post()});
      for (auto j : chain.marker().on_bits()) ++trace.inclusion_counts[j];
    }
  }
  return trace;
}

std::vector<ChainTrace> run_chains(const Dataset& d, const PriorConfig& cfg,
                                   const SingleChainConfig& run, std::size_t jobs) {
  run.validate();
  std::vector<ChainTrace> out(run.num_chains);
  parallel_for(run.num_chains, jobs, [&](std::size_t c) {
    out[c] = run_chain(d, cfg, run, Rng::derive(run.seed, c));
  });
  return out;
}

}  // namespace boolmark
