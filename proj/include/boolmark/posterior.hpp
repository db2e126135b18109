#pragma once

#include <cstddef>
#include <vector>

#include "boolmark/coverage.hpp"
#include "boolmark/dnf.hpp"

namespace boolmark {

struct ProbPair {
  double pi0 = 0.5;  // P(y=1 | row not marked)
  double pi1 = 0.5;  // P(y=1 | row marked)
};

struct BetaShape {
  double a = 1.0;
  double b = 1.0;
};

enum class SizePriorKind { Flat, TruncatedPoisson };
enum class CountPriorKind { Flat, Geometric };

struct PriorConfig {
  BetaShape beta0;  // prior on pi0
  BetaShape beta1;  // prior on pi1
  SizePriorKind size_kind = SizePriorKind::Flat;
  double poisson_theta = 10.0;
  CountPriorKind count_kind = CountPriorKind::Flat;
  double geom_p = 0.5;
  // When set, Gibbs draws with pi0 > pi1 are redrawn; off by default, the
  // posterior is left unordered.
  bool enforce_order = false;

  void validate() const;
};

// 0*log(0) = 0 convention.
double xlogy(double x, double y);
double log_choose(std::size_t n, std::size_t k);
double log_sum_exp(const std::vector<double>& v);

double log_likelihood(const SuffStats& s, const ProbPair& pp);

struct MleEstimate {
  ProbPair probs;
  bool pi0_degenerate = false;  // every row marked: no unmarked rows to estimate from
  bool pi1_degenerate = false;  // no row marked
};
MleEstimate mle_probs(const SuffStats& s);

// Log prior pieces for a fixed (config, p), with the term-size table and the
// Poisson truncation constant precomputed.
class PriorTables {
public:
  PriorTables(const PriorConfig& cfg, std::size_t p);

  std::size_t num_vars() const { return p_; }
  const PriorConfig& config() const { return cfg_; }

  // log P(one term of size k) = log P(k) - log C(p, k); -inf for k = 0
  // under the truncated Poisson.
  double term(std::size_t k) const { return term_log_[k]; }
  // log P(m terms); -inf for m = 0 under the geometric.
  double count(std::size_t m) const;
  double whole_f(const DnfFunction& f) const;

private:
  PriorConfig cfg_;
  std::size_t p_ = 0;
  std::vector<double> term_log_;
};

double log_prior_f(const DnfFunction& f, const PriorConfig& cfg);
double log_prior_probs(const ProbPair& pp, const PriorConfig& cfg);

struct LogPosterior {
  double log_like = 0.0;
  double log_prior_f = 0.0;
  double log_prior_probs = 0.0;
  double total = 0.0;
};

LogPosterior log_posterior(const DnfFunction& f, const ProbPair& pp, const Dataset& d,
                           const PriorConfig& cfg);

// Conjugate full conditionals of (pi0, pi1) given the marked/unmarked split.
struct GibbsParams {
  BetaShape pi0;
  BetaShape pi1;
};
GibbsParams gibbs_conditionals(const SuffStats& s, const PriorConfig& cfg);

}  // namespace boolmark
