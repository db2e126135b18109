#pragma once

#include <cmath>
#include <limits>

#include "boolmark/posterior.hpp"
#include "boolmark/rng.hpp"

namespace boolmark {

// Metropolis-Hastings decision from a log acceptance ratio. Handles the
// infinities that show up when a prior assigns zero mass: a -inf candidate is
// always rejected, escaping a -inf current state is always accepted, and a
// NaN (both sides -inf) is treated as a rejection.
inline bool accept_log_alpha(Rng& rng, double log_alpha) {
  if (std::isnan(log_alpha)) return false;
  if (log_alpha >= 0.0) return true;
  if (log_alpha == -std::numeric_limits<double>::infinity()) return false;
  return std::log(rng.uniform01()) < log_alpha;
}

// Joint conjugate draw of (pi0, pi1). With enforce_order set, a draw with
// pi0 > pi1 is discarded and pp kept as it was; rejecting against the
// unconstrained conditional is itself a valid Metropolis step for the
// order-constrained target, and unlike redrawing it always terminates.
inline bool gibbs_draw_probs(Rng& rng, const GibbsParams& g, bool enforce_order,
                             ProbPair& pp) {
  const double pi0 = rng.beta(g.pi0.a, g.pi0.b);
  const double pi1 = rng.beta(g.pi1.a, g.pi1.b);
  if (enforce_order && pi0 > pi1) return false;
  pp.pi0 = pi0;
  pp.pi1 = pi1;
  return true;
}

}  // namespace boolmark
