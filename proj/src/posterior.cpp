#include "boolmark/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace boolmark {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_prob(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

void check_stats(const SuffStats& s) {
  if (s.n_p > s.n || s.n_m > s.n || s.n_pm > s.n_p || s.n_pm > s.n_m ||
      s.n + s.n_pm < s.n_m + s.n_p)
    throw std::invalid_argument("SuffStats: inconsistent counts");
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(y);
}

double log_choose(std::size_t n, std::size_t k) {
  if (k > n) return kNegInf;
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

void PriorConfig::validate() const {
  if (!(beta0.a > 0.0) || !(beta0.b > 0.0) || !(beta1.a > 0.0) || !(beta1.b > 0.0))
    throw std::invalid_argument("PriorConfig: Beta shapes must be positive");
  if (size_kind == SizePriorKind::TruncatedPoisson && !(poisson_theta > 0.0))
    throw std::invalid_argument("PriorConfig: poisson_theta must be positive");
  if (count_kind == CountPriorKind::Geometric && !(geom_p > 0.0 && geom_p <= 1.0))
    throw std::invalid_argument("PriorConfig: geom_p must lie in (0,1]");
}

double log_likelihood(const SuffStats& s, const ProbPair& pp) {
  check_stats(s);
  check_prob(pp.pi0, "pi0");
  check_prob(pp.pi1, "pi1");
  const double marked_pos = double(s.n_pm);
  const double marked_neg = double(s.n_m - s.n_pm);
  const double unmarked_pos = double(s.n_p - s.n_pm);
  const double unmarked_neg = double(s.n - s.n_m - s.n_p + s.n_pm);
  return xlogy(marked_pos, pp.pi1) + xlogy(marked_neg, 1.0 - pp.pi1) +
         xlogy(unmarked_pos, pp.pi0) + xlogy(unmarked_neg, 1.0 - pp.pi0);
}

MleEstimate mle_probs(const SuffStats& s) {
  check_stats(s);
  MleEstimate est;
  if (s.n_m == 0) {
    est.pi1_degenerate = true;
    est.probs.pi1 = 0.0;
    est.probs.pi0 = s.n ? double(s.n_p) / double(s.n) : 0.0;
    est.pi0_degenerate = (s.n == 0);
    return est;
  }
  if (s.n_m == s.n) {
    est.pi0_degenerate = true;
    est.probs.pi0 = 0.0;
    est.probs.pi1 = double(s.n_p) / double(s.n);
    return est;
  }
  est.probs.pi1 = double(s.n_pm) / double(s.n_m);
  est.probs.pi0 = double(s.n_p - s.n_pm) / double(s.n - s.n_m);
  return est;
}

PriorTables::PriorTables(const PriorConfig& cfg, std::size_t p) : cfg_(cfg), p_(p) {
  cfg.validate();
  if (p == 0) throw std::invalid_argument("PriorTables: p must be positive");
  term_log_.assign(p + 1, 0.0);
  if (cfg.size_kind == SizePriorKind::Flat) {
    for (std::size_t k = 0; k <= p; ++k) term_log_[k] = -log_choose(p, k);
  } else {
    // Poisson(theta) renormalized on {1..p}.
    const double lt = std::log(cfg.poisson_theta);
    std::vector<double> lw(p);
    for (std::size_t k = 1; k <= p; ++k)
      lw[k - 1] = double(k) * lt - std::lgamma(double(k) + 1.0);
    const double norm = log_sum_exp(lw);
    term_log_[0] = kNegInf;
    for (std::size_t k = 1; k <= p; ++k)
      term_log_[k] = lw[k - 1] - norm - log_choose(p, k);
  }
}

double PriorTables::count(std::size_t m) const {
  if (cfg_.count_kind == CountPriorKind::Flat) return 0.0;
  if (m == 0) return kNegInf;
  return std::log(cfg_.geom_p) + double(m - 1) * std::log1p(-cfg_.geom_p);
}

double PriorTables::whole_f(const DnfFunction& f) const {
  if (f.num_vars() != p_) throw std::invalid_argument("PriorTables: f width mismatch");
  double lp = count(f.num_terms());
  for (const auto& c : f.terms()) lp += term(c.size());
  return lp;
}

double log_prior_f(const DnfFunction& f, const PriorConfig& cfg) {
  return PriorTables(cfg, f.num_vars()).whole_f(f);
}

double log_prior_probs(const ProbPair& pp, const PriorConfig& cfg) {
  cfg.validate();
  check_prob(pp.pi0, "pi0");
  check_prob(pp.pi1, "pi1");
  double lp = xlogy(cfg.beta0.a - 1.0, pp.pi0) + xlogy(cfg.beta0.b - 1.0, 1.0 - pp.pi0) -
              log_beta_fn(cfg.beta0.a, cfg.beta0.b);
  lp += xlogy(cfg.beta1.a - 1.0, pp.pi1) + xlogy(cfg.beta1.b - 1.0, 1.0 - pp.pi1) -
        log_beta_fn(cfg.beta1.a, cfg.beta1.b);
  return lp;
}

LogPosterior log_posterior(const DnfFunction& f, const ProbPair& pp, const Dataset& d,
                           const PriorConfig& cfg) {
  CoverageCache cache = build_coverage(f, d);
  LogPosterior out;
  out.log_like = log_likelihood(suffstats(cache, d), pp);
  out.log_prior_f = log_prior_f(f, cfg);
  out.log_prior_probs = log_prior_probs(pp, cfg);
  out.total = out.log_like + out.log_prior_f + out.log_prior_probs;
  return out;
}

GibbsParams gibbs_conditionals(const SuffStats& s, const PriorConfig& cfg) {
  check_stats(s);
  cfg.validate();
  GibbsParams g;
  g.pi0.a = cfg.beta0.a + double(s.n_p - s.n_pm);
  g.pi0.b = cfg.beta0.b + double((s.n - s.n_m) - (s.n_p - s.n_pm));
  g.pi1.a = cfg.beta1.a + double(s.n_pm);
  g.pi1.b = cfg.beta1.b + double(s.n_m - s.n_pm);
  return g;
}

}  // namespace boolmark
