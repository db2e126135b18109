#include "boolmark/rjmcmc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "boolmark/mcmc_util.hpp"

namespace boolmark {

namespace {

bool duplicates_other_term(const DnfFunction& f, const Conjunction& c,
                           std::size_t skip_a, std::size_t skip_b) {
  for (std::size_t t = 0; t < f.num_terms(); ++t)
    if (t != skip_a && t != skip_b && f.term(t) == c) return true;
  return false;
}

}  // namespace

std::optional<RjDeath> rj_death(const DnfFunction& f, std::size_t i, std::size_t j) {
  const std::size_t m = f.num_terms();
  if (m < 2) throw std::invalid_argument("rj_death: needs at least two terms");
  if (i == j || i >= m || j >= m) throw std::invalid_argument("rj_death: bad pair");
  Conjunction merged = symmetric_difference(f.term(i), f.term(j));
  if (merged.empty()) return std::nullopt;
  if (duplicates_other_term(f, merged, i, j)) return std::nullopt;
  RjDeath out;
  out.keep = std::min(i, j);
  out.drop = std::max(i, j);
  out.merged = std::move(merged);
  out.log_hastings =
      std::log(double(m)) - double(f.num_vars()) * std::numbers::ln2;
  return out;
}

std::optional<RjBirth> rj_birth(const DnfFunction& f, std::size_t t,
                                const Conjunction& w) {
  const std::size_t m = f.num_terms();
  if (t >= m) throw std::invalid_argument("rj_birth: bad term index");
  if (w.num_vars() != f.num_vars())
    throw std::invalid_argument("rj_birth: pattern width mismatch");
  if (w.empty()) return std::nullopt;
  Conjunction second = symmetric_difference(f.term(t), w);
  if (second.empty()) return std::nullopt;  // w == u
  if (w == second) return std::nullopt;
  if (duplicates_other_term(f, w, t, t) || duplicates_other_term(f, second, t, t))
    return std::nullopt;
  RjBirth out;
  out.term = t;
  out.first = w;
  out.second = std::move(second);
  out.log_hastings =
      double(f.num_vars()) * std::numbers::ln2 - std::log(double(m) + 1.0);
  return out;
}

void RjConfig::validate() const {
  if (!(p_birth >= 0.0) || !(p_death >= 0.0) || p_birth + p_death > 1.0)
    throw std::invalid_argument("RjConfig: bad move probabilities");
}

namespace {

class RjChain {
public:
  RjChain(const Dataset& d, const PriorConfig& cfg, const RjConfig& run,
          std::uint64_t seed)
      : d_(d),
        priors_(cfg, d.p),
        run_(run),
        rng_(seed),
        covered_(initial_function(d, rng_), d) {
    const GibbsParams g = gibbs_conditionals(covered_.stats(), priors_.config());
    pp_.pi0 = rng_.beta(g.pi0.a, g.pi0.b);
    pp_.pi1 = rng_.beta(g.pi1.a, g.pi1.b);
    // Start inside the ordered region; the per-sweep rejection step only
    // preserves the constraint, it cannot establish it.
    if (cfg.enforce_order && pp_.pi0 > pp_.pi1) std::swap(pp_.pi0, pp_.pi1);
    refresh_log_parts();
  }

  void sweep(RjResult& res) {
    const double r = rng_.uniform01();
    if (r < run_.p_birth)
      birth_move(res);
    else if (r < run_.p_birth + run_.p_death)
      death_move(res);
    else
      within_move(res);
  }

  double log_post() const { return ll_ + lpf_ + lppp_; }
  const DnfFunction& dnf() const { return covered_.dnf(); }
  const ProbPair& probs() const { return pp_; }

private:
  static DnfFunction initial_function(const Dataset& d, Rng& rng) {
    const auto positive = d.y.on_bits();
    BitVec pattern(d.p);
    if (!positive.empty())
      pattern = d.row(positive[rng.uniform_below(positive.size())]);
    if (pattern.none()) pattern.set(rng.uniform_below(d.p), true);
    DnfFunction f(d.p);
    f.add_term(Conjunction::from_on_bits(pattern));
    return f;
  }

  void refresh_log_parts() {
    ll_ = log_likelihood(covered_.stats(), pp_);
    lpf_ = priors_.whole_f(covered_.dnf());
    lppp_ = log_prior_probs(pp_, priors_.config());
  }

  Conjunction random_pattern() {
    BitVec bits(d_.p);
    for (std::size_t j = 0; j < d_.p; ++j) bits.set(j, rng_.bernoulli(0.5));
    return Conjunction::from_on_bits(bits);
  }

  void birth_move(RjResult& res) {
    ++res.births_proposed;
    const std::size_t m = covered_.dnf().num_terms();
    if (run_.max_terms && m >= run_.max_terms) return;
    const std::size_t t = rng_.uniform_below(m);
    const Conjunction w = random_pattern();
    auto prop = rj_birth(covered_.dnf(), t, w);
    if (!prop) return;
    auto edit = covered_.plan_split(prop->term, prop->first, prop->second);
    const double cand_ll = log_likelihood(edit.stats, pp_);
    const double dlpf = priors_.term(prop->first.size()) +
                        priors_.term(prop->second.size()) -
                        priors_.term(covered_.dnf().term(t).size()) +
                        priors_.count(m + 1) - priors_.count(m);
    if (accept_log_alpha(rng_, (cand_ll - ll_) + dlpf + prop->log_hastings)) {
      covered_.apply(std::move(edit));
      ll_ = cand_ll;
      lpf_ = priors_.whole_f(covered_.dnf());
      ++res.births_accepted;
    }
  }

  void death_move(RjResult& res) {
    ++res.deaths_proposed;
    const std::size_t m = covered_.dnf().num_terms();
    if (m < 2) return;
    const std::size_t i = rng_.uniform_below(m);
    std::size_t j = rng_.uniform_below(m - 1);
    if (j >= i) ++j;
    auto prop = rj_death(covered_.dnf(), i, j);
    if (!prop) return;
    auto edit = covered_.plan_replace_pair(prop->keep, prop->drop, prop->merged);
    const double cand_ll = log_likelihood(edit.stats, pp_);
    const double dlpf = priors_.term(prop->merged.size()) -
                        priors_.term(covered_.dnf().term(i).size()) -
                        priors_.term(covered_.dnf().term(j).size()) +
                        priors_.count(m - 1) - priors_.count(m);
    if (accept_log_alpha(rng_, (cand_ll - ll_) + dlpf + prop->log_hastings)) {
      covered_.apply(std::move(edit));
      ll_ = cand_ll;
      lpf_ = priors_.whole_f(covered_.dnf());
      ++res.deaths_accepted;
    }
  }

  void within_move(RjResult& res) {
    const GibbsParams g = gibbs_conditionals(covered_.stats(), priors_.config());
    if (gibbs_draw_probs(rng_, g, priors_.config().enforce_order, pp_)) {
      ll_ = log_likelihood(covered_.stats(), pp_);
      lppp_ = log_prior_probs(pp_, priors_.config());
    }

    ++res.flips_proposed;
    const std::size_t t = rng_.uniform_below(covered_.dnf().num_terms());
    const std::size_t j = rng_.uniform_below(d_.p);
    const Conjunction& cur = covered_.dnf().term(t);
    const bool turn_on = !cur.contains(j);
    if (!turn_on && cur.size() == 1) return;

    Conjunction next = cur;
    if (turn_on)
      next.add(j);
    else
      next.remove(j);
    if (duplicates_other_term(covered_.dnf(), next, t, t)) return;

    auto edit = covered_.plan_flip(t, j, turn_on);
    const double cand_ll = log_likelihood(edit.stats, pp_);
    const double dlpf = priors_.term(next.size()) - priors_.term(cur.size());
    if (accept_log_alpha(rng_, (cand_ll - ll_) + dlpf)) {
      covered_.apply(std::move(edit));
      ll_ = cand_ll;
      lpf_ = priors_.whole_f(covered_.dnf());
      ++res.flips_accepted;
    }
  }

  const Dataset& d_;
  PriorTables priors_;
  RjConfig run_;
  Rng rng_;
  CoveredDnf covered_;
  ProbPair pp_;
  double ll_ = 0.0, lpf_ = 0.0, lppp_ = 0.0;
};

}  // namespace

RjResult run_rj(const Dataset& d, const PriorConfig& cfg, const RjConfig& run,
                const RjObserver& observe) {
  run.validate();
  d.validate();
  if (d.p > kRjMaxVars)
    throw std::invalid_argument("run_rj: too many variables for the uniform pattern proposal");
  RjChain chain(d, cfg, run, run.seed);
  RjResult res;
  res.trace.reserve(run.iters);
  for (std::size_t it = 0; it < run.iters; ++it) {
    chain.sweep(res);
    res.trace.push_back({it, chain.dnf().num_terms(), chain.log_post()});
    if (observe) observe(it, chain.dnf(), chain.probs());
  }
  res.final_f = chain.dnf();
  res.final_probs = chain.probs();
  return res;
}

RjResult run_rj(const Dataset& d, const PriorConfig& cfg, const RjConfig& run) {
  return run_rj(d, cfg, run, RjObserver{});
}

}  // namespace boolmark
