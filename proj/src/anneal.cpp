#include "boolmark/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "boolmark/mcmc_util.hpp"
#include "boolmark/parallel.hpp"

namespace boolmark {

void AnnealConfig::validate() const {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("AnnealConfig: rho in (0,1]");
  double total = 0.0;
  for (double w : move_weights) {
    if (w < 0.0) throw std::invalid_argument("AnnealConfig: negative move weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("AnnealConfig: move weights sum to zero");
  if (m0 == 0) throw std::invalid_argument("AnnealConfig: m0 must be positive");
  if (restarts == 0) throw std::invalid_argument("AnnealConfig: restarts must be positive");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class Annealer {
public:
  Annealer(const Dataset& d, const PriorConfig& cfg, const AnnealConfig& run,
           std::uint64_t seed)
      : d_(d),
        priors_(cfg, d.p),
        run_(run),
        rng_(seed),
        covered_(initial_function(d, run.m0, rng_), d),
        ln_lambda_(run.ln_lambda0) {
    const GibbsParams g = gibbs_conditionals(covered_.stats(), priors_.config());
    gibbs_draw_probs(rng_, g, false, pp_);
    // Start inside the ordered region; the per-move rejection step only
    // preserves the constraint, it cannot establish it.
    if (cfg.enforce_order && pp_.pi0 > pp_.pi1) std::swap(pp_.pi0, pp_.pi1);
    refresh_log_parts();
    remember_best();
  }

  AnnealResult run(std::uint64_t seed) {
    AnnealResult res;
    res.seed = seed;
    if (run_.record_trace) res.trace.reserve(run_.steps);
    for (std::size_t step = 0; step < run_.steps; ++step) {
      const auto move = static_cast<AnnealMove>(rng_.categorical(weights_vec()));
      const bool accepted = do_move(move);
      ln_lambda_ += std::log(run_.rho);  // cooled once per step, whatever the move
      if (run_.check_interval && (step + 1) % run_.check_interval == 0 &&
          !covered_.consistent())
        throw std::logic_error("Annealer: incremental coverage drifted");
      remember_best();
      if (run_.record_trace)
        res.trace.push_back({step, static_cast<int>(move) + 1, accepted,
                             covered_.dnf().num_terms(), covered_.dnf().total_size(),
                             log_post()});
    }
    res.best_f = best_f_;
    res.best_probs = best_pp_;
    res.best_parts = best_parts_;
    res.best_log_post = best_parts_.total;
    res.final_ln_lambda = ln_lambda_;
    return res;
  }

private:
  // m0 terms from the on-sets of distinct positive rows (duplicates and
  // all-zero rows skipped); falls back to one random single-variable term
  // when nothing usable is found.
  static DnfFunction initial_function(const Dataset& d, std::size_t m0, Rng& rng) {
    std::vector<std::size_t> positive = d.y.on_bits();
    // Fisher-Yates over the positive rows, driven by our own stream.
    for (std::size_t i = positive.size(); i > 1; --i)
      std::swap(positive[i - 1], positive[rng.uniform_below(i)]);
    DnfFunction f(d.p);
    for (std::size_t i = 0; i < positive.size() && f.num_terms() < m0; ++i) {
      const BitVec pattern = d.row(positive[i]);
      if (pattern.none()) continue;
      Conjunction c = Conjunction::from_on_bits(pattern);
      if (!f.contains_term(c)) f.add_term(std::move(c));
    }
    if (f.num_terms() == 0) {
      BitVec one(d.p);
      one.set(rng.uniform_below(d.p), true);
      f.add_term(Conjunction::from_on_bits(one));
    }
    return f;
  }

  std::vector<double> weights_vec() const {
    return {run_.move_weights.begin(), run_.move_weights.end()};
  }

  void refresh_log_parts() {
    ll_ = log_likelihood(covered_.stats(), pp_);
    lpf_ = priors_.whole_f(covered_.dnf());
    lppp_ = log_prior_probs(pp_, priors_.config());
  }

  double log_post() const { return ll_ + lpf_ + lppp_; }

  void remember_best() {
    if (have_best_ && !(log_post() > best_parts_.total)) return;
    have_best_ = true;
    best_f_ = covered_.dnf();
    best_pp_ = pp_;
    best_parts_ = {ll_, lpf_, lppp_, log_post()};
  }

  bool do_move(AnnealMove move) {
    switch (move) {
      case AnnealMove::GibbsPi0: return gibbs_prob(false);
      case AnnealMove::GibbsPi1: return gibbs_prob(true);
      case AnnealMove::ShrinkTerm: return shrink();
      case AnnealMove::GrowTerm: return grow();
      case AnnealMove::BirthFromData: return birth_from_data();
      case AnnealMove::MergePair: return merge_pair();
      case AnnealMove::DeathTerm: return death();
    }
    return false;
  }

  bool gibbs_prob(bool second) {
    const GibbsParams g = gibbs_conditionals(covered_.stats(), priors_.config());
    const double draw = second ? rng_.beta(g.pi1.a, g.pi1.b) : rng_.beta(g.pi0.a, g.pi0.b);
    ProbPair cand = pp_;
    (second ? cand.pi1 : cand.pi0) = draw;
    if (priors_.config().enforce_order && cand.pi0 > cand.pi1) return false;
    pp_ = cand;
    ll_ = log_likelihood(covered_.stats(), pp_);
    lppp_ = log_prior_probs(pp_, priors_.config());
    return true;
  }

  // Structural acceptance: certain when the posterior does not drop,
  // otherwise min(1, ratio * boost) with the boost only for flagged moves.
  bool accept_structural(const CoveredDnf::Edit& edit, double dlpf, bool boosted,
                         double& cand_ll_out) {
    cand_ll_out = log_likelihood(edit.stats, pp_);
    const double delta = (cand_ll_out - ll_) + dlpf;
    if (std::isnan(delta)) return false;
    if (delta >= 0.0) return true;
    if (delta == kNegInf) return false;
    const double log_acc = std::min(0.0, delta + (boosted ? ln_lambda_ : 0.0));
    return std::log(rng_.uniform01()) < log_acc;
  }

  void commit(CoveredDnf::Edit&& edit, double cand_ll) {
    covered_.apply(std::move(edit));
    ll_ = cand_ll;
    lpf_ = priors_.whole_f(covered_.dnf());
  }

  bool duplicates_other(const Conjunction& c, std::size_t skip_a, std::size_t skip_b) const {
    const auto& f = covered_.dnf();
    for (std::size_t t = 0; t < f.num_terms(); ++t)
      if (t != skip_a && t != skip_b && f.term(t) == c) return true;
    return false;
  }

  bool shrink() {
    const auto& f = covered_.dnf();
    if (f.num_terms() == 0) return false;
    std::vector<double> w(f.num_terms());
    for (std::size_t t = 0; t < f.num_terms(); ++t) w[t] = double(f.term(t).size());
    const std::size_t t = rng_.categorical(w);
    const Conjunction& cur = f.term(t);
    if (cur.size() == 1) return false;
    const auto vars = cur.indices();
    const std::size_t j = vars[rng_.uniform_below(vars.size())];

    Conjunction next = cur;
    next.remove(j);
    if (duplicates_other(next, t, t)) return false;
    auto edit = covered_.plan_flip(t, j, false);
    const double dlpf = priors_.term(next.size()) - priors_.term(cur.size());
    double cand_ll;
    if (!accept_structural(edit, dlpf, false, cand_ll)) return false;
    commit(std::move(edit), cand_ll);
    return true;
  }

  bool grow() {
    const auto& f = covered_.dnf();
    if (f.num_terms() == 0) return false;
    std::vector<double> w(f.num_terms());
    bool any = false;
    for (std::size_t t = 0; t < f.num_terms(); ++t) {
      const std::size_t k = f.term(t).size();
      w[t] = (k < d_.p) ? 1.0 / double(k) : 0.0;  // saturated terms excluded
      any = any || k < d_.p;
    }
    if (!any) return false;
    const std::size_t t = rng_.categorical(w);
    const Conjunction& cur = f.term(t);
    std::vector<std::size_t> off;
    off.reserve(d_.p - cur.size());
    for (std::size_t j = 0; j < d_.p; ++j)
      if (!cur.contains(j)) off.push_back(j);
    const std::size_t j = off[rng_.uniform_below(off.size())];

    Conjunction next = cur;
    next.add(j);
    if (duplicates_other(next, t, t)) return false;
    auto edit = covered_.plan_flip(t, j, true);
    const double dlpf = priors_.term(next.size()) - priors_.term(cur.size());
    double cand_ll;
    if (!accept_structural(edit, dlpf, false, cand_ll)) return false;
    commit(std::move(edit), cand_ll);
    return true;
  }

  bool birth_from_data() {
    const auto positive = d_.y.on_bits();
    if (positive.empty()) return false;
    const BitVec pattern = d_.row(positive[rng_.uniform_below(positive.size())]);
    if (pattern.none()) return false;
    Conjunction c = Conjunction::from_on_bits(pattern);
    if (covered_.dnf().contains_term(c)) return false;
    const std::size_t m = covered_.dnf().num_terms();
    auto edit = covered_.plan_add(c);
    const double dlpf =
        priors_.term(c.size()) + priors_.count(m + 1) - priors_.count(m);
    double cand_ll;
    if (!accept_structural(edit, dlpf, true, cand_ll)) return false;
    commit(std::move(edit), cand_ll);
    return true;
  }

  bool merge_pair() {
    const auto& f = covered_.dnf();
    const std::size_t m = f.num_terms();
    if (m < 2) return false;
    const std::size_t i = rng_.uniform_below(m);
    std::size_t j = rng_.uniform_below(m - 1);
    if (j >= i) ++j;
    Conjunction merged = intersect(f.term(i), f.term(j));
    if (merged.empty()) return false;
    if (duplicates_other(merged, i, j)) return false;
    auto edit = covered_.plan_replace_pair(i, j, merged);
    const double dlpf = priors_.term(merged.size()) - priors_.term(f.term(i).size()) -
                        priors_.term(f.term(j).size()) + priors_.count(m - 1) -
                        priors_.count(m);
    double cand_ll;
    if (!accept_structural(edit, dlpf, run_.boost_all_dimension_moves, cand_ll))
      return false;
    commit(std::move(edit), cand_ll);
    return true;
  }

  bool death() {
    const auto& f = covered_.dnf();
    const std::size_t m = f.num_terms();
    if (m == 0) return false;
    const std::size_t t = rng_.uniform_below(m);
    auto edit = covered_.plan_remove(t);
    // Removing the last term under a geometric count prior lands on zero
    // mass, so the delta is -inf and the move dies here on its own.
    const double dlpf =
        -priors_.term(f.term(t).size()) + priors_.count(m - 1) - priors_.count(m);
    double cand_ll;
    if (!accept_structural(edit, dlpf, run_.boost_all_dimension_moves, cand_ll))
      return false;
    commit(std::move(edit), cand_ll);
    return true;
  }

  const Dataset& d_;
  PriorTables priors_;
  AnnealConfig run_;
  Rng rng_;
  CoveredDnf covered_;
  ProbPair pp_;
  double ll_ = 0.0, lpf_ = 0.0, lppp_ = 0.0;
  double ln_lambda_ = 0.0;

  bool have_best_ = false;
  DnfFunction best_f_;
  ProbPair best_pp_;
  LogPosterior best_parts_;
};

}  // namespace

AnnealResult anneal(const Dataset& d, const PriorConfig& cfg, const AnnealConfig& run,
                    std::uint64_t seed) {
  run.validate();
  d.validate();
  if (d.n == 0 || d.p == 0) throw std::invalid_argument("anneal: empty dataset");
  Annealer a(d, cfg, run, seed);
  return a.run(seed);
}

RestartsResult run_restarts(const Dataset& d, const PriorConfig& cfg,
                            const AnnealConfig& run) {
  run.validate();
  RestartsResult out;
  out.runs.resize(run.restarts);
  parallel_for(run.restarts, run.jobs, [&](std::size_t r) {
    out.runs[r] = anneal(d, cfg, run, Rng::derive(run.seed, r));
    out.runs[r].restart_index = r;
  });
  for (std::size_t r = 1; r < out.runs.size(); ++r)
    if (out.runs[r].best_log_post > out.runs[out.best_index].best_log_post)
      out.best_index = r;
  return out;
}

}  // namespace boolmark
