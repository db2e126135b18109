#include "boolmark/eval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "boolmark/coverage.hpp"
#include "boolmark/parallel.hpp"
#include "boolmark/rng.hpp"

namespace boolmark {

FittedModel model_from_restarts(const RestartsResult& fit) {
  const AnnealResult& best = fit.best();
  FittedModel m;
  m.f = best.best_f;
  m.pi0_hat = best.best_probs.pi0;
  m.pi1_hat = best.best_probs.pi1;
  m.seed = best.seed;
  m.restart_index = best.restart_index;
  m.train_log_post = best.best_log_post;
  return m;
}

std::vector<double> predict_scores(const FittedModel& model, const Dataset& d) {
  const CoverageCache cache = build_coverage(model.f, d);
  std::vector<double> scores(d.n);
  for (std::size_t i = 0; i < d.n; ++i)
    scores[i] = cache.marked().get(i) ? model.pi1_hat : model.pi0_hat;
  return scores;
}

double auc_score(const std::vector<double>& scores, const BitVec& labels) {
  if (scores.size() != labels.width())
    throw std::invalid_argument("auc_score: scores/labels size mismatch");
  const std::size_t n = scores.size();
  const std::size_t n_pos = labels.count();
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auc_score: needs both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks over tie groups; the rank sum of positives gives the tie-aware
  // Mann-Whitney statistic.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * double(i + 1 + j);  // ranks are 1-based
    for (std::size_t t = i; t < j; ++t)
      if (labels.get(order[t])) pos_rank_sum += midrank;
    i = j;
  }
  const double u = pos_rank_sum - 0.5 * double(n_pos) * double(n_pos + 1);
  return u / (double(n_pos) * double(n_neg));
}

void CvConfig::validate() const {
  if (theta_grid.empty() || geom_p_grid.empty())
    throw std::invalid_argument("CvConfig: empty grid");
  for (double t : theta_grid)
    if (!(t > 0.0)) throw std::invalid_argument("CvConfig: theta must be positive");
  for (double g : geom_p_grid)
    if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("CvConfig: geom_p in (0,1]");
  if (repetitions == 0) throw std::invalid_argument("CvConfig: repetitions == 0");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("CvConfig: fraction outside (0,1)");
}

std::vector<CvCellReport> crossval(const Dataset& full, const PriorConfig& base,
                                   const AnnealConfig& fit, const CvConfig& cv) {
  cv.validate();
  fit.validate();
  full.validate();

  const std::size_t cells = cv.theta_grid.size() * cv.geom_p_grid.size();
  std::vector<CvCellReport> report(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    report[c].theta = cv.theta_grid[c / cv.geom_p_grid.size()];
    report[c].geom_p = cv.geom_p_grid[c % cv.geom_p_grid.size()];
    report[c].reps.resize(cv.repetitions);
  }

  parallel_for(cells * cv.repetitions, cv.jobs, [&](std::size_t unit) {
    const std::size_t c = unit / cv.repetitions;
    const std::size_t rep = unit % cv.repetitions;

    const SplitResult sp =
        split_dataset(full, cv.fraction, Rng::derive(cv.seed, rep));
    for (auto r : sp.train_rows)
      if (std::binary_search(sp.test_rows.begin(), sp.test_rows.end(), r))
        throw std::logic_error("crossval: train/test rows overlap");
    if (sp.train_rows.size() + sp.test_rows.size() != full.n)
      throw std::logic_error("crossval: split loses rows");

    PriorConfig prior = base;
    prior.size_kind = SizePriorKind::TruncatedPoisson;
    prior.poisson_theta = report[c].theta;
    prior.count_kind = CountPriorKind::Geometric;
    prior.geom_p = report[c].geom_p;

    AnnealConfig unit_fit = fit;
    unit_fit.jobs = 1;  // parallelism lives at the unit level
    unit_fit.record_trace = false;
    unit_fit.seed = Rng::derive(cv.seed, (c + 1) * cv.repetitions + rep);

    const FittedModel model = model_from_restarts(run_restarts(sp.train, prior, unit_fit));
    CvRepRow& row = report[c].reps[rep];
    row.rep = rep;
    row.auc = auc_score(predict_scores(model, sp.test), sp.test.y);
    row.m = model.f.num_terms();
    row.sum_k = model.f.total_size();
    row.pi0_hat = model.pi0_hat;
    row.pi1_hat = model.pi1_hat;
    row.rule = render_dnf(model.f, full.feature_names);
  });

  for (auto& cell : report) {
    for (const auto& row : cell.reps) {
      cell.mean_auc += row.auc;
      cell.mean_m += double(row.m);
      cell.mean_sum_k += double(row.sum_k);
    }
    cell.mean_auc /= double(cv.repetitions);
    cell.mean_m /= double(cv.repetitions);
    cell.mean_sum_k /= double(cv.repetitions);
  }
  return report;
}

RecoveryReport recovery_experiment(const RecoveryConfig& rc, const PriorConfig& prior,
                                   const AnnealConfig& fit) {
  if (rc.repetitions == 0)
    throw std::invalid_argument("recovery_experiment: repetitions == 0");
  rc.base.validate();
  fit.validate();

  const std::size_t terms = rc.base.term_sizes.size();
  RecoveryReport report;
  report.reps.resize(rc.repetitions);

  parallel_for(rc.repetitions, rc.jobs, [&](std::size_t rep) {
    SimSpec spec = rc.base;
    spec.seed = Rng::derive(rc.seed, 2 * rep);
    const SimOutput sim = simulate(spec);

    AnnealConfig unit_fit = fit;
    unit_fit.jobs = 1;
    unit_fit.record_trace = false;
    unit_fit.seed = Rng::derive(rc.seed, 2 * rep + 1);

    const FittedModel model = model_from_restarts(run_restarts(sim.data, prior, unit_fit));
    RecoveryRepRow& row = report.reps[rep];
    row.rep = rep;
    row.pi0_hat = model.pi0_hat;
    row.pi1_hat = model.pi1_hat;
    row.m = model.f.num_terms();
    row.sum_k = model.f.total_size();
    row.exact.resize(terms);
    row.contained.resize(terms);
    for (std::size_t t = 0; t < terms; ++t) {
      const Conjunction& planted = sim.truth.term(t);
      row.exact[t] = model.f.contains_term(planted) ? 1 : 0;
      bool contained = false;
      for (const auto& c : model.f.terms())
        contained = contained || planted.vars().is_subset_of(c.vars());
      row.contained[t] = contained ? 1 : 0;
    }
  });

  report.exact_rate.assign(terms, 0.0);
  report.contained_rate.assign(terms, 0.0);
  for (const auto& row : report.reps) {
    report.mean_pi0 += row.pi0_hat;
    report.mean_pi1 += row.pi1_hat;
    report.mean_m += double(row.m);
    report.mean_sum_k += double(row.sum_k);
    for (std::size_t t = 0; t < terms; ++t) {
      report.exact_rate[t] += row.exact[t];
      report.contained_rate[t] += row.contained[t];
    }
  }
  const double r = double(rc.repetitions);
  report.mean_pi0 /= r;
  report.mean_pi1 /= r;
  report.mean_m /= r;
  report.mean_sum_k /= r;
  for (std::size_t t = 0; t < terms; ++t) {
    report.exact_rate[t] /= r;
    report.contained_rate[t] /= r;
  }
  return report;
}

}  // namespace boolmark
