#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "boolmark/anneal.hpp"
#include "boolmark/data.hpp"
#include "boolmark/dataset.hpp"
#include "boolmark/dnf.hpp"
#include "boolmark/posterior.hpp"

namespace boolmark {

struct FittedModel {
  DnfFunction f;
  double pi0_hat = 0.0;
  double pi1_hat = 0.0;
  std::uint64_t seed = 0;          // seed of the restart that produced it
  std::size_t restart_index = 0;
  double train_log_post = 0.0;
};

FittedModel model_from_restarts(const RestartsResult& fit);

// Two-valued score: pi1_hat on rows the function marks, pi0_hat elsewhere.
std::vector<double> predict_scores(const FittedModel& model, const Dataset& d);

// Mann-Whitney AUC with half credit for ties, computed from midranks.
// Both classes must be present.
double auc_score(const std::vector<double>& scores, const BitVec& labels);

struct CvConfig {
  std::vector<double> theta_grid{2, 5, 10, 30};
  std::vector<double> geom_p_grid{0.1, 0.5, 0.9};
  std::size_t repetitions = 10;
  double fraction = 0.5;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;

  void validate() const;
};

struct CvRepRow {
  std::size_t rep = 0;
  double auc = 0.0;
  std::size_t m = 0;
  std::size_t sum_k = 0;
  double pi0_hat = 0.0;
  double pi1_hat = 0.0;
  std::string rule;
};

struct CvCellReport {
  double theta = 0.0;
  double geom_p = 0.0;
  std::vector<CvRepRow> reps;
  double mean_auc = 0.0;
  double mean_m = 0.0;
  double mean_sum_k = 0.0;
};

// For every (theta, geom_p) cell: repetitions rounds of a fresh uniform
// train/test split, an annealing fit on train, AUC on test. The same
// repetition uses the same split in every cell, so cells are compared on
// equal footing.
std::vector<CvCellReport> crossval(const Dataset& full, const PriorConfig& base,
                                   const AnnealConfig& fit, const CvConfig& cv);

struct RecoveryConfig {
  SimSpec base;                 // per-repetition seeds derived from `seed`
  std::size_t repetitions = 10;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

struct RecoveryRepRow {
  std::size_t rep = 0;
  double pi0_hat = 0.0;
  double pi1_hat = 0.0;
  std::size_t m = 0;
  std::size_t sum_k = 0;
  std::vector<std::uint8_t> exact;     // planted term recovered verbatim
  std::vector<std::uint8_t> contained; // some fitted term is a superset of it
};

struct RecoveryReport {
  std::vector<RecoveryRepRow> reps;
  std::vector<double> exact_rate;      // per planted term, over repetitions
  std::vector<double> contained_rate;
  double mean_pi0 = 0.0;
  double mean_pi1 = 0.0;
  double mean_m = 0.0;
  double mean_sum_k = 0.0;
};

RecoveryReport recovery_experiment(const RecoveryConfig& rc, const PriorConfig& prior,
                                   const AnnealConfig& fit);

}  // namespace boolmark
