#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "boolmark/dataset.hpp"
#include "boolmark/dnf.hpp"

namespace boolmark {

// Synthetic generator: column j is iid Bernoulli(beta_j) with beta_j drawn
// uniformly once per column, the planted function is made of consecutive
// disjoint index blocks of the requested sizes, and the outcome is Bernoulli
// pi1 on rows the function marks and pi0 elsewhere.
struct SimSpec {
  std::size_t n = 1000;
  std::size_t p = 100;
  std::vector<std::size_t> term_sizes{3};
  double pi0 = 0.1;
  double pi1 = 0.9;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SimOutput {
  Dataset data;
  DnfFunction truth;
  std::vector<double> beta;
};

SimOutput simulate(const SimSpec& spec);

// Categorical table headed for one-hot encoding. Missing-value codes are not
// special: a "?" is just one more category.
struct CategoricalTable {
  std::vector<std::string> attribute_names;
  std::vector<std::vector<std::string>> rows;  // n x attributes
  std::vector<std::uint8_t> labels;            // 0/1 outcome per row

  void validate() const;
};

struct EncodeResult {
  Dataset data;
  std::vector<std::string> dropped;  // constant attributes, skipped with a note
};

// One indicator column per distinct observed value of each attribute
// (values sorted lexicographically, names "attr = value"); attributes with a
// single observed value are dropped.
EncodeResult one_hot_encode(const CategoricalTable& table);

// The classic 23-column single-letter-code format: class first ('p' is the
// positive outcome, 'e' negative), then 22 named attributes.
CategoricalTable load_mushroom(const std::string& path);

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;  // original row indices, ascending
  std::vector<std::size_t> test_rows;
};

// Uniform split without replacement: floor(fraction * n) rows to train, the
// rest to test. Either side ending up empty is an error.
SplitResult split_dataset(const Dataset& d, double fraction, std::uint64_t seed);

Dataset subset_rows(const Dataset& d, const std::vector<std::size_t>& rows);

// 0/1 CSV with a header; the outcome lives in the designated column, every
// other column is a feature.
void save_dataset_csv(const Dataset& d, const std::string& path);
Dataset load_dataset_csv(const std::string& path, const std::string& y_column = "y");

// Doubles the feature set with complement columns named "not <name>".
Dataset augment_with_negations(const Dataset& d);

}  // namespace boolmark
