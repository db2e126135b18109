#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "boolmark/bitvec.hpp"

namespace boolmark {

// Binary design matrix stored column-wise (one bit vector of length n per
// variable) plus the binary outcome vector. Column storage makes term
// coverage a word-level AND across a few columns.
struct Dataset {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<BitVec> columns;             // p vectors, each of width n
  BitVec y;                                // width n
  std::vector<std::string> feature_names;  // empty, or exactly p entries

  Dataset() = default;
  Dataset(std::size_t n_, std::size_t p_)
      : n(n_), p(p_), columns(p_, BitVec(n_)), y(n_) {}

  std::size_t num_positive() const { return y.count(); }

  // Row i gathered into a width-p vector. Slow path, meant for per-row
  // evaluation and tests, not for samplers.
  BitVec row(std::size_t i) const {
    if (i >= n) throw std::out_of_range("Dataset: row index");
    BitVec r(p);
    for (std::size_t j = 0; j < p; ++j)
      if (columns[j].get(i)) r.set(j, true);
    return r;
  }

  void validate() const {
    if (columns.size() != p) throw std::invalid_argument("Dataset: column count != p");
    for (const auto& c : columns)
      if (c.width() != n) throw std::invalid_argument("Dataset: column width != n");
    if (y.width() != n) throw std::invalid_argument("Dataset: outcome width != n");
    if (!feature_names.empty() && feature_names.size() != p)
      throw std::invalid_argument("Dataset: feature name count != p");
  }

  static Dataset from_rows(const std::vector<BitVec>& rows, const BitVec& y_) {
    if (rows.empty()) throw std::invalid_argument("Dataset: no rows");
    Dataset d(rows.size(), rows.front().width());
    for (std::size_t i = 0; i < d.n; ++i) {
      if (rows[i].width() != d.p) throw std::invalid_argument("Dataset: ragged rows");
      for (std::size_t j = 0; j < d.p; ++j)
        if (rows[i].get(j)) d.columns[j].set(i, true);
    }
    if (y_.width() != d.n) throw std::invalid_argument("Dataset: outcome width != n");
    d.y = y_;
    return d;
  }
};

}  // namespace boolmark
