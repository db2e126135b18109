#pragma once

#include <cstddef>
#include <vector>

#include "boolmark/dataset.hpp"
#include "boolmark/dnf.hpp"

namespace boolmark {

// Counts that the likelihood depends on: sample size, positives, rows marked
// by the function, and positives among the marked rows.
struct SuffStats {
  std::size_t n = 0;
  std::size_t n_p = 0;
  std::size_t n_m = 0;
  std::size_t n_pm = 0;

  bool operator==(const SuffStats&) const = default;
};

// Rows satisfying one term: AND of the member columns, all-ones for the
// empty term.
BitVec cover_of(const Conjunction& c, const Dataset& d);

// Per-term covers plus their union, kept alongside a DnfFunction.
class CoverageCache {
public:
  CoverageCache() = default;

  std::size_t num_terms() const { return per_term_.size(); }
  const BitVec& term_cover(std::size_t i) const { return per_term_.at(i); }
  const BitVec& marked() const { return marked_; }

  void set_term_cover(std::size_t i, BitVec cover) { per_term_.at(i) = std::move(cover); }
  void erase_term(std::size_t i);
  void append_term(BitVec cover) { per_term_.push_back(std::move(cover)); }
  void set_marked(BitVec m) { marked_ = std::move(m); }
  void recompute_marked(std::size_t n);

private:
  std::vector<BitVec> per_term_;
  BitVec marked_;
};

CoverageCache build_coverage(const DnfFunction& f, const Dataset& d);
SuffStats suffstats(const CoverageCache& cache, const Dataset& d);

// Flips one variable of one term in place, updating f and the cache
// together. Turning a bit on narrows that term's cover with a single AND;
// turning one off re-ANDs the remaining columns. Emptying the variable set
// of the only remaining term is rejected.
void update_coverage_flip(DnfFunction& f, CoverageCache& cache, const Dataset& d,
                          std::size_t term, std::size_t var, bool turn_on);

struct TermCover {
  Conjunction term;
  BitVec cover;
};

// A DNF bound to one dataset with coverage and sufficient statistics kept
// consistent under structural edits. Proposals are planned without touching
// the state, so a rejected move costs nothing to undo.
class CoveredDnf {
public:
  CoveredDnf(DnfFunction f, const Dataset& d);

  const DnfFunction& dnf() const { return f_; }
  const CoverageCache& cache() const { return cache_; }
  const SuffStats& stats() const { return stats_; }
  const Dataset& data() const { return *d_; }

  struct Edit {
    std::vector<std::pair<std::size_t, TermCover>> replace;  // in-place term swaps
    std::vector<std::size_t> erase;                          // sorted descending
    std::vector<TermCover> append;
    BitVec marked;
    SuffStats stats;
  };

  // allow_empty_term permits flipping the last variable of a term off (the
  // resulting empty term marks every row); only the flat-size-prior single
  // marker chain uses that.
  Edit plan_flip(std::size_t t, std::size_t var, bool turn_on,
                 bool allow_empty_term = false) const;
  Edit plan_add(Conjunction c) const;
  Edit plan_remove(std::size_t t) const;
  Edit plan_replace_pair(std::size_t t1, std::size_t t2, Conjunction merged) const;
  Edit plan_split(std::size_t t, Conjunction keep, Conjunction append) const;

  void apply(Edit&& e);

  // Full recompute; true when it matches the incremental state.
  bool consistent() const;

private:
  Edit finish_edit(Edit e) const;
  SuffStats stats_for(const BitVec& marked) const;

  DnfFunction f_;
  const Dataset* d_;
  CoverageCache cache_;
  SuffStats stats_;
};

}  // namespace boolmark
