#include "boolmark/coverage.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <utility>

namespace boolmark {

BitVec cover_of(const Conjunction& c, const Dataset& d) {
  if (c.num_vars() != d.p) throw std::invalid_argument("cover_of: term width != p");
  BitVec cover(d.n, true);
  for (auto j : c.indices()) cover &= d.columns[j];
  return cover;
}

void CoverageCache::erase_term(std::size_t i) {
  if (i >= per_term_.size()) throw std::out_of_range("CoverageCache: term index");
  per_term_.erase(per_term_.begin() + static_cast<std::ptrdiff_t>(i));
}

void CoverageCache::recompute_marked(std::size_t n) {
  BitVec m(n);
  for (const auto& c : per_term_) m |= c;
  marked_ = std::move(m);
}

CoverageCache build_coverage(const DnfFunction& f, const Dataset& d) {
  if (f.num_vars() != d.p) throw std::invalid_argument("build_coverage: f width != p");
  CoverageCache cache;
  for (std::size_t i = 0; i < f.num_terms(); ++i)
    cache.append_term(cover_of(f.term(i), d));
  cache.recompute_marked(d.n);
  return cache;
}

SuffStats suffstats(const CoverageCache& cache, const Dataset& d) {
  SuffStats s;
  s.n = d.n;
  s.n_p = d.y.count();
  s.n_m = cache.marked().count();
  s.n_pm = BitVec::and_count(cache.marked(), d.y);
  return s;
}

void update_coverage_flip(DnfFunction& f, CoverageCache& cache, const Dataset& d,
                          std::size_t term, std::size_t var, bool turn_on) {
  if (term >= f.num_terms()) throw std::out_of_range("update_coverage_flip: term index");
  if (var >= d.p) throw std::out_of_range("update_coverage_flip: variable index");
  const Conjunction& c = f.term(term);
  if (turn_on && c.contains(var))
    throw std::invalid_argument("update_coverage_flip: variable already in term");
  if (!turn_on && !c.contains(var))
    throw std::invalid_argument("update_coverage_flip: variable not in term");
  if (!turn_on && c.size() == 1 && f.num_terms() == 1)
    throw std::invalid_argument("update_coverage_flip: would empty the only term");

  Conjunction next = c;
  if (turn_on)
    next.add(var);
  else
    next.remove(var);
  if (f.contains_term(next))
    throw std::invalid_argument("update_coverage_flip: duplicate term");

  BitVec cover = turn_on ? (cache.term_cover(term) & d.columns[var]) : cover_of(next, d);
  f.replace_term(term, std::move(next));
  cache.set_term_cover(term, std::move(cover));
  cache.recompute_marked(d.n);
}

CoveredDnf::CoveredDnf(DnfFunction f, const Dataset& d) : f_(std::move(f)), d_(&d) {
  d.validate();
  cache_ = build_coverage(f_, d);
  stats_ = suffstats(cache_, d);
}

SuffStats CoveredDnf::stats_for(const BitVec& marked) const {
  SuffStats s;
  s.n = d_->n;
  s.n_p = stats_.n_p;
  s.n_m = marked.count();
  s.n_pm = BitVec::and_count(marked, d_->y);
  return s;
}

// Computes the candidate marked set and stats from the term edits collected
// so far: union of untouched covers, replacements, and appends.
CoveredDnf::Edit CoveredDnf::finish_edit(Edit e) const {
  BitVec marked(d_->n);
  for (std::size_t i = 0; i < cache_.num_terms(); ++i) {
    bool skip = false;
    for (auto t : e.erase) skip = skip || (t == i);
    const BitVec* cover = &cache_.term_cover(i);
    for (const auto& [idx, tc] : e.replace)
      if (idx == i) cover = &tc.cover;
    if (!skip) marked |= *cover;
  }
  for (const auto& tc : e.append) marked |= tc.cover;
  e.stats = stats_for(marked);
  e.marked = std::move(marked);
  return e;
}

CoveredDnf::Edit CoveredDnf::plan_flip(std::size_t t, std::size_t var, bool turn_on,
                                       bool allow_empty_term) const {
  const Conjunction& c = f_.term(t);
  Conjunction next = c;
  if (turn_on)
    next.add(var);
  else
    next.remove(var);
  if (next.empty() && !allow_empty_term)
    throw std::invalid_argument("plan_flip: flip would empty the term");
  Edit e;
  BitVec cover =
      turn_on ? (cache_.term_cover(t) & d_->columns[var]) : cover_of(next, *d_);
  e.replace.emplace_back(t, TermCover{std::move(next), std::move(cover)});
  return finish_edit(std::move(e));
}

CoveredDnf::Edit CoveredDnf::plan_add(Conjunction c) const {
  Edit e;
  BitVec cover = cover_of(c, *d_);
  e.append.push_back(TermCover{std::move(c), std::move(cover)});
  // Adding a term only widens the union.
  e.marked = cache_.marked() | e.append.front().cover;
  e.stats = stats_for(e.marked);
  return e;
}

CoveredDnf::Edit CoveredDnf::plan_remove(std::size_t t) const {
  if (t >= f_.num_terms()) throw std::out_of_range("plan_remove: term index");
  Edit e;
  e.erase.push_back(t);
  return finish_edit(std::move(e));
}

CoveredDnf::Edit CoveredDnf::plan_replace_pair(std::size_t t1, std::size_t t2,
                                               Conjunction merged) const {
  if (t1 == t2) throw std::invalid_argument("plan_replace_pair: identical indices");
  const std::size_t keep = std::min(t1, t2), drop = std::max(t1, t2);
  Edit e;
  BitVec cover = cover_of(merged, *d_);
  e.replace.emplace_back(keep, TermCover{std::move(merged), std::move(cover)});
  e.erase.push_back(drop);
  return finish_edit(std::move(e));
}

CoveredDnf::Edit CoveredDnf::plan_split(std::size_t t, Conjunction keep,
                                        Conjunction append) const {
  if (t >= f_.num_terms()) throw std::out_of_range("plan_split: term index");
  Edit e;
  BitVec kc = cover_of(keep, *d_);
  BitVec ac = cover_of(append, *d_);
  e.replace.emplace_back(t, TermCover{std::move(keep), std::move(kc)});
  e.append.push_back(TermCover{std::move(append), std::move(ac)});
  return finish_edit(std::move(e));
}

void CoveredDnf::apply(Edit&& e) {
  // Erases go first: a replacement may equal a term that is being dropped in
  // the same edit (a merge where one term contains the other), and the
  // duplicate check must only see the surviving terms. Plans keep replaced
  // slots below erased ones, so the indices stay valid.
  std::sort(e.erase.begin(), e.erase.end(), std::greater<>());
  for (auto idx : e.erase) {
    f_.remove_term(idx);
    cache_.erase_term(idx);
  }
  for (auto& [idx, tc] : e.replace) {
    f_.replace_term(idx, std::move(tc.term));
    cache_.set_term_cover(idx, std::move(tc.cover));
  }
  for (auto& tc : e.append) {
    f_.add_term(std::move(tc.term));
    cache_.append_term(std::move(tc.cover));
  }
  cache_.set_marked(std::move(e.marked));
  stats_ = e.stats;
}

bool CoveredDnf::consistent() const {
  CoverageCache fresh = build_coverage(f_, *d_);
  if (fresh.num_terms() != cache_.num_terms()) return false;
  for (std::size_t i = 0; i < fresh.num_terms(); ++i)
    if (!(fresh.term_cover(i) == cache_.term_cover(i))) return false;
  if (!(fresh.marked() == cache_.marked())) return false;
  return suffstats(fresh, *d_) == stats_;
}

}  // namespace boolmark
