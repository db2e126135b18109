#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "boolmark/bitvec.hpp"

namespace boolmark {

// One conjunctive term: a subset of variable indices out of p. A row
// satisfies the term when every listed variable is 1 in that row. The empty
// term is satisfied by every row.
class Conjunction {
public:
  Conjunction() = default;
  explicit Conjunction(std::size_t num_vars) : vars_(num_vars) {}
  Conjunction(std::size_t num_vars, std::initializer_list<std::size_t> idx)
      : vars_(num_vars) {
    for (auto j : idx) add(j);
  }

  static Conjunction from_on_bits(const BitVec& pattern) {
    Conjunction c;
    c.vars_ = pattern;
    c.size_ = pattern.count();
    return c;
  }

  std::size_t num_vars() const { return vars_.width(); }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(std::size_t j) const { return vars_.get(j); }

  void add(std::size_t j) {
    if (vars_.get(j)) throw std::invalid_argument("Conjunction: variable already present");
    vars_.set(j, true);
    ++size_;
  }

  void remove(std::size_t j) {
    if (!vars_.get(j)) throw std::invalid_argument("Conjunction: variable not present");
    vars_.set(j, false);
    --size_;
  }

  const BitVec& vars() const { return vars_; }
  std::vector<std::size_t> indices() const { return vars_.on_bits(); }

  bool satisfied_by(const BitVec& row) const { return vars_.is_subset_of(row); }

  bool operator==(const Conjunction&) const = default;

private:
  BitVec vars_;
  std::size_t size_ = 0;
};

Conjunction symmetric_difference(const Conjunction& a, const Conjunction& b);
Conjunction intersect(const Conjunction& a, const Conjunction& b);

// Monotone DNF: a set of conjunctive terms, true for a row when at least one
// term is satisfied. Zero terms means identically false. Term order is
// preserved for rendering but never affects equality.
class DnfFunction {
public:
  DnfFunction() = default;
  explicit DnfFunction(std::size_t num_vars) : num_vars_(num_vars) {}
  DnfFunction(std::size_t num_vars, std::vector<Conjunction> terms);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_terms() const { return terms_.size(); }
  const Conjunction& term(std::size_t i) const { return terms_.at(i); }
  const std::vector<Conjunction>& terms() const { return terms_; }

  std::size_t total_size() const;  // sum of term sizes
  bool contains_term(const Conjunction& c) const;

  void add_term(Conjunction c);              // rejects duplicates
  void remove_term(std::size_t i);
  void replace_term(std::size_t i, Conjunction c);  // rejects duplicates elsewhere

  bool evaluate(const BitVec& row) const;

  // Set equality: same terms regardless of order.
  bool equals_as_set(const DnfFunction& other) const;
  bool operator==(const DnfFunction& other) const { return equals_as_set(other); }

private:
  void check_var_width(const Conjunction& c) const;

  std::size_t num_vars_ = 0;
  std::vector<Conjunction> terms_;
};

// "(a AND b) OR (c)" with the given variable names; "TRUE" for an empty term,
// "FALSE" for an empty function. Names default to x0..x{p-1} when absent.
std::string render_term(const Conjunction& c, const std::vector<std::string>& names);
std::string render_dnf(const DnfFunction& f, const std::vector<std::string>& names);

}  // namespace boolmark
