#include "boolmark/dnf.hpp"

#include <algorithm>
#include <stdexcept>

namespace boolmark {

Conjunction symmetric_difference(const Conjunction& a, const Conjunction& b) {
  return Conjunction::from_on_bits(a.vars() ^ b.vars());
}

Conjunction intersect(const Conjunction& a, const Conjunction& b) {
  return Conjunction::from_on_bits(a.vars() & b.vars());
}

DnfFunction::DnfFunction(std::size_t num_vars, std::vector<Conjunction> terms)
    : num_vars_(num_vars) {
  for (auto& c : terms) add_term(std::move(c));
}

std::size_t DnfFunction::total_size() const {
  std::size_t s = 0;
  for (const auto& c : terms_) s += c.size();
  return s;
}

bool DnfFunction::contains_term(const Conjunction& c) const {
  return std::find(terms_.begin(), terms_.end(), c) != terms_.end();
}

void DnfFunction::check_var_width(const Conjunction& c) const {
  if (c.num_vars() != num_vars_)
    throw std::invalid_argument("DnfFunction: term has wrong variable count");
}

void DnfFunction::add_term(Conjunction c) {
  check_var_width(c);
  if (contains_term(c)) throw std::invalid_argument("DnfFunction: duplicate term");
  terms_.push_back(std::move(c));
}

void DnfFunction::remove_term(std::size_t i) {
  if (i >= terms_.size()) throw std::out_of_range("DnfFunction: term index");
  terms_.erase(terms_.begin() + static_cast<std::ptrdiff_t>(i));
}

void DnfFunction::replace_term(std::size_t i, Conjunction c) {
  if (i >= terms_.size()) throw std::out_of_range("DnfFunction: term index");
  check_var_width(c);
  for (std::size_t t = 0; t < terms_.size(); ++t)
    if (t != i && terms_[t] == c)
      throw std::invalid_argument("DnfFunction: duplicate term");
  terms_[i] = std::move(c);
}

bool DnfFunction::evaluate(const BitVec& row) const {
  for (const auto& c : terms_)
    if (c.satisfied_by(row)) return true;
  return false;
}

bool DnfFunction::equals_as_set(const DnfFunction& other) const {
  if (num_vars_ != other.num_vars_ || terms_.size() != other.terms_.size())
    return false;
  // Terms are distinct within each function, so one-way containment suffices.
  for (const auto& c : terms_)
    if (!other.contains_term(c)) return false;
  return true;
}

std::string render_term(const Conjunction& c, const std::vector<std::string>& names) {
  if (c.empty()) return "TRUE";
  std::string out = "(";
  bool first = true;
  for (auto j : c.indices()) {
    if (!first) out += " AND ";
    first = false;
    if (j < names.size())
      out += names[j];
    else
      out += "x" + std::to_string(j);
  }
  out += ")";
  return out;
}

std::string render_dnf(const DnfFunction& f, const std::vector<std::string>& names) {
  if (f.num_terms() == 0) return "FALSE";
  std::string out;
  for (std::size_t i = 0; i < f.num_terms(); ++i) {
    if (i) out += " OR ";
    out += render_term(f.term(i), names);
  }
  return out;
}

}  // namespace boolmark
