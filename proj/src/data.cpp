#include "boolmark/data.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "boolmark/coverage.hpp"
#include "boolmark/rng.hpp"

namespace boolmark {

namespace {

// Plain comma split, trailing empty fields included.
std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void SimSpec::validate() const {
  if (n == 0 || p == 0) throw std::invalid_argument("SimSpec: n and p must be positive");
  if (term_sizes.empty()) throw std::invalid_argument("SimSpec: no term sizes");
  std::size_t total = 0;
  for (auto k : term_sizes) {
    if (k == 0) throw std::invalid_argument("SimSpec: term size zero");
    total += k;
  }
  if (total > p) throw std::invalid_argument("SimSpec: term sizes exceed p");
  if (!(pi0 >= 0.0 && pi0 <= 1.0 && pi1 >= 0.0 && pi1 <= 1.0))
    throw std::invalid_argument("SimSpec: probabilities outside [0,1]");
}

SimOutput simulate(const SimSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  SimOutput out;
  out.beta.resize(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j) out.beta[j] = rng.uniform01();

  out.data = Dataset(spec.n, spec.p);
  out.data.feature_names.resize(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j) {
    out.data.feature_names[j] = "x" + std::to_string(j);
    for (std::size_t i = 0; i < spec.n; ++i)
      if (rng.bernoulli(out.beta[j])) out.data.columns[j].set(i, true);
  }

  out.truth = DnfFunction(spec.p);
  std::size_t start = 0;
  for (auto k : spec.term_sizes) {
    Conjunction c(spec.p);
    for (std::size_t j = start; j < start + k; ++j) c.add(j);
    out.truth.add_term(std::move(c));
    start += k;
  }

  const CoverageCache cache = build_coverage(out.truth, out.data);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double prob = cache.marked().get(i) ? spec.pi1 : spec.pi0;
    if (rng.bernoulli(prob)) out.data.y.set(i, true);
  }
  return out;
}

void CategoricalTable::validate() const {
  if (rows.size() != labels.size())
    throw std::invalid_argument("CategoricalTable: rows/labels size mismatch");
  for (const auto& r : rows)
    if (r.size() != attribute_names.size())
      throw std::invalid_argument("CategoricalTable: ragged rows");
  for (auto l : labels)
    if (l > 1) throw std::invalid_argument("CategoricalTable: labels must be 0/1");
}

EncodeResult one_hot_encode(const CategoricalTable& table) {
  table.validate();
  if (table.rows.empty()) throw std::invalid_argument("one_hot_encode: empty table");
  const std::size_t n = table.rows.size();
  const std::size_t attrs = table.attribute_names.size();

  EncodeResult out;
  std::vector<BitVec> columns;
  std::vector<std::string> names;
  for (std::size_t a = 0; a < attrs; ++a) {
    std::set<std::string> distinct;
    for (const auto& r : table.rows) distinct.insert(r[a]);
    if (distinct.size() < 2) {
      out.dropped.push_back(table.attribute_names[a]);
      continue;
    }
    for (const auto& value : distinct) {  // std::set iterates lexicographically
      BitVec col(n);
      for (std::size_t i = 0; i < n; ++i)
        if (table.rows[i][a] == value) col.set(i, true);
      columns.push_back(std::move(col));
      names.push_back(table.attribute_names[a] + " = " + value);
    }
  }
  if (columns.empty()) throw std::invalid_argument("one_hot_encode: no informative attributes");

  out.data = Dataset(n, columns.size());
  out.data.columns = std::move(columns);
  out.data.feature_names = std::move(names);
  for (std::size_t i = 0; i < n; ++i)
    if (table.labels[i]) out.data.y.set(i, true);
  return out;
}

CategoricalTable load_mushroom(const std::string& path) {
  static const std::vector<std::string> kAttrs = {
      "cap-shape", "cap-surface", "cap-color", "bruises", "odor",
      "gill-attachment", "gill-spacing", "gill-size", "gill-color",
      "stalk-shape", "stalk-root", "stalk-surface-above-ring",
      "stalk-surface-below-ring", "stalk-color-above-ring",
      "stalk-color-below-ring", "veil-type", "veil-color", "ring-number",
      "ring-type", "spore-print-color", "population", "habitat"};

  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mushroom: cannot open " + path);

  CategoricalTable table;
  table.attribute_names = kAttrs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_commas(line);
    if (fields.size() != kAttrs.size() + 1)
      throw std::runtime_error("load_mushroom: line " + std::to_string(lineno) +
                               " has " + std::to_string(fields.size()) + " fields");
    if (fields[0] != "e" && fields[0] != "p")
      throw std::runtime_error("load_mushroom: line " + std::to_string(lineno) +
                               " has class '" + fields[0] + "'");
    table.labels.push_back(fields[0] == "p" ? 1 : 0);
    table.rows.emplace_back(fields.begin() + 1, fields.end());
  }
  if (table.rows.empty()) throw std::runtime_error("load_mushroom: no rows in " + path);
  return table;
}

Dataset subset_rows(const Dataset& d, const std::vector<std::size_t>& rows) {
  d.validate();
  if (rows.empty()) throw std::invalid_argument("subset_rows: empty selection");
  Dataset out(rows.size(), d.p);
  out.feature_names = d.feature_names;
  for (std::size_t j = 0; j < d.p; ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (d.columns[j].get(rows[i])) out.columns[j].set(i, true);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (d.y.get(rows[i])) out.y.set(i, true);
  return out;
}

SplitResult split_dataset(const Dataset& d, double fraction, std::uint64_t seed) {
  d.validate();
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("split_dataset: fraction outside (0,1)");
  const auto n_train = static_cast<std::size_t>(fraction * double(d.n));
  if (n_train == 0 || n_train >= d.n)
    throw std::invalid_argument("split_dataset: degenerate split sizes");

  std::vector<std::size_t> perm(d.n);
  for (std::size_t i = 0; i < d.n; ++i) perm[i] = i;
  Rng rng(seed);
  for (std::size_t i = d.n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_below(i)]);

  SplitResult out;
  out.train_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = subset_rows(d, out.train_rows);
  out.test = subset_rows(d, out.test_rows);
  return out;
}

void save_dataset_csv(const Dataset& d, const std::string& path) {
  d.validate();
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("save_dataset_csv: cannot open " + path);
  for (std::size_t j = 0; j < d.p; ++j) {
    const std::string name =
        d.feature_names.empty() ? "x" + std::to_string(j) : d.feature_names[j];
    outf << name << ',';
  }
  outf << "y\n";
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t j = 0; j < d.p; ++j) outf << (d.columns[j].get(i) ? "1," : "0,");
    outf << (d.y.get(i) ? '1' : '0') << '\n';
  }
  if (!outf) throw std::runtime_error("save_dataset_csv: write failed for " + path);
}

Dataset load_dataset_csv(const std::string& path, const std::string& y_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_dataset_csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_commas(line);
  std::size_t y_idx = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == y_column) {
      if (y_idx != header.size())
        throw std::runtime_error("load_dataset_csv: duplicate outcome column");
      y_idx = j;
    }
  }
  if (y_idx == header.size())
    throw std::runtime_error("load_dataset_csv: no column named '" + y_column + "'");
  if (header.size() < 2)
    throw std::runtime_error("load_dataset_csv: no feature columns");

  std::vector<std::vector<std::uint8_t>> cells;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_commas(line);
    if (fields.size() != header.size())
      throw std::runtime_error("load_dataset_csv: line " + std::to_string(lineno) +
                               " has " + std::to_string(fields.size()) +
                               " cells, expected " + std::to_string(header.size()));
    std::vector<std::uint8_t> row;
    row.reserve(fields.size());
    for (const auto& field : fields) {
      if (field == "0")
        row.push_back(0);
      else if (field == "1")
        row.push_back(1);
      else
        throw std::runtime_error("load_dataset_csv: line " + std::to_string(lineno) +
                                 " has non-binary cell '" + field + "'");
    }
    cells.push_back(std::move(row));
  }
  if (cells.empty()) throw std::runtime_error("load_dataset_csv: no data rows");

  Dataset d(cells.size(), header.size() - 1);
  d.feature_names.reserve(d.p);
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != y_idx) d.feature_names.push_back(header[j]);
  for (std::size_t i = 0; i < d.n; ++i) {
    std::size_t out_j = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      const std::uint8_t v = cells[i][j];
      if (j == y_idx) {
        if (v) d.y.set(i, true);
      } else {
        if (v) d.columns[out_j].set(i, true);
        ++out_j;
      }
    }
  }
  return d;
}

Dataset augment_with_negations(const Dataset& d) {
  d.validate();
  Dataset out(d.n, 2 * d.p);
  out.y = d.y;
  out.feature_names.resize(2 * d.p);
  for (std::size_t j = 0; j < d.p; ++j) {
    const std::string name =
        d.feature_names.empty() ? "x" + std::to_string(j) : d.feature_names[j];
    out.columns[j] = d.columns[j];
    out.feature_names[j] = name;
    BitVec neg(d.n, true);
    neg ^= d.columns[j];
    out.columns[d.p + j] = std::move(neg);
    out.feature_names[d.p + j] = "not " + name;
  }
  return out;
}

}  // namespace boolmark
