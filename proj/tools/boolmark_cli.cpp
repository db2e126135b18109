#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "boolmark/anneal.hpp"
#include "boolmark/coverage.hpp"
#include "boolmark/data.hpp"
#include "boolmark/eval.hpp"
#include "boolmark/posterior.hpp"
#include "boolmark/rjmcmc.hpp"
#include "boolmark/rng.hpp"
#include "boolmark/single_chain.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// A config problem is the caller's fault; a failure while running is not.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// Appends timestamped lines; the log is the only artifact allowed to differ
// between reruns of the same seed.
class RunLog {
public:
  explicit RunLog(const fs::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
  }
  void line(const std::string& msg) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    out_ << stamp << ' ' << msg << '\n';
    out_.flush();
  }

private:
  std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw UsageError("config file not found: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
}

json section(const json& j, const char* name) {
  if (!j.contains(name)) return json::object();
  if (!j.at(name).is_object()) throw UsageError(std::string("config: '") + name + "' must be an object");
  return j.at(name);
}

template <typename T>
T jget(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config: bad value for '") + key + "'");
  }
}

template <typename T>
void override_if(const std::optional<T>& flag, T& slot) {
  if (flag.has_value()) slot = *flag;
}

// ---- shared option bundles -------------------------------------------------

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "random seed (overrides config)");
  cmd->add_option("--jobs", o.jobs, "worker threads");
}

struct Resolved {
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  fs::path out;
};

Resolved resolve_common(const CommonOpts& o, const json& cfg, ordered_json& dump) {
  Resolved r;
  r.seed = jget<std::uint64_t>(cfg, "seed", 1);
  r.jobs = jget<std::size_t>(cfg, "jobs", 1);
  if (o.seed) r.seed = *o.seed;
  if (o.jobs) r.jobs = *o.jobs;
  std::string out = jget<std::string>(cfg, "output", "");
  if (!o.out_dir.empty()) out = o.out_dir;
  if (out.empty()) throw UsageError("no output directory (--out or config 'output')");
  r.out = out;
  dump["seed"] = r.seed;
  dump["jobs"] = r.jobs;
  dump["output"] = out;
  return r;
}

// ---- prior -----------------------------------------------------------------

struct PriorOpts {
  std::optional<double> theta;
  std::optional<double> geom_p;
  bool flat_size = false;
  bool flat_count = false;
  bool enforce_order = false;
};

void add_prior(CLI::App* cmd, PriorOpts& o) {
  cmd->add_option("--theta", o.theta, "truncated Poisson mean for term sizes");
  cmd->add_option("--geom-p", o.geom_p, "geometric success probability for the term count");
  cmd->add_flag("--flat-size", o.flat_size, "flat prior on term sizes");
  cmd->add_flag("--flat-count", o.flat_count, "flat prior on the term count");
  cmd->add_flag("--enforce-order", o.enforce_order, "reject Gibbs draws with pi0 > pi1");
}

boolmark::PriorConfig resolve_prior(const PriorOpts& o, const json& cfg, ordered_json& dump) {
  const json pj = section(cfg, "prior");
  boolmark::PriorConfig prior;

  const auto beta0 = jget<std::vector<double>>(pj, "beta0", {1.0, 1.0});
  const auto beta1 = jget<std::vector<double>>(pj, "beta1", {1.0, 1.0});
  if (beta0.size() != 2 || beta1.size() != 2)
    throw UsageError("config: beta0/beta1 must be [a, b]");
  prior.beta0 = {beta0[0], beta0[1]};
  prior.beta1 = {beta1[0], beta1[1]};

  json ts = section(pj, "term_size");
  std::string ts_kind = jget<std::string>(ts, "kind", "poisson");
  prior.poisson_theta = jget<double>(ts, "theta", 10.0);
  json nt = section(pj, "num_terms");
  std::string nt_kind = jget<std::string>(nt, "kind", "geometric");
  prior.geom_p = jget<double>(nt, "p", 0.5);
  prior.enforce_order = jget<bool>(pj, "enforce_order", false);

  if (o.theta) {
    ts_kind = "poisson";
    prior.poisson_theta = *o.theta;
  }
  if (o.geom_p) {
    nt_kind = "geometric";
    prior.geom_p = *o.geom_p;
  }
  if (o.flat_size) ts_kind = "flat";
  if (o.flat_count) nt_kind = "flat";
  if (o.enforce_order) prior.enforce_order = true;

  if (ts_kind == "poisson")
    prior.size_kind = boolmark::SizePriorKind::TruncatedPoisson;
  else if (ts_kind == "flat")
    prior.size_kind = boolmark::SizePriorKind::Flat;
  else
    throw UsageError("config: term_size.kind must be 'poisson' or 'flat'");
  if (nt_kind == "geometric")
    prior.count_kind = boolmark::CountPriorKind::Geometric;
  else if (nt_kind == "flat")
    prior.count_kind = boolmark::CountPriorKind::Flat;
  else
    throw UsageError("config: num_terms.kind must be 'geometric' or 'flat'");

  try {
    prior.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }

  ordered_json pd;
  pd["beta0"] = beta0;
  pd["beta1"] = beta1;
  pd["term_size"] =
      (prior.size_kind == boolmark::SizePriorKind::Flat)
          ? ordered_json{{"kind", "flat"}}
          : ordered_json{{"kind", "poisson"}, {"theta", prior.poisson_theta}};
  pd["num_terms"] = (prior.count_kind == boolmark::CountPriorKind::Flat)
                        ? ordered_json{{"kind", "flat"}}
                        : ordered_json{{"kind", "geometric"}, {"p", prior.geom_p}};
  pd["enforce_order"] = prior.enforce_order;
  dump["prior"] = pd;
  return prior;
}

// ---- data source -----------------------------------------------------------

struct DataOpts {
  std::string csv;
  std::string mushroom;
  std::string y_column;
  bool negations = false;
};

void add_data(CLI::App* cmd, DataOpts& o) {
  cmd->add_option("--csv", o.csv, "binary CSV dataset (header row, outcome column)");
  cmd->add_option("--mushroom", o.mushroom, "raw 23-column single-letter categorical file");
  cmd->add_option("--y-column", o.y_column, "outcome column name for --csv (default 'y')");
  cmd->add_flag("--negations", o.negations, "append complement feature columns");
}

boolmark::SimSpec sim_spec_from_json(const json& sj, std::uint64_t default_seed) {
  boolmark::SimSpec spec;
  spec.n = jget<std::size_t>(sj, "n", spec.n);
  spec.p = jget<std::size_t>(sj, "p", spec.p);
  spec.term_sizes = jget<std::vector<std::size_t>>(sj, "term_sizes", spec.term_sizes);
  spec.pi0 = jget<double>(sj, "pi0", spec.pi0);
  spec.pi1 = jget<double>(sj, "pi1", spec.pi1);
  spec.seed = jget<std::uint64_t>(sj, "seed", default_seed);
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return spec;
}

ordered_json sim_spec_dump(const boolmark::SimSpec& spec) {
  ordered_json sd;
  sd["n"] = spec.n;
  sd["p"] = spec.p;
  sd["term_sizes"] = spec.term_sizes;
  sd["pi0"] = spec.pi0;
  sd["pi1"] = spec.pi1;
  sd["seed"] = spec.seed;
  return sd;
}

// Loads the one configured source; `notes` collects loader warnings for the
// run log.
boolmark::Dataset resolve_data(const DataOpts& o, const json& cfg, std::uint64_t seed,
                               ordered_json& dump, std::vector<std::string>& notes) {
  const json dj = section(cfg, "data");
  std::string csv = o.csv.empty() ? jget<std::string>(dj, "csv", "") : o.csv;
  std::string mushroom =
      o.mushroom.empty() ? jget<std::string>(dj, "mushroom", "") : o.mushroom;
  std::string y_column =
      o.y_column.empty() ? jget<std::string>(dj, "y_column", "y") : o.y_column;
  const bool has_sim = dj.contains("simulate");
  bool negations = jget<bool>(dj, "negations", false) || o.negations;

  const int sources = int(!csv.empty()) + int(!mushroom.empty()) + int(has_sim);
  if (sources != 1)
    throw UsageError("exactly one data source required (data.simulate, --csv, or --mushroom)");

  ordered_json dd;
  boolmark::Dataset d;
  if (!csv.empty()) {
    if (!fs::exists(csv)) throw UsageError("dataset file not found: " + csv);
    d = boolmark::load_dataset_csv(csv, y_column);
    dd["csv"] = csv;
    dd["y_column"] = y_column;
  } else if (!mushroom.empty()) {
    if (!fs::exists(mushroom)) throw UsageError("dataset file not found: " + mushroom);
    const boolmark::CategoricalTable table = boolmark::load_mushroom(mushroom);
    boolmark::EncodeResult enc = boolmark::one_hot_encode(table);
    for (const auto& name : enc.dropped)
      notes.push_back("dropped constant attribute: " + name);
    d = std::move(enc.data);
    dd["mushroom"] = mushroom;
  } else {
    const boolmark::SimSpec spec = sim_spec_from_json(dj.at("simulate"), seed);
    d = boolmark::simulate(spec).data;
    dd["simulate"] = sim_spec_dump(spec);
  }
  if (negations) {
    d = boolmark::augment_with_negations(d);
    dd["negations"] = true;
  }
  dump["data"] = dd;
  notes.push_back("dataset: n=" + std::to_string(d.n) + " p=" + std::to_string(d.p) +
                  " positives=" + std::to_string(d.num_positive()));
  return d;
}

// ---- model artifacts ---------------------------------------------------------

ordered_json dnf_to_json(const boolmark::DnfFunction& f,
                         const std::vector<std::string>& names) {
  ordered_json terms = ordered_json::array();
  for (const auto& c : f.terms()) {
    ordered_json t;
    t["variables"] = c.indices();
    if (!names.empty()) {
      std::vector<std::string> vn;
      for (auto j : c.indices()) vn.push_back(names[j]);
      t["names"] = vn;
    }
    terms.push_back(t);
  }
  ordered_json out;
  out["num_vars"] = f.num_vars();
  out["num_terms"] = f.num_terms();
  out["terms"] = terms;
  return out;
}

void write_config(const fs::path& out, const ordered_json& dump) {
  write_text(out / "config.json", dump.dump(2) + "\n");
}

// ---- subcommand: simulate ----------------------------------------------------

struct SimulateOpts {
  CommonOpts common;
  std::optional<std::size_t> n, p;
  std::optional<std::string> term_sizes;
  std::optional<double> pi0, pi1;
};

int run_simulate(const SimulateOpts& o) {
  const json cfg = load_config_file(o.common.config_path);
  ordered_json dump;
  const Resolved r = resolve_common(o.common, cfg, dump);

  boolmark::SimSpec spec = sim_spec_from_json(section(cfg, "data").contains("simulate")
                                                  ? section(cfg, "data").at("simulate")
                                                  : json::object(),
                                              r.seed);
  if (o.n) spec.n = *o.n;
  if (o.p) spec.p = *o.p;
  if (o.pi0) spec.pi0 = *o.pi0;
  if (o.pi1) spec.pi1 = *o.pi1;
  if (o.common.seed) spec.seed = *o.common.seed;
  if (o.term_sizes) {
    spec.term_sizes.clear();
    std::stringstream ss(*o.term_sizes);
    std::string part;
    while (std::getline(ss, part, ',')) {
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc() || ptr != part.data() + part.size())
        throw UsageError("--term-sizes expects comma-separated integers");
      spec.term_sizes.push_back(v);
    }
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  dump["data"] = ordered_json{{"simulate", sim_spec_dump(spec)}};

  fs::create_directories(r.out);
  RunLog log(r.out / "run.log");
  log.line("simulate: begin");
  const boolmark::SimOutput sim = boolmark::simulate(spec);
  boolmark::save_dataset_csv(sim.data, (r.out / "dataset.csv").string());

  ordered_json truth;
  truth["function"] = dnf_to_json(sim.truth, sim.data.feature_names);
  truth["rule"] = boolmark::render_dnf(sim.truth, sim.data.feature_names);
  truth["pi0"] = spec.pi0;
  truth["pi1"] = spec.pi1;
  truth["beta"] = sim.beta;
  write_text(r.out / "truth.json", truth.dump(2) + "\n");
  write_config(r.out, dump);
  log.line("simulate: wrote dataset.csv and truth.json");
  return kExitOk;
}

// ---- subcommand: fit-single ----------------------------------------------------

struct FitSingleOpts {
  CommonOpts common;
  PriorOpts prior;
  DataOpts data;
  std::optional<std::size_t> chains, iters, burnin;
};

int run_fit_single(const FitSingleOpts& o) {
  const json cfg = load_config_file(o.common.config_path);
  ordered_json dump;
  const Resolved r = resolve_common(o.common, cfg, dump);
  const boolmark::PriorConfig prior = resolve_prior(o.prior, cfg, dump);

  const json sj = section(cfg, "single");
  boolmark::SingleChainConfig run;
  run.iters = jget<std::size_t>(sj, "iters", run.iters);
  run.num_chains = jget<std::size_t>(sj, "chains", run.num_chains);
  run.check_interval = jget<std::size_t>(sj, "check_interval", 0);
  override_if(o.iters, run.iters);
  override_if(o.chains, run.num_chains);
  // default burnin derives from iters after any --iters override
  run.burnin = jget<std::size_t>(sj, "burnin", run.iters / 2);
  override_if(o.burnin, run.burnin);
  run.seed = r.seed;
  try {
    run.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  dump["single"] = ordered_json{{"iters", run.iters},
                                {"burnin", run.burnin},
                                {"chains", run.num_chains},
                                {"check_interval", run.check_interval}};

  std::vector<std::string> notes;
  const boolmark::Dataset d = resolve_data(o.data, cfg, r.seed, dump, notes);

  fs::create_directories(r.out / "traces");
  RunLog log(r.out / "run.log");
  for (const auto& s : notes) log.line(s);
  log.line("fit-single: begin, chains=" + std::to_string(run.num_chains));
  write_config(r.out, dump);

  const std::vector<boolmark::ChainTrace> traces =
      boolmark::run_chains(d, prior, run, r.jobs);

  std::vector<std::size_t> pooled(d.p, 0);
  double mean_pi0 = 0.0, mean_pi1 = 0.0;
  std::size_t total_rows = 0;
  ordered_json chains_summary = ordered_json::array();
  for (std::size_t c = 0; c < traces.size(); ++c) {
    const auto& tr = traces[c];
    std::ostringstream csv;
    csv << "iteration,k,pi0,pi1,log_post\n";
    double c_pi0 = 0.0, c_pi1 = 0.0, c_k = 0.0;
    for (const auto& row : tr.rows) {
      csv << row.iteration << ',' << row.k << ',' << num(row.pi0) << ','
          << num(row.pi1) << ',' << num(row.log_post) << '\n';
      c_pi0 += row.pi0;
      c_pi1 += row.pi1;
      c_k += double(row.k);
    }
    write_text(r.out / "traces" / ("chain_" + std::to_string(c) + ".csv"), csv.str());
    for (std::size_t j = 0; j < d.p; ++j) pooled[j] += tr.inclusion_counts[j];
    mean_pi0 += c_pi0;
    mean_pi1 += c_pi1;
    total_rows += tr.rows.size();

    ordered_json cs;
    cs["chain"] = c;
    cs["seed"] = tr.seed;
    cs["recorded"] = tr.rows.size();
    cs["accepted_flips"] = tr.accepted_flips;
    cs["mean_pi0"] = c_pi0 / double(tr.rows.size());
    cs["mean_pi1"] = c_pi1 / double(tr.rows.size());
    cs["mean_k"] = c_k / double(tr.rows.size());
    chains_summary.push_back(cs);
  }

  std::ostringstream inc;
  inc << "variable,name,frequency\n";
  for (std::size_t j = 0; j < d.p; ++j) {
    const std::string name = d.feature_names.empty() ? "x" + std::to_string(j)
                                                     : d.feature_names[j];
    inc << j << ',' << name << ',' << num(double(pooled[j]) / double(total_rows)) << '\n';
  }
  write_text(r.out / "inclusion.csv", inc.str());

  ordered_json summary;
  summary["chains"] = chains_summary;
  summary["pooled_mean_pi0"] = mean_pi0 / double(total_rows);
  summary["pooled_mean_pi1"] = mean_pi1 / double(total_rows);
  write_text(r.out / "summary.json", summary.dump(2) + "\n");
  log.line("fit-single: done");
  return kExitOk;
}

// ---- subcommand: anneal ----------------------------------------------------

struct AnnealOpts {
  CommonOpts common;
  PriorOpts prior;
  DataOpts data;
  std::optional<std::size_t> steps, restarts, m0;
  std::optional<double> rho, ln_lambda0;
};

boolmark::AnnealConfig resolve_anneal(const AnnealOpts& o, const json& cfg,
                                      const Resolved& r, ordered_json& dump) {
  const json aj = section(cfg, "anneal");
  boolmark::AnnealConfig run;
  run.steps = jget<std::size_t>(aj, "steps", run.steps);
  run.restarts = jget<std::size_t>(aj, "restarts", run.restarts);
  run.m0 = jget<std::size_t>(aj, "m0", run.m0);
  run.ln_lambda0 = jget<double>(aj, "ln_lambda0", run.ln_lambda0);
  run.rho = jget<double>(aj, "rho", run.rho);
  run.boost_all_dimension_moves = jget<bool>(aj, "boost_all_dimension_moves", false);
  run.check_interval = jget<std::size_t>(aj, "check_interval", 0);
  const auto weights = jget<std::vector<double>>(
      aj, "move_weights", std::vector<double>(run.move_weights.begin(), run.move_weights.end()));
  if (weights.size() != run.move_weights.size())
    throw UsageError("config: move_weights must have 7 entries");
  std::copy(weights.begin(), weights.end(), run.move_weights.begin());
  override_if(o.steps, run.steps);
  override_if(o.restarts, run.restarts);
  override_if(o.m0, run.m0);
  override_if(o.rho, run.rho);
  override_if(o.ln_lambda0, run.ln_lambda0);
  run.seed = r.seed;
  run.jobs = r.jobs;
  try {
    run.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  dump["anneal"] = ordered_json{
      {"steps", run.steps},
      {"restarts", run.restarts},
      {"m0", run.m0},
      {"ln_lambda0", run.ln_lambda0},
      {"rho", run.rho},
      {"move_weights", weights},
      {"boost_all_dimension_moves", run.boost_all_dimension_moves},
      {"check_interval", run.check_interval}};
  return run;
}

void add_anneal_flags(CLI::App* cmd, AnnealOpts& o) {
  cmd->add_option("--steps", o.steps, "annealing steps per restart");
  cmd->add_option("--restarts", o.restarts, "independent restarts");
  cmd->add_option("--m0", o.m0, "initial terms per restart");
  cmd->add_option("--rho", o.rho, "lambda cooling factor per step");
  cmd->add_option("--ln-lambda0", o.ln_lambda0, "initial log boost");
}

int run_anneal(const AnnealOpts& o) {
  const json cfg = load_config_file(o.common.config_path);
  ordered_json dump;
  const Resolved r = resolve_common(o.common, cfg, dump);
  const boolmark::PriorConfig prior = resolve_prior(o.prior, cfg, dump);
  const boolmark::AnnealConfig run = resolve_anneal(o, cfg, r, dump);

  std::vector<std::string> notes;
  const boolmark::Dataset d = resolve_data(o.data, cfg, r.seed, dump, notes);

  fs::create_directories(r.out / "traces");
  RunLog log(r.out / "run.log");
  for (const auto& s : notes) log.line(s);
  log.line("anneal: begin, restarts=" + std::to_string(run.restarts));
  write_config(r.out, dump);

  const boolmark::RestartsResult fit = boolmark::run_restarts(d, prior, run);
  for (std::size_t i = 0; i < fit.runs.size(); ++i) {
    std::ostringstream csv;
    csv << "step,move,accepted,m,sum_k,log_post\n";
    for (const auto& row : fit.runs[i].trace)
      csv << row.step << ',' << row.move << ',' << int(row.accepted) << ',' << row.m
          << ',' << row.sum_k << ',' << num(row.log_post) << '\n';
    write_text(r.out / "traces" / ("restart_" + std::to_string(i) + ".csv"), csv.str());
  }

  const boolmark::AnnealResult& best = fit.best();
  ordered_json model;
  model["function"] = dnf_to_json(best.best_f, d.feature_names);
  model["pi0"] = best.best_probs.pi0;
  model["pi1"] = best.best_probs.pi1;
  model["log_post"] = best.best_log_post;
  model["log_like"] = best.best_parts.log_like;
  model["log_prior_f"] = best.best_parts.log_prior_f;
  model["log_prior_probs"] = best.best_parts.log_prior_probs;
  model["restart_index"] = best.restart_index;
  model["restart_seed"] = best.seed;
  write_text(r.out / "model.json", model.dump(2) + "\n");

  std::ostringstream rules;
  rules << boolmark::render_dnf(best.best_f, d.feature_names) << '\n'
        << "pi1 = " << num(best.best_probs.pi1) << " on marked rows, pi0 = "
        << num(best.best_probs.pi0) << " elsewhere\n"
        << "log posterior = " << num(best.best_log_post) << " (restart "
        << best.restart_index << ")\n";
  write_text(r.out / "rules.txt", rules.str());
  log.line("anneal: done, best restart " + std::to_string(best.restart_index));
  return kExitOk;
}

// ---- subcommand: rjmcmc ----------------------------------------------------

struct RjOpts {
  CommonOpts common;
  PriorOpts prior;
  DataOpts data;
  std::optional<std::size_t> iters, max_terms;
  std::optional<double> p_birth, p_death;
};

int run_rjmcmc(const RjOpts& o) {
  const json cfg = load_config_file(o.common.config_path);
  ordered_json dump;
  const Resolved r = resolve_common(o.common, cfg, dump);
  const boolmark::PriorConfig prior = resolve_prior(o.prior, cfg, dump);

  const json rj = section(cfg, "rjmcmc");
  boolmark::RjConfig run;
  run.iters = jget<std::size_t>(rj, "iters", run.iters);
  run.p_birth = jget<double>(rj, "p_birth", run.p_birth);
  run.p_death = jget<double>(rj, "p_death", run.p_death);
  run.max_terms = jget<std::size_t>(rj, "max_terms", 0);
  override_if(o.iters, run.iters);
  override_if(o.p_birth, run.p_birth);
  override_if(o.p_death, run.p_death);
  override_if(o.max_terms, run.max_terms);
  run.seed = r.seed;
  try {
    run.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  dump["rjmcmc"] = ordered_json{{"iters", run.iters},
                                {"p_birth", run.p_birth},
                                {"p_death", run.p_death},
                                {"max_terms", run.max_terms}};

  std::vector<std::string> notes;
  const boolmark::Dataset d = resolve_data(o.data, cfg, r.seed, dump, notes);
  if (d.p > boolmark::kRjMaxVars)
    throw UsageError("rjmcmc: dataset has p=" + std::to_string(d.p) +
                     " variables; the uniform pattern proposal is limited to p <= " +
                     std::to_string(boolmark::kRjMaxVars));

  fs::create_directories(r.out);
  RunLog log(r.out / "run.log");
  for (const auto& s : notes) log.line(s);
  log.line("rjmcmc: begin, iters=" + std::to_string(run.iters));
  write_config(r.out, dump);

  const boolmark::RjResult res = boolmark::run_rj(d, prior, run);
  std::ostringstream csv;
  csv << "iteration,m,log_post\n";
  for (const auto& row : res.trace)
    csv << row.iteration << ',' << row.m << ',' << num(row.log_post) << '\n';
  write_text(r.out / "trace.csv", csv.str());

  ordered_json model;
  model["function"] = dnf_to_json(res.final_f, d.feature_names);
  model["pi0"] = res.final_probs.pi0;
  model["pi1"] = res.final_probs.pi1;
  model["births"] = ordered_json{{"proposed", res.births_proposed},
                                 {"accepted", res.births_accepted}};
  model["deaths"] = ordered_json{{"proposed", res.deaths_proposed},
                                 {"accepted", res.deaths_accepted}};
  model["flips"] = ordered_json{{"proposed", res.flips_proposed},
                                {"accepted", res.flips_accepted}};
  write_text(r.out / "model.json", model.dump(2) + "\n");
  log.line("rjmcmc: done");
  return kExitOk;
}

// ---- subcommand: crossval ----------------------------------------------------

struct CvOpts {
  CommonOpts common;
  PriorOpts prior;
  DataOpts data;
  AnnealOpts anneal;  // nested flags reused for the per-cell fits
  std::optional<std::size_t> repetitions;
  std::optional<double> fraction;
};

int run_crossval(const CvOpts& o) {
  const json cfg = load_config_file(o.common.config_path);
  ordered_json dump;
  const Resolved r = resolve_common(o.common, cfg, dump);
  const boolmark::PriorConfig base_prior = resolve_prior(o.prior, cfg, dump);
  AnnealOpts ao = o.anneal;
  ao.common = o.common;
  const boolmark::AnnealConfig fit = resolve_anneal(ao, cfg, r, dump);

  const json cj = section(cfg, "crossval");
  boolmark::CvConfig cv;
  cv.theta_grid = jget<std::vector<double>>(cj, "theta_grid", cv.theta_grid);
  cv.geom_p_grid = jget<std::vector<double>>(cj, "geom_p_grid", cv.geom_p_grid);
  cv.repetitions = jget<std::size_t>(cj, "repetitions", cv.repetitions);
  cv.fraction = jget<double>(cj, "fraction", cv.fraction);
  override_if(o.repetitions, cv.repetitions);
  override_if(o.fraction, cv.fraction);
  cv.seed = r.seed;
  cv.jobs = r.jobs;
  try {
    cv.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  dump["crossval"] = ordered_json{{"theta_grid", cv.theta_grid},
                                  {"geom_p_grid", cv.geom_p_grid},
                                  {"repetitions", cv.repetitions},
                                  {"fraction", cv.fraction}};

  std::vector<std::string> notes;
  const boolmark::Dataset d = resolve_data(o.data, cfg, r.seed, dump, notes);

  fs::create_directories(r.out);
  RunLog log(r.out / "run.log");
  for (const auto& s : notes) log.line(s);
  log.line("crossval: begin, cells=" +
           std::to_string(cv.theta_grid.size() * cv.geom_p_grid.size()) +
           " repetitions=" + std::to_string(cv.repetitions));
  write_config(r.out, dump);

  const std::vector<boolmark::CvCellReport> cells = boolmark::crossval(d, base_prior, fit, cv);

  std::ostringstream report;
  report << "theta,geom_p,mean_auc,mean_m,mean_sum_k\n";
  for (const auto& cell : cells)
    report << num(cell.theta) << ',' << num(cell.geom_p) << ',' << num(cell.mean_auc)
           << ',' << num(cell.mean_m) << ',' << num(cell.mean_sum_k) << '\n';
  write_text(r.out / "report.csv", report.str());

  std::ostringstream reps;
  reps << "theta,geom_p,rep,auc,m,sum_k,pi0_hat,pi1_hat\n";
  std::ostringstream rules;
  for (const auto& cell : cells) {
    for (const auto& row : cell.reps) {
      reps << num(cell.theta) << ',' << num(cell.geom_p) << ',' << row.rep << ','
           << num(row.auc) << ',' << row.m << ',' << row.sum_k << ','
           << num(row.pi0_hat) << ',' << num(row.pi1_hat) << '\n';
      rules << "theta=" << num(cell.theta) << " geom_p=" << num(cell.geom_p)
            << " rep=" << row.rep << ": " << row.rule << '\n';
    }
  }
  write_text(r.out / "repetitions.csv", reps.str());
  write_text(r.out / "rules.txt", rules.str());
  log.line("crossval: done");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian monotone rule learning for binary outcome data"};
  app.require_subcommand(1);

  SimulateOpts sim_o;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(sim, sim_o.common);
  sim->add_option("--n", sim_o.n, "rows");
  sim->add_option("--p", sim_o.p, "variables");
  sim->add_option("--term-sizes", sim_o.term_sizes, "comma-separated planted term sizes");
  sim->add_option("--pi0", sim_o.pi0, "outcome rate off the rule");
  sim->add_option("--pi1", sim_o.pi1, "outcome rate on the rule");

  FitSingleOpts fs_o;
  auto* fsc = app.add_subcommand("fit-single", "single-marker Metropolis-within-Gibbs");
  add_common(fsc, fs_o.common);
  add_prior(fsc, fs_o.prior);
  add_data(fsc, fs_o.data);
  fsc->add_option("--chains", fs_o.chains, "independent chains");
  fsc->add_option("--iters", fs_o.iters, "sweeps per chain");
  fsc->add_option("--burnin", fs_o.burnin, "discarded sweeps");

  AnnealOpts an_o;
  auto* anc = app.add_subcommand("anneal", "simulated annealing fit of a multi-term rule");
  add_common(anc, an_o.common);
  add_prior(anc, an_o.prior);
  add_data(anc, an_o.data);
  add_anneal_flags(anc, an_o);

  RjOpts rj_o;
  auto* rjc = app.add_subcommand("rjmcmc", "reversible-jump sampler over term sets");
  add_common(rjc, rj_o.common);
  add_prior(rjc, rj_o.prior);
  add_data(rjc, rj_o.data);
  rjc->add_option("--iters", rj_o.iters, "kernel iterations");
  rjc->add_option("--p-birth", rj_o.p_birth, "birth move probability");
  rjc->add_option("--p-death", rj_o.p_death, "death move probability");
  rjc->add_option("--max-terms", rj_o.max_terms, "term count cap (0 = none)");

  CvOpts cv_o;
  auto* cvc = app.add_subcommand("crossval", "prior grid search with train/test splits");
  add_common(cvc, cv_o.common);
  add_prior(cvc, cv_o.prior);
  add_data(cvc, cv_o.data);
  add_anneal_flags(cvc, cv_o.anneal);
  cvc->add_option("--reps", cv_o.repetitions, "splits per grid cell");
  cvc->add_option("--fraction", cv_o.fraction, "train fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_o);
    if (fsc->parsed()) return run_fit_single(fs_o);
    if (anc->parsed()) return run_anneal(an_o);
    if (rjc->parsed()) return run_rjmcmc(rj_o);
    if (cvc->parsed()) return run_crossval(cv_o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
