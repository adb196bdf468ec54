#include "causelab/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "causelab/dataset.hpp"
#include "causelab/deconfounder.hpp"
#include "causelab/rng.hpp"

namespace causelab {

const std::vector<std::string> kKnownMethods = {
    "oracle_gaussian", "oracle_discrete",       "oracle_mc",         "proxy_id",
    "deconfounder",    "deconfounder_selected", "naive_conditional",
};

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  raise(ErrorCode::ConfigError, field + ": " + why);
}

bool wants(const ExperimentConfig& config, const std::string& method) {
  return std::find(config.methods.begin(), config.methods.end(), method) !=
         config.methods.end();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  try {
    require_valid(config.scm);
  } catch (const Error& e) {
    bad("scm", e.what());
  }
  if (config.queries.empty()) bad("queries", "at least one query is required");
  for (std::size_t i = 0; i < config.queries.size(); ++i) {
    try {
      validate_query(config.scm, config.queries[i]);
    } catch (const Error& e) {
      bad("queries[" + std::to_string(i) + "]", e.what());
    }
  }
  if (config.methods.empty()) bad("methods", "at least one method is required");
  for (std::size_t i = 0; i < config.methods.size(); ++i)
    if (std::find(kKnownMethods.begin(), kKnownMethods.end(), config.methods[i]) ==
        kKnownMethods.end())
      bad("methods[" + std::to_string(i) + "]",
          "unknown method '" + config.methods[i] + "'");
  if (config.grid.sizes.empty()) bad("grid.sizes", "at least one sample size is required");
  if (config.grid.seeds.empty()) bad("grid.seeds", "at least one seed is required");
  if (config.k < 1) bad("k", "latent dimension must be at least 1");

  const bool gaussian = config.scm.mechanism == Mechanism::LinearGaussian;
  if (wants(config, "oracle_gaussian") && !gaussian)
    bad("methods", "oracle_gaussian needs a linear_gaussian world");
  if (wants(config, "oracle_discrete") && gaussian)
    bad("methods", "oracle_discrete needs a tabular_discrete world");
  if (wants(config, "deconfounder_selected") && config.scm.selection_index() < 0)
    bad("methods", "deconfounder_selected needs a selection node in the scm");
  if (wants(config, "proxy_id")) {
    if (!config.partition) bad("partition", "required by the proxy_id method");
    try {
      validate_partition(config.scm, *config.partition);
    } catch (const Error& e) {
      bad("partition", e.what());
    }
  }
}

namespace {

void feed(std::string& acc, const std::string& s) {
  acc += s;
  acc += '\x1f';
}

void feed(std::string& acc, double v) { feed(acc, fmt(v)); }

}  // namespace

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::string acc;
  feed(acc, config.scm.mechanism == Mechanism::LinearGaussian ? "lg" : "td");
  for (const auto& node : config.scm.nodes) {
    feed(acc, node.name);
    feed(acc, to_string(node.role));
    feed(acc, node.noise_sd);
    feed(acc, node.intercept);
    feed(acc, static_cast<double>(node.support));
    for (double v : node.cpt) feed(acc, v);
  }
  for (const auto& edge : config.scm.edges) {
    feed(acc, edge.from);
    feed(acc, edge.to);
    feed(acc, edge.coeff);
  }
  for (const auto& q : config.queries) {
    for (const auto& [name, value] : q.set_to) {
      feed(acc, name);
      feed(acc, value);
    }
    feed(acc, q.response);
  }
  for (const auto& m : config.methods) feed(acc, m);
  for (std::size_t n : config.grid.sizes) feed(acc, static_cast<double>(n));
  for (std::uint64_t s : config.grid.seeds) feed(acc, static_cast<double>(s));
  feed(acc, static_cast<double>(config.k));
  if (config.partition) {
    for (const auto* block :
         {&config.partition->intervened, &config.partition->adjusted,
          &config.partition->null_causes})
      for (const auto& name : *block) feed(acc, name);
    for (const auto& comp : config.partition->f) {
      for (const auto& name : comp.domain) feed(acc, name);
      for (Eigen::Index i = 0; i < comp.weights.size(); ++i) feed(acc, comp.weights(i));
      feed(acc, comp.offset);
      for (double v : comp.table) feed(acc, v);
    }
  }
  return hash_bytes(acc);
}

std::string format_query(const InterventionQuery& q) {
  std::string s = "do(";
  for (std::size_t i = 0; i < q.set_to.size(); ++i) {
    if (i) s += ';';
    s += q.set_to[i].first + "=" + fmt_short(q.set_to[i].second);
  }
  return s + ")";
}

namespace {

Dataset row_range(const Dataset& data, std::size_t begin, std::size_t end) {
  Dataset out;
  out.columns = data.columns;
  out.view = data.view;
  out.selected_rows_only = data.selected_rows_only;
  out.seed = data.seed;
  out.values = data.values.middleRows(static_cast<Eigen::Index>(begin),
                                      static_cast<Eigen::Index>(end - begin));
  out.selected.assign(data.selected.begin() + static_cast<std::ptrdiff_t>(begin),
                      data.selected.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

double pmf_mean(const DiscreteDist& pmf) {
  double m = 0.0;
  for (Eigen::Index c = 0; c < pmf.p.size(); ++c) m += static_cast<double>(c) * pmf.p(c);
  return m;
}

double em_worst_drop(const std::vector<double>& fit_log) {
  double worst = 0.0;
  for (std::size_t i = 1; i < fit_log.size(); ++i) {
    const double allowed = kEmMonotoneSlack * std::max(1.0, std::abs(fit_log[i - 1]));
    worst = std::max(worst, fit_log[i - 1] - fit_log[i] - allowed);
  }
  return std::max(worst, 0.0);
}

struct WorldTables {
  // Exact tables for discrete worlds, shared across cells.
  DiscreteDist joint;
  bool built = false;
};

// The two substitute-confounder pipelines. Both hold the last fifth of the
// training rows out of the factor fit so the predictive check sees fresh data.
CellResult run_deconfounder(const ExperimentConfig& config, const Dataset& ds,
                            const InterventionQuery& q, bool selected_variant,
                            std::uint64_t stream) {
  CellResult r;
  const bool has_selection = config.scm.selection_index() >= 0;
  const Dataset fit_data =
      (!selected_variant && has_selection) ? selected_subset(ds) : ds;

  const std::size_t n = fit_data.rows();
  const std::size_t n_fit = std::max<std::size_t>(1, n - n / 5);
  SubstituteModel sub = fit_substitute(row_range(fit_data, 0, n_fit), config.k);
  CheckReport chk;
  if (n_fit < n)
    chk = check_factor(sub, row_range(fit_data, n_fit, n), 200, hash_combine(stream, 0x17));

  DeconfounderEstimate est;
  if (selected_variant) {
    const OutcomeModel out = fit_outcome(selected_subset(ds), sub, true);
    const auto u_names = ds.names_with_role(NodeRole::SingleCauseConfounder);
    const Eigen::MatrixXd u = ds.matrix_for(u_names);
    GaussianDist u_marg;
    u_marg.labels = u_names;
    u_marg.mean = u.colwise().mean();
    const Eigen::MatrixXd centered = u.rowwise() - u_marg.mean.transpose();
    u_marg.cov = centered.transpose() * centered / static_cast<double>(u.rows());
    est = estimate_do_selected(sub, out, u_marg, q);
  } else {
    const OutcomeModel out = fit_outcome(fit_data, sub, false);
    est = estimate_do(sub, out, q);
  }
  r.mean = est.mean;
  r.se = est.mc_se;
  r.detail = "check=" + fmt_short(chk.score) + ";em_drop=" + fmt_short(em_worst_drop(sub.fit_log));
  return r;
}

CellResult run_proxy_id(const ExperimentConfig& config, const WorldTables& tables,
                        const Dataset& ds, const InterventionQuery& q) {
  CellResult r;
  const CausePartition& part = *config.partition;
  if (config.scm.mechanism == Mechanism::TabularDiscrete) {
    const CompletenessReport comp = check_completeness_discrete(
        tables.joint, part, CompletenessDirection::NullGivenAdjusted);
    if (!comp.complete())
      raise(ErrorCode::Underdetermined,
            "completeness rank " + std::to_string(comp.matrix_rank) + " is below the " +
                std::to_string(comp.required_rank) + " needed; the effect is not identified");
    SolveOptions opts;
    opts.condition_on_selection = config.scm.selection_index() >= 0;
    const auto u_names = config.scm.names_with_role(NodeRole::SingleCauseConfounder);
    if (u_names.size() == 1) opts.u_sng = u_names[0];
    const KernelSolution sol = solve_integral_equation_discrete(tables.joint, part, opts);
    double mass_dev = 0.0;
    const DiscreteDist ident = identify_do_discrete(sol, tables.joint, part, q, &mass_dev);
    r.mean = pmf_mean(ident);
    r.detail = "residual=" + fmt_short(sol.residual) + ";mass_dev=" + fmt_short(mass_dev);
  } else {
    const LinearGaussianSummary summary = summarize_data(ds);
    const KernelSolution sol = solve_gaussian_kernel(summary, part);
    const GaussianDist ident = solve_identify_gaussian(summary, part, q);
    r.mean = ident.mean(0);
    r.detail = "residual=" + fmt_short(sol.residual);
  }
  return r;
}

}  // namespace

ReportBundle run(const ExperimentConfig& config, int jobs) {
  validate_config(config);
  ReportBundle bundle;
  bundle.hash = config_hash(config);

  const bool needs_data = wants(config, "deconfounder") ||
                          wants(config, "deconfounder_selected") ||
                          wants(config, "naive_conditional") ||
                          (wants(config, "proxy_id") &&
                           config.scm.mechanism == Mechanism::LinearGaussian);
  std::map<std::pair<std::size_t, std::uint64_t>, Dataset> datasets;
  if (needs_data)
    for (std::size_t n : config.grid.sizes)
      for (std::uint64_t seed : config.grid.seeds)
        datasets.emplace(std::make_pair(n, seed),
                         sample(config.scm, n, seed, SampleView::SelectedOutcome));

  WorldTables tables;
  if (wants(config, "proxy_id") && config.scm.mechanism == Mechanism::TabularDiscrete) {
    tables.joint = joint_discrete(config.scm);
    tables.built = true;
  }

  struct CellPlan {
    std::size_t n;
    std::uint64_t seed;
    std::size_t query;
    std::size_t method;
  };
  std::vector<CellPlan> plan;
  for (std::size_t n : config.grid.sizes)
    for (std::uint64_t seed : config.grid.seeds)
      for (std::size_t qi = 0; qi < config.queries.size(); ++qi)
        for (std::size_t mi = 0; mi < config.methods.size(); ++mi)
          plan.push_back({n, seed, qi, mi});

  bundle.cells.resize(plan.size());
  const Dataset empty_ds;
  auto run_cell = [&](std::size_t i) {
    const CellPlan& c = plan[i];
    const std::string& method = config.methods[c.method];
    const InterventionQuery& q = config.queries[c.query];
    const std::uint64_t stream = hash_combine(bundle.hash, static_cast<std::uint64_t>(i));
    const auto ds_it = datasets.find({c.n, c.seed});
    const Dataset& ds = ds_it == datasets.end() ? empty_ds : ds_it->second;

    CellResult r;
    try {
      if (method == "oracle_gaussian") {
        const GaussianDist dist = do_gaussian(config.scm, q);
        r.mean = dist.mean(0);
        r.detail = "sd=" + fmt_short(std::sqrt(dist.cov(0, 0)));
      } else if (method == "oracle_discrete") {
        r.mean = pmf_mean(do_discrete(config.scm, q));
      } else if (method == "oracle_mc") {
        const SampleSummary s = do_monte_carlo(config.scm, q, c.n, stream);
        r.mean = s.mean;
        r.se = s.se;
      } else if (method == "naive_conditional") {
        r.mean = naive_conditional_mean(ds, q);
      } else if (method == "proxy_id") {
        r = run_proxy_id(config, tables, ds, q);
      } else if (method == "deconfounder" || method == "deconfounder_selected") {
        r = run_deconfounder(config, ds, q, method == "deconfounder_selected", stream);
      }
      r.status = "ok";
    } catch (const Error& e) {
      r.status = to_string(e.code());
      r.detail = std::string(e.what()) + " [cell " + std::to_string(i) + ": " + method + " " +
                 format_query(q) + " n=" + std::to_string(c.n) +
                 " seed=" + std::to_string(c.seed) + "]";
    }
    r.cell = i;
    r.method = method;
    r.query = format_query(q);
    r.n = c.n;
    r.seed = c.seed;
    bundle.cells[i] = std::move(r);
  };

  jobs = std::max(1, jobs);
  if (jobs == 1 || plan.size() < 2) {
    for (std::size_t i = 0; i < plan.size(); ++i) run_cell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), plan.size());
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < plan.size(); i = next.fetch_add(1))
          run_cell(i);
      });
    for (auto& t : pool) t.join();
  }

  for (const auto& cell : bundle.cells)
    if (cell.status != "ok") bundle.all_ok = false;
  return bundle;
}

std::string results_csv(const ReportBundle& bundle) {
  std::ostringstream os;
  os << kCsvSchemaLine << '\n';
  os << "cell,method,query,n,seed,mean,se,status,detail\n";
  for (const auto& c : bundle.cells) {
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    std::replace(detail.begin(), detail.end(), '\n', ' ');
    os << c.cell << ',' << c.method << ',' << c.query << ',' << c.n << ',' << c.seed << ','
       << fmt(c.mean) << ',' << fmt(c.se) << ',' << c.status << ',' << detail << '\n';
  }
  return os.str();
}

std::string summary_json(const ExperimentConfig& config, const ReportBundle& bundle) {
  nlohmann::json j;
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(bundle.hash));
    j["config_hash"] = buf;
  }
  j["cells"] = bundle.cells.size();
  j["all_ok"] = bundle.all_ok;

  // Exact oracle if present, else the Monte Carlo one, keyed per cell.
  std::string oracle;
  for (const char* name : {"oracle_gaussian", "oracle_discrete", "oracle_mc"})
    if (oracle.empty() && wants(config, name)) oracle = name;

  std::map<std::string, double> baseline;
  if (!oracle.empty())
    for (const auto& c : bundle.cells)
      if (c.method == oracle && c.status == "ok")
        baseline[c.query + "|" + std::to_string(c.n) + "|" + std::to_string(c.seed)] = c.mean;

  for (const auto& method : config.methods) {
    nlohmann::json m;
    std::size_t ok = 0, failed = 0;
    double worst = 0.0;
    bool any = false;
    for (const auto& c : bundle.cells) {
      if (c.method != method) continue;
      (c.status == "ok" ? ok : failed)++;
      if (c.status != "ok" || oracle.empty() || method == oracle) continue;
      const auto it =
          baseline.find(c.query + "|" + std::to_string(c.n) + "|" + std::to_string(c.seed));
      if (it == baseline.end()) continue;
      worst = std::max(worst, std::abs(c.mean - it->second));
      any = true;
    }
    m["ok"] = ok;
    m["failed"] = failed;
    if (any) m["worst_error_vs_" + oracle] = worst;
    j["methods"][method] = std::move(m);
  }
  return j.dump(2) + "\n";
}

void write_reports(const ExperimentConfig& config, const ReportBundle& bundle,
                   const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(ErrorCode::IoError, "cannot create '" + out_dir + "': " + ec.message());
  const auto dir = std::filesystem::path(out_dir);
  for (const auto& [name, text] :
       {std::pair<std::string, std::string>{"results.csv", results_csv(bundle)},
        {"summary.json", summary_json(config, bundle)}}) {
    std::ofstream out(dir / name);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + (dir / name).string() + "'");
    out << text;
  }
}

Verdict compare(const ReportBundle& bundle, const std::string& baseline_method,
                const std::string& test_method, double tolerance) {
  std::map<std::string, double> base;
  bool saw_baseline = false, saw_test = false;
  for (const auto& c : bundle.cells) {
    if (c.method == baseline_method) saw_baseline = true;
    if (c.method == test_method) saw_test = true;
    if (c.method == baseline_method && c.status == "ok")
      base[c.query + "|" + std::to_string(c.n) + "|" + std::to_string(c.seed)] = c.mean;
  }
  if (!saw_baseline)
    raise(ErrorCode::MissingMethod, "'" + baseline_method + "' has no cells in the report");
  if (!saw_test)
    raise(ErrorCode::MissingMethod, "'" + test_method + "' has no cells in the report");

  Verdict v;
  for (const auto& c : bundle.cells) {
    if (c.method != test_method || c.status != "ok") continue;
    const auto it = base.find(c.query + "|" + std::to_string(c.n) + "|" + std::to_string(c.seed));
    if (it == base.end()) continue;
    v.worst_error = std::max(v.worst_error, std::abs(c.mean - it->second));
    ++v.cells_compared;
  }
  if (v.cells_compared == 0)
    raise(ErrorCode::MissingMethod, "no cell was completed by both methods");
  v.pass = v.worst_error <= tolerance;
  return v;
}

}  // namespace causelab
