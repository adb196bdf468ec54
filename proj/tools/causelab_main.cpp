#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "causelab/config.hpp"
#include "causelab/harness.hpp"

namespace {

using namespace causelab;

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError ? 2 : 1;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int cmd_run(const std::string& config_path, std::string out_dir, int jobs,
            const std::string& cells_filter) {
  ExperimentConfig config = config::load_config(config_path);
  if (!cells_filter.empty()) {
    std::vector<std::string> kept;
    for (const auto& m : config.methods)
      for (const auto& pat : split(cells_filter, ','))
        if (!pat.empty() && m.find(pat) != std::string::npos) {
          kept.push_back(m);
          break;
        }
    if (kept.empty()) raise(ErrorCode::ConfigError, "cells: filter matches no method");
    config.methods = std::move(kept);
  }

  if (out_dir.empty()) out_dir = config.output;
  if (out_dir.empty())
    if (const char* env = std::getenv(kOutputDirEnv)) out_dir = env;
  if (out_dir.empty()) out_dir = "out";

  const ReportBundle bundle = run(config, jobs);
  write_reports(config, bundle, out_dir);

  std::size_t failed = 0;
  for (const auto& c : bundle.cells)
    if (c.status != "ok") ++failed;
  std::cout << bundle.cells.size() << " cells, " << failed << " failed; reports in " << out_dir
            << "\n";
  for (const auto& c : bundle.cells)
    if (c.status != "ok")
      std::cout << "  cell " << c.cell << " " << c.method << " " << c.query << ": " << c.status
                << " (" << c.detail << ")\n";
  return bundle.all_ok ? 0 : 1;
}

ReportBundle read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  ReportBundle bundle;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      saw_header = true;  // column names
      continue;
    }
    const auto parts = split(line, ',');
    if (parts.size() != 9)
      raise(ErrorCode::IoError, "'" + path + "' has a malformed row: " + line);
    CellResult c;
    c.cell = std::stoull(parts[0]);
    c.method = parts[1];
    c.query = parts[2];
    c.n = std::stoull(parts[3]);
    c.seed = std::stoull(parts[4]);
    c.mean = std::stod(parts[5]);
    c.se = std::stod(parts[6]);
    c.status = parts[7];
    c.detail = parts[8];
    if (c.status != "ok") bundle.all_ok = false;
    bundle.cells.push_back(std::move(c));
  }
  if (!saw_header) raise(ErrorCode::IoError, "'" + path + "' holds no result rows");
  return bundle;
}

int cmd_compare(const std::string& report, const std::string& baseline, const std::string& test,
                double tol) {
  const Verdict v = compare(read_results_csv(report), baseline, test, tol);
  std::cout << (v.pass ? "pass" : "fail") << ": worst |" << test << " - " << baseline << "| = "
            << v.worst_error << " over " << v.cells_compared << " cells (tolerance " << tol
            << ")\n";
  return v.pass ? 0 : 1;
}

int cmd_validate(const std::string& spec_path) {
  const ScmSpec spec = config::load_spec(spec_path);
  const ValidationReport report = validate_spec(spec);
  const char* cls = report.graph_class == GraphClass::ClassA   ? "class A"
                    : report.graph_class == GraphClass::ClassB ? "class B"
                                                               : "rejected";
  std::cout << spec_path << ": " << (report.ok ? "valid" : "invalid") << " (" << cls << ")\n";
  for (const auto& check : report.checks)
    std::cout << "  [" << (check.pass ? "ok" : "FAIL") << "] " << check.rule
              << (check.detail.empty() ? "" : ": " + check.detail) << "\n";
  return report.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal-inference lab: simulate structural models, run estimator grids"};
  app.require_subcommand(1);

  std::string config_path, out_dir, cells_filter;
  int jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "Execute an experiment config");
  run_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (default: config, then $CAUSELAB_OUT)");
  run_cmd->add_option("--jobs", jobs, "Worker threads (results are schedule-independent)");
  run_cmd->add_option("--cells", cells_filter, "Comma-separated method name filters");

  std::string report_path, baseline, test;
  double tol = 0.0;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two methods in a results CSV");
  cmp_cmd->add_option("report", report_path, "results.csv from a run")->required();
  cmp_cmd->add_option("--baseline", baseline, "Baseline method")->required();
  cmp_cmd->add_option("--test", test, "Method under test")->required();
  cmp_cmd->add_option("--tol", tol, "Worst-case tolerance")->required();

  std::string spec_path;
  auto* val_cmd = app.add_subcommand("validate", "Validate a world description");
  val_cmd->add_option("spec", spec_path, "World spec (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir, jobs, cells_filter);
    if (cmp_cmd->parsed()) return cmd_compare(report_path, baseline, test, tol);
    return cmd_validate(spec_path);
  } catch (const causelab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
