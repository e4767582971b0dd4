#include "crowdsim/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "crowdsim/config.hpp"
#include "crowdsim/simulate.hpp"
#include "crowdsim/verify.hpp"

namespace crowdsim {
namespace {

bool read_all(const std::string& path, std::string* out, std::string* err) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    *out = ss.str();
    return true;
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    *err = "cannot open " + path;
    return false;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  *out = ss.str();
  return true;
}

int load_config(const std::string& path, RunConfig* cfg) {
  std::string text, err;
  if (!read_all(path, &text, &err)) {
    std::cerr << "error: " << err << "\n";
    return kExitConfig;
  }
  try {
    *cfg = parse_config(text);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

// Writes `data` whole; a file that cannot be finished is removed.
int write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    std::cerr << "error: cannot write " << path << "\n";
    return kExitRuntime;
  }
  f << data;
  f.flush();
  if (!f.good()) {
    f.close();
    std::remove(path.c_str());
    std::cerr << "error: failed while writing " << path << ", partial file removed\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& output_override,
            int threads) {
  RunConfig cfg;
  if (int rc = load_config(config_path, &cfg); rc != kExitOk) return rc;
  if (!output_override.empty()) cfg.output = output_override;

  std::vector<SweepRecord> records;
  try {
    records = monte_carlo(cfg.scenario, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  const std::string csv = render_csv(records);
  if (cfg.output == "-") {
    std::cout << csv;
    return kExitOk;
  }
  if (int rc = write_file(cfg.output, csv); rc != kExitOk) return rc;
  std::cout << "wrote " << cfg.output << " (" << records.size() << " rows)\n";
  return kExitOk;
}

int cmd_allocate(const std::string& config_path, const std::string& matrix_csv,
                 int trace_tail) {
  RunConfig cfg;
  if (int rc = load_config(config_path, &cfg); rc != kExitOk) return rc;
  const Scenario& s = cfg.scenario;
  if (s.sweep_values.size() != 1) {
    std::cerr << "config error: allocate needs exactly one sweep value, got "
              << s.sweep_values.size() << "\n";
    return kExitConfig;
  }

  try {
    const double beta = s.beta_at(0);
    const Problem p = s.problem_for_beta(beta);
    require_valid(p);
    const GreedyResult g = greedy_allocate(p, s.objective, s.chernoff);
    const double value = evaluate_objective(s.objective, g.degrees, p, s.chernoff);

    const int K = p.num_classes();
    std::ostringstream out;
    out << "scenario " << (s.name.empty() ? "(inline)" : s.name) << ": T=" << p.tasks
        << " K=" << K << " beta=" << beta << " C=" << p.budget << "\n";
    out << objective_name(s.objective) << " value " << value << "\n";
    for (int k = 0; k < K; ++k)
      out << "class " << k << ": assigned " << g.degrees.class_total(k) << " of "
          << p.class_load_budget(k) << " available\n";
    out << "degree matrix (one row per task):\n";
    for (int t = 0; t < p.tasks; ++t) {
      out << "  task " << t << ":";
      for (int k = 0; k < K; ++k) out << " " << g.degrees.at(t, k);
      out << "\n";
    }
    const int steps = static_cast<int>(g.trace.size());
    const int from = std::max(0, steps - std::max(trace_tail, 0));
    out << "greedy trace, steps " << from + 1 << ".." << steps << " of " << steps
        << ":\n";
    for (int i = from; i < steps; ++i)
      out << "  step " << g.trace[i].iteration << ": task " << g.trace[i].task
          << " class " << g.trace[i].cls << " -> " << g.trace[i].objective << "\n";
    std::cout << out.str();

    if (!matrix_csv.empty()) {
      std::ostringstream m;
      m << "task";
      for (int k = 0; k < K; ++k) m << ",class" << k;
      m << "\n";
      for (int t = 0; t < p.tasks; ++t) {
        m << t;
        for (int k = 0; k < K; ++k) m << "," << g.degrees.at(t, k);
        m << "\n";
      }
      if (int rc = write_file(matrix_csv, m.str()); rc != kExitOk) return rc;
      std::cout << "wrote " << matrix_csv << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_verify(const std::string& suite_name) {
  std::vector<SuiteResult> results;
  try {
    if (suite_name.empty())
      results = run_verification_suites();
    else
      results.push_back(run_verification_suite(suite_name));
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  bool all_passed = true;
  for (const SuiteResult& r : results) {
    std::printf("[%s] %-28s checks=%d failures=%d\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.checks, r.failures);
    if (!r.detail.empty()) std::fputs(r.detail.c_str(), stdout);
    all_passed = all_passed && r.passed;
  }
  return all_passed ? kExitOk : kExitVerification;
}

}  // namespace crowdsim
