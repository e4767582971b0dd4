#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crowdsim/allocation.hpp"
#include "crowdsim/decision.hpp"
#include "crowdsim/model.hpp"
#include "crowdsim/objectives.hpp"

namespace crowdsim {

enum class SchemeKind : int {
  MajorityUniform = 0,
  LraUniform = 1,
  LraGreedy = 2,
  MapGreedy = 3,
};
inline constexpr int kSchemeCount = 4;

const char* scheme_token(SchemeKind s);
bool parse_scheme_token(const std::string& token, SchemeKind* out);
bool scheme_uses_greedy(SchemeKind s);

enum class SweepVariable { Beta, X };

// A block of consecutive tasks sharing one pi row.
struct TaskGroup {
  int count = 0;
  std::vector<double> pi;  // length = classes

  bool operator==(const TaskGroup&) const = default;
};

struct Scenario {
  std::string name;  // preset name, or empty for inline definitions
  std::vector<TaskGroup> groups;
  std::vector<int> class_sizes;
  std::vector<int> loads;  // per worker
  std::vector<SchemeKind> schemes;
  SweepVariable sweep = SweepVariable::Beta;
  std::vector<double> sweep_values;
  double fixed_x = 0.0;      // used when sweeping beta
  double fixed_beta = 10.0;  // used when sweeping x
  int trials = 2000;
  std::uint64_t seed = 12345;
  ObjectiveKind objective = ObjectiveKind::P3MutualInfo;
  ChernoffVariant chernoff = ChernoffVariant::Corrected;

  bool operator==(const Scenario&) const = default;

  int task_count() const;
  int class_count() const { return static_cast<int>(class_sizes.size()); }
  int min_load() const;
  // Problem at a concrete budget; the sweep fills in C = round(beta * T).
  Problem problem_for_budget(long long budget) const;
  Problem problem_for_beta(double beta) const;
  double beta_at(int point) const;
  double x_at(int point) const;
};

// Validates counts, probabilities, loads and that every swept beta fits the
// total load budget. Returns human-readable violations; empty means valid.
std::vector<std::string> validate_scenario(const Scenario& s);

// Named presets: S1 (one group, pi rows (0.1, 0.2, 0.5), class sizes
// 30/120/150), S2 (two 50-task groups (0.05, 0.1, 0.5) / (0.1, 0.2, 0.5),
// same classes), S3 (two 50-task groups (0.1, 0.25, 0.5) / (0.5, 0.25, 0.1),
// class sizes 40/120/40). All loads are 20.
Scenario scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

struct SweepRecord {
  std::string scheme;
  double beta = 0.0;
  double x = 0.0;
  double pe = 0.0;
  double stderr_nominal = 0.0;  // sqrt(pe (1-pe) / (trials * tasks))
  long long trials = 0;
  double tie_flag_rate = 0.0;
  double wall_ms = 0.0;  // not part of the CSV contract
};

// Everything about one sweep point that is shared by all of its trials.
struct PointPlan {
  int point_index = 0;
  double beta = 0.0;
  double x = 0.0;
  Problem problem;
  DegreeMatrix greedy_degrees;    // empty when no scheme uses greedy
  Assignment greedy_assignment;
};

PointPlan plan_point(const Scenario& s, int point_index);

AnswerMatrix sample_answers(const Assignment& a, const PopulationRealization& pop,
                            const TruthVector& truth, rng::Stream& stream);

struct TrialOutcome {
  std::array<int, kSchemeCount> errors{};    // wrong decisions out of T
  std::array<bool, kSchemeCount> flagged{};  // LRA degenerate-spectrum flag
};

// One Monte Carlo trial: fresh truth, fresh population, fresh uniform graph,
// shared across the point's schemes. All randomness is derived from
// (scenario seed, point index, trial index), so any subset of trials can be
// reproduced in isolation and thread scheduling cannot change results.
TrialOutcome run_trial(const Scenario& s, const PointPlan& plan, int trial_index);

// Runs trials (in `threads` threads, 0 = hardware concurrency) for every
// sweep point and returns records sorted by (scheme token, sweep value).
std::vector<SweepRecord> monte_carlo(const Scenario& s, int threads = 0);

// CSV with the fixed header scheme,beta,x,pe,stderr,trials,tie_flag_rate and
// LF line endings; floats use scientific notation with 6 significant digits.
std::string render_csv(const std::vector<SweepRecord>& records);

}  // namespace crowdsim
