#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crowdsim {

// One worker class: how many workers it has and its per-task average error
// probability pi[t]. Workers inside a class are exchangeable a priori.
struct ClassSpec {
  int size = 0;
  std::vector<double> pi;  // length = number of tasks
};

// A task-assignment problem instance. Workers are indexed 0..W-1, laid out
// class by class; loads[w] is the maximum number of tasks worker w accepts.
struct Problem {
  int tasks = 0;
  std::vector<ClassSpec> classes;
  std::vector<int> loads;
  long long budget = 0;  // total number of assignments the requester pays for

  int num_classes() const { return static_cast<int>(classes.size()); }
  int num_workers() const;
  int class_begin(int k) const;  // index of the first worker of class k
  int class_of_worker(int w) const;
  long long class_load_budget(int k) const;  // sum of loads over class k
  long long total_load_budget() const;
  double beta() const { return static_cast<double>(budget) / tasks; }
  double pi(int t, int k) const { return classes[k].pi[t]; }
};

enum class IssueKind {
  EmptyClasses,
  BadTaskCount,
  BadProbability,
  NonPositiveLoad,
  NonPositiveBudget,
};

struct ValidationIssue {
  IssueKind kind;
  int task = -1;
  int cls = -1;
  int worker = -1;
  std::string message;
};

// Returns every violated invariant; empty means the problem is valid.
// Structural defects (pi vector length != tasks, loads length != worker
// count) throw std::invalid_argument since indices would be meaningless.
std::vector<ValidationIssue> validate_problem(const Problem& p);

// Throws std::invalid_argument listing all issues if the problem is invalid.
void require_valid(const Problem& p);

// Worker population model. x = 0 reproduces the class averages exactly
// (p_tw = pi_tk); x in (0, 1] splits each class into a reliable type with
// p = (1-x)*pi and an unreliable type with p = (1-x)*pi + x/2, drawn with
// probabilities 1-2*pi and 2*pi, so the class mean stays pi. x = 1 is the
// hammer-spammer population.
struct WorkerModel {
  double x = 0.0;
  static WorkerModel exact() { return WorkerModel{0.0}; }
  static WorkerModel bimodal(double x) { return WorkerModel{x}; }
  bool is_exact() const { return x == 0.0; }
};

// Realized per-(task, worker) error probabilities for one trial.
struct PopulationRealization {
  int tasks = 0;
  int workers = 0;
  std::vector<double> p;  // row-major tasks x workers
  double at(int t, int w) const { return p[static_cast<std::size_t>(t) * workers + w]; }
};

// Group id per task; tasks share a group iff their pi rows are identical.
// A worker's bimodal type is drawn once per (worker, group).
std::vector<int> task_groups(const Problem& p);

// Deterministic function of (p, m, seed). Per-worker streams are derived by
// hashing (seed, worker), so the result is independent of evaluation order.
PopulationRealization build_population(const Problem& p, const WorkerModel& m,
                                       std::uint64_t seed);

// Class-level allocation: d(t, k) answers requested from class k for task t.
struct DegreeMatrix {
  int tasks = 0;
  int classes = 0;
  std::vector<int> d;  // row-major tasks x classes

  static DegreeMatrix zeros(int tasks, int classes) {
    return DegreeMatrix{tasks, classes,
                        std::vector<int>(static_cast<std::size_t>(tasks) * classes, 0)};
  }
  int at(int t, int k) const { return d[static_cast<std::size_t>(t) * classes + k]; }
  int& at(int t, int k) { return d[static_cast<std::size_t>(t) * classes + k]; }
  long long total() const;
  long long class_total(int k) const;
};

// Checks 0 <= d_tk <= W_k, sum_t d_tk <= class load budget, total <= budget.
// Returns a reason string through `why` on failure when provided.
bool degree_matrix_feasible(const DegreeMatrix& d, const Problem& p,
                            std::string* why = nullptr);

// Concrete task-worker edges. Rows are sorted, duplicate-free worker lists.
struct Assignment {
  int tasks = 0;
  int workers = 0;
  std::vector<std::vector<int>> task_workers;

  long long size() const;
  std::vector<int> worker_loads() const;
  DegreeMatrix degree_matrix(const Problem& p) const;
};

struct AnswerMatrix {
  struct Entry {
    int worker;
    std::int8_t value;  // +1 or -1
  };
  int tasks = 0;
  int workers = 0;
  std::vector<std::vector<Entry>> rows;
};

using TruthVector = std::vector<std::int8_t>;     // +1 / -1 per task
using DecisionVector = std::vector<std::int8_t>;  // +1 / -1 per task

}  // namespace crowdsim
