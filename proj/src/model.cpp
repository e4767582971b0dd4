#include "crowdsim/model.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "crowdsim/rng.hpp"

namespace crowdsim {

int Problem::num_workers() const {
  int w = 0;
  for (const auto& c : classes) w += c.size;
  return w;
}

int Problem::class_begin(int k) const {
  int w = 0;
  for (int i = 0; i < k; ++i) w += classes[i].size;
  return w;
}

int Problem::class_of_worker(int w) const {
  int begin = 0;
  for (int k = 0; k < num_classes(); ++k) {
    begin += classes[k].size;
    if (w < begin) return k;
  }
  throw std::out_of_range("worker index past the last class");
}

long long Problem::class_load_budget(int k) const {
  int begin = class_begin(k);
  long long sum = 0;
  for (int i = 0; i < classes[k].size; ++i) sum += loads[begin + i];
  return sum;
}

long long Problem::total_load_budget() const {
  return std::accumulate(loads.begin(), loads.end(), 0LL);
}

std::vector<ValidationIssue> validate_problem(const Problem& p) {
  if (!p.classes.empty()) {
    for (int k = 0; k < p.num_classes(); ++k) {
      if (static_cast<int>(p.classes[k].pi.size()) != p.tasks)
        throw std::invalid_argument("class pi vector length differs from task count");
    }
    if (static_cast<int>(p.loads.size()) != p.num_workers())
      throw std::invalid_argument("loads length differs from worker count");
  }

  std::vector<ValidationIssue> issues;
  auto add = [&issues](IssueKind kind, int t, int k, int w, std::string msg) {
    issues.push_back(ValidationIssue{kind, t, k, w, std::move(msg)});
  };

  if (p.tasks < 1)
    add(IssueKind::BadTaskCount, -1, -1, -1, "task count must be at least 1");
  if (p.classes.empty())
    add(IssueKind::EmptyClasses, -1, -1, -1, "at least one worker class is required");
  for (int k = 0; k < p.num_classes(); ++k) {
    if (p.classes[k].size < 1) {
      std::ostringstream os;
      os << "class " << k << " has no workers";
      add(IssueKind::EmptyClasses, -1, k, -1, os.str());
    }
    for (int t = 0; t < static_cast<int>(p.classes[k].pi.size()); ++t) {
      double v = p.classes[k].pi[t];
      if (!(v > 0.0) || !(v < 1.0)) {
        std::ostringstream os;
        os << "pi(" << t << ", " << k << ") = " << v << " outside (0, 1)";
        add(IssueKind::BadProbability, t, k, -1, os.str());
      }
    }
  }
  for (int w = 0; w < static_cast<int>(p.loads.size()); ++w) {
    if (p.loads[w] < 1) {
      std::ostringstream os;
      os << "load of worker " << w << " is " << p.loads[w];
      add(IssueKind::NonPositiveLoad, -1, -1, w, os.str());
    }
  }
  if (p.budget < 1)
    add(IssueKind::NonPositiveBudget, -1, -1, -1, "budget must be at least 1");
  return issues;
}

void require_valid(const Problem& p) {
  auto issues = validate_problem(p);
  if (issues.empty()) return;
  std::ostringstream os;
  os << "invalid problem:";
  for (const auto& i : issues) os << " [" << i.message << "]";
  throw std::invalid_argument(os.str());
}

std::vector<int> task_groups(const Problem& p) {
  std::map<std::vector<double>, int> seen;
  std::vector<int> group(p.tasks, 0);
  int next = 0;
  std::vector<double> row(p.num_classes());
  for (int t = 0; t < p.tasks; ++t) {
    for (int k = 0; k < p.num_classes(); ++k) row[k] = p.pi(t, k);
    auto [it, inserted] = seen.emplace(row, next);
    if (inserted) ++next;
    group[t] = it->second;
  }
  return group;
}

PopulationRealization build_population(const Problem& p, const WorkerModel& m,
                                       std::uint64_t seed) {
  require_valid(p);
  if (m.x < 0.0 || m.x > 1.0)
    throw std::domain_error("worker model x outside [0, 1]");

  const int T = p.tasks, W = p.num_workers();
  PopulationRealization pop{T, W, std::vector<double>(static_cast<std::size_t>(T) * W)};

  if (m.is_exact()) {
    for (int t = 0; t < T; ++t)
      for (int w = 0; w < W; ++w)
        pop.p[static_cast<std::size_t>(t) * W + w] = p.pi(t, p.class_of_worker(w));
    return pop;
  }

  const std::vector<int> group = task_groups(p);
  const int group_count = 1 + *std::max_element(group.begin(), group.end());
  // Representative task per group, for the group's pi row.
  std::vector<int> rep(group_count, -1);
  for (int t = 0; t < T; ++t)
    if (rep[group[t]] < 0) rep[group[t]] = t;

  for (int w = 0; w < W; ++w) {
    const int k = p.class_of_worker(w);
    rng::Stream stream = rng::derive(seed, {static_cast<std::uint64_t>(w)});
    std::vector<double> pw(group_count);
    for (int g = 0; g < group_count; ++g) {
      const double pi = p.pi(rep[g], k);
      if (pi > 0.5)
        throw std::domain_error(
            "bimodal model needs pi <= 1/2 (type probability 1 - 2*pi)");
      const bool unreliable = stream.uniform() < 2.0 * pi;
      pw[g] = unreliable ? (1.0 - m.x) * pi + 0.5 * m.x : (1.0 - m.x) * pi;
    }
    for (int t = 0; t < T; ++t)
      pop.p[static_cast<std::size_t>(t) * W + w] = pw[group[t]];
  }
  return pop;
}

long long DegreeMatrix::total() const {
  return std::accumulate(d.begin(), d.end(), 0LL);
}

long long DegreeMatrix::class_total(int k) const {
  long long sum = 0;
  for (int t = 0; t < tasks; ++t) sum += at(t, k);
  return sum;
}

bool degree_matrix_feasible(const DegreeMatrix& d, const Problem& p, std::string* why) {
  auto fail = [why](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (d.tasks != p.tasks || d.classes != p.num_classes())
    return fail("degree matrix shape differs from the problem");
  for (int t = 0; t < d.tasks; ++t)
    for (int k = 0; k < d.classes; ++k) {
      if (d.at(t, k) < 0) return fail("negative degree");
      if (d.at(t, k) > p.classes[k].size) {
        std::ostringstream os;
        os << "d(" << t << ", " << k << ") exceeds class size " << p.classes[k].size;
        return fail(os.str());
      }
    }
  for (int k = 0; k < d.classes; ++k)
    if (d.class_total(k) > p.class_load_budget(k)) {
      std::ostringstream os;
      os << "class " << k << " total exceeds its load budget "
         << p.class_load_budget(k);
      return fail(os.str());
    }
  if (d.total() > p.budget) return fail("total degree exceeds the budget");
  return true;
}

long long Assignment::size() const {
  long long n = 0;
  for (const auto& row : task_workers) n += static_cast<long long>(row.size());
  return n;
}

std::vector<int> Assignment::worker_loads() const {
  std::vector<int> load(workers, 0);
  for (const auto& row : task_workers)
    for (int w : row) ++load[w];
  return load;
}

DegreeMatrix Assignment::degree_matrix(const Problem& p) const {
  DegreeMatrix d = DegreeMatrix::zeros(tasks, p.num_classes());
  for (int t = 0; t < tasks; ++t)
    for (int w : task_workers[t]) ++d.at(t, p.class_of_worker(w));
  return d;
}

}  // namespace crowdsim
