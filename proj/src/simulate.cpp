#include "crowdsim/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace crowdsim {

namespace {

// Stream tags: every random draw in a trial comes from a stream derived as
// (seed, point, trial, tag), so adding or removing schemes from a run never
// shifts anyone else's randomness.
enum StreamTag : std::uint64_t {
  kTagTruth = 0,
  kTagPopulation = 1,
  kTagUniformGraph = 2,
  kTagAnswersUniform = 3,
  kTagAnswersGreedy = 4,
  kTagDecideBase = 5,  // + scheme index
};

}  // namespace

const char* scheme_token(SchemeKind s) {
  switch (s) {
    case SchemeKind::MajorityUniform: return "majority_uniform";
    case SchemeKind::LraUniform: return "lra_uniform";
    case SchemeKind::LraGreedy: return "lra_greedy";
    case SchemeKind::MapGreedy: return "map_greedy";
  }
  return "?";
}

bool parse_scheme_token(const std::string& token, SchemeKind* out) {
  for (int i = 0; i < kSchemeCount; ++i) {
    const auto s = static_cast<SchemeKind>(i);
    if (token == scheme_token(s)) {
      if (out) *out = s;
      return true;
    }
  }
  return false;
}

bool scheme_uses_greedy(SchemeKind s) {
  return s == SchemeKind::LraGreedy || s == SchemeKind::MapGreedy;
}

int Scenario::task_count() const {
  int t = 0;
  for (const auto& g : groups) t += g.count;
  return t;
}

int Scenario::min_load() const {
  int m = 0;
  for (std::size_t i = 0; i < loads.size(); ++i)
    m = (i == 0) ? loads[i] : std::min(m, loads[i]);
  return m;
}

Problem Scenario::problem_for_budget(long long budget) const {
  Problem p;
  p.tasks = task_count();
  const int K = class_count();
  p.classes.resize(K);
  for (int k = 0; k < K; ++k) {
    p.classes[k].size = class_sizes[k];
    p.classes[k].pi.reserve(p.tasks);
    for (const auto& g : groups)
      p.classes[k].pi.insert(p.classes[k].pi.end(), g.count, g.pi[k]);
  }
  p.loads = loads;
  p.budget = budget;
  return p;
}

Problem Scenario::problem_for_beta(double beta) const {
  return problem_for_budget(std::llround(beta * task_count()));
}

double Scenario::beta_at(int point) const {
  return sweep == SweepVariable::Beta ? sweep_values[point] : fixed_beta;
}

double Scenario::x_at(int point) const {
  return sweep == SweepVariable::X ? sweep_values[point] : fixed_x;
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  auto fail = [&](const std::string& m) { out.push_back(m); };

  if (s.class_sizes.empty()) fail("scenario has no worker classes");
  for (std::size_t k = 0; k < s.class_sizes.size(); ++k)
    if (s.class_sizes[k] < 1)
      fail("class " + std::to_string(k) + " has non-positive size");
  if (s.groups.empty()) fail("scenario has no task groups");
  bool pi_ok = true;
  for (std::size_t g = 0; g < s.groups.size(); ++g) {
    if (s.groups[g].count < 1)
      fail("task group " + std::to_string(g) + " has non-positive count");
    if (s.groups[g].pi.size() != s.class_sizes.size()) {
      fail("task group " + std::to_string(g) + " has " +
           std::to_string(s.groups[g].pi.size()) + " error rates for " +
           std::to_string(s.class_sizes.size()) + " classes");
      pi_ok = false;
      continue;
    }
    for (double pi : s.groups[g].pi)
      if (!(pi > 0.0) || !(pi < 1.0)) {
        fail("task group " + std::to_string(g) +
             " has an error rate outside (0, 1)");
        pi_ok = false;
      }
  }

  long long workers = 0;
  for (int w : s.class_sizes) workers += w;
  if (static_cast<long long>(s.loads.size()) != workers)
    fail("loads list has " + std::to_string(s.loads.size()) + " entries for " +
         std::to_string(workers) + " workers");
  long long load_budget = 0;
  for (std::size_t w = 0; w < s.loads.size(); ++w) {
    if (s.loads[w] < 1) {
      fail("worker " + std::to_string(w) + " has non-positive load");
      break;
    }
    load_budget += s.loads[w];
  }

  if (s.schemes.empty()) fail("no schemes selected");
  for (std::size_t i = 0; i < s.schemes.size(); ++i)
    for (std::size_t j = i + 1; j < s.schemes.size(); ++j)
      if (s.schemes[i] == s.schemes[j])
        fail(std::string("scheme ") + scheme_token(s.schemes[i]) + " listed twice");

  if (s.trials < 1) fail("trials must be at least 1");
  if (s.sweep_values.empty()) fail("sweep has no values");

  const int T = s.task_count();
  bool any_bimodal = false;
  for (std::size_t i = 0; i < s.sweep_values.size(); ++i) {
    const int point = static_cast<int>(i);
    const double beta = s.beta_at(point), x = s.x_at(point);
    if (!(beta > 0.0)) {
      fail("beta must be positive, got " + std::to_string(beta));
      continue;
    }
    if (!(x >= 0.0 && x <= 1.0))
      fail("x must lie in [0, 1], got " + std::to_string(x));
    if (x > 0.0) any_bimodal = true;
    if (T > 0) {
      const long long budget = std::llround(beta * T);
      if (budget > load_budget)
        fail("beta " + std::to_string(beta) + " needs " + std::to_string(budget) +
             " assignments, worker loads supply only " + std::to_string(load_budget));
    }
  }
  if (any_bimodal && pi_ok)
    for (std::size_t g = 0; g < s.groups.size(); ++g)
      for (double pi : s.groups[g].pi)
        if (pi > 0.5)
          fail("task group " + std::to_string(g) +
               " has an error rate above 1/2, unusable with a bimodal population");
  return out;
}

namespace {

Scenario base_preset(const std::string& name) {
  Scenario s;
  s.name = name;
  s.schemes = {SchemeKind::MajorityUniform, SchemeKind::LraUniform,
               SchemeKind::LraGreedy, SchemeKind::MapGreedy};
  s.sweep = SweepVariable::Beta;
  s.sweep_values = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  return s;
}

}  // namespace

Scenario scenario_preset(const std::string& name) {
  Scenario s = base_preset(name);
  if (name == "s1") {
    s.groups = {TaskGroup{100, {0.1, 0.2, 0.5}}};
    s.class_sizes = {30, 120, 150};
  } else if (name == "s2") {
    s.groups = {TaskGroup{50, {0.05, 0.1, 0.5}}, TaskGroup{50, {0.1, 0.2, 0.5}}};
    s.class_sizes = {30, 120, 150};
  } else if (name == "s3") {
    s.groups = {TaskGroup{50, {0.1, 0.25, 0.5}}, TaskGroup{50, {0.5, 0.25, 0.1}}};
    s.class_sizes = {40, 120, 40};
  } else {
    throw std::invalid_argument("unknown scenario preset: " + name);
  }
  long long workers = 0;
  for (int w : s.class_sizes) workers += w;
  s.loads.assign(static_cast<std::size_t>(workers), 20);
  return s;
}

std::vector<std::string> scenario_preset_names() { return {"s1", "s2", "s3"}; }

PointPlan plan_point(const Scenario& s, int point_index) {
  PointPlan plan;
  plan.point_index = point_index;
  plan.beta = s.beta_at(point_index);
  plan.x = s.x_at(point_index);
  plan.problem = s.problem_for_beta(plan.beta);
  require_valid(plan.problem);
  bool greedy = false;
  for (SchemeKind k : s.schemes) greedy = greedy || scheme_uses_greedy(k);
  if (greedy) {
    GreedyResult g = greedy_allocate(plan.problem, s.objective, s.chernoff);
    plan.greedy_degrees = std::move(g.degrees);
    plan.greedy_assignment = realize_assignment(plan.greedy_degrees, plan.problem);
  }
  return plan;
}

AnswerMatrix sample_answers(const Assignment& a, const PopulationRealization& pop,
                            const TruthVector& truth, rng::Stream& stream) {
  AnswerMatrix m;
  m.tasks = a.tasks;
  m.workers = a.workers;
  m.rows.resize(a.tasks);
  for (int t = 0; t < a.tasks; ++t) {
    m.rows[t].reserve(a.task_workers[t].size());
    for (int w : a.task_workers[t]) {
      const bool wrong = stream.bernoulli(pop.at(t, w));
      m.rows[t].push_back(AnswerMatrix::Entry{
          w, static_cast<std::int8_t>(wrong ? -truth[t] : truth[t])});
    }
  }
  return m;
}

TrialOutcome run_trial(const Scenario& s, const PointPlan& plan, int trial_index) {
  const Problem& p = plan.problem;
  const int T = p.tasks;
  const auto point = static_cast<std::uint64_t>(plan.point_index);
  const auto trial = static_cast<std::uint64_t>(trial_index);

  rng::Stream truth_rng = rng::derive(s.seed, {point, trial, kTagTruth});
  TruthVector truth(T);
  for (int t = 0; t < T; ++t) truth[t] = truth_rng.coin() ? 1 : -1;

  const PopulationRealization pop = build_population(
      p, WorkerModel{plan.x}, rng::derive_key(s.seed, {point, trial, kTagPopulation}));

  bool uses_uniform = false, uses_greedy = false;
  for (SchemeKind k : s.schemes) {
    uses_uniform = uses_uniform || !scheme_uses_greedy(k);
    uses_greedy = uses_greedy || scheme_uses_greedy(k);
  }

  AnswerMatrix uniform_answers, greedy_answers;
  if (uses_uniform) {
    const Assignment graph = uniform_allocate(
        p, s.min_load(), rng::derive_key(s.seed, {point, trial, kTagUniformGraph}));
    rng::Stream ans = rng::derive(s.seed, {point, trial, kTagAnswersUniform});
    uniform_answers = sample_answers(graph, pop, truth, ans);
  }
  if (uses_greedy) {
    rng::Stream ans = rng::derive(s.seed, {point, trial, kTagAnswersGreedy});
    greedy_answers = sample_answers(plan.greedy_assignment, pop, truth, ans);
  }

  TrialOutcome out;
  for (SchemeKind kind : s.schemes) {
    const int idx = static_cast<int>(kind);
    rng::Stream decide_rng =
        rng::derive(s.seed, {point, trial, kTagDecideBase + static_cast<std::uint64_t>(idx)});
    DecisionVector decisions;
    LraDiagnostics diag;
    switch (kind) {
      case SchemeKind::MajorityUniform:
        decisions = decide_majority(uniform_answers, decide_rng);
        break;
      case SchemeKind::LraUniform:
        decisions = decide_lra(uniform_answers, decide_rng, &diag);
        break;
      case SchemeKind::LraGreedy:
        decisions = decide_lra(greedy_answers, decide_rng, &diag);
        break;
      case SchemeKind::MapGreedy: {
        const ReputationView view = ReputationView::from_problem(p);
        decisions = decide_map(greedy_answers, view, decide_rng);
        break;
      }
    }
    int errors = 0;
    for (int t = 0; t < T; ++t) errors += decisions[t] != truth[t];
    out.errors[idx] = errors;
    out.flagged[idx] = diag.flagged;
  }
  return out;
}

std::vector<SweepRecord> monte_carlo(const Scenario& s, int threads) {
  {
    const std::vector<std::string> problems = validate_scenario(s);
    if (!problems.empty()) {
      std::ostringstream os;
      os << "invalid scenario:";
      for (const auto& m : problems) os << "\n  - " << m;
      throw std::invalid_argument(os.str());
    }
  }

  int n_threads = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min(n_threads, s.trials);

  std::vector<SweepRecord> records;
  const int points = static_cast<int>(s.sweep_values.size());
  for (int point = 0; point < points; ++point) {
    const auto started = std::chrono::steady_clock::now();
    const PointPlan plan = plan_point(s, point);

    // Preallocated slots + an ordered reduction keep aggregates independent
    // of the thread count and of scheduling.
    std::vector<TrialOutcome> outcomes(s.trials);
    if (n_threads == 1) {
      for (int i = 0; i < s.trials; ++i) outcomes[i] = run_trial(s, plan, i);
    } else {
      std::exception_ptr error;
      std::mutex error_mutex;
      std::vector<std::thread> pool;
      pool.reserve(n_threads);
      for (int tid = 0; tid < n_threads; ++tid) {
        pool.emplace_back([&, tid] {
          try {
            for (int i = tid; i < s.trials; i += n_threads)
              outcomes[i] = run_trial(s, plan, i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (error) std::rethrow_exception(error);
    }

    const auto elapsed = std::chrono::steady_clock::now() - started;
    const double wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed)
            .count();

    const int T = plan.problem.tasks;
    for (SchemeKind kind : s.schemes) {
      const int idx = static_cast<int>(kind);
      long long errors = 0, flags = 0;
      for (const TrialOutcome& o : outcomes) {
        errors += o.errors[idx];
        flags += o.flagged[idx] ? 1 : 0;
      }
      SweepRecord rec;
      rec.scheme = scheme_token(kind);
      rec.beta = plan.beta;
      rec.x = plan.x;
      const double denom = static_cast<double>(s.trials) * T;
      rec.pe = static_cast<double>(errors) / denom;
      rec.stderr_nominal = std::sqrt(rec.pe * (1.0 - rec.pe) / denom);
      rec.trials = s.trials;
      rec.tie_flag_rate = static_cast<double>(flags) / s.trials;
      rec.wall_ms = wall_ms;
      records.push_back(std::move(rec));
    }
  }

  std::sort(records.begin(), records.end(),
            [](const SweepRecord& a, const SweepRecord& b) {
              if (a.scheme != b.scheme) return a.scheme < b.scheme;
              if (a.beta != b.beta) return a.beta < b.beta;
              return a.x < b.x;
            });
  return records;
}

std::string render_csv(const std::vector<SweepRecord>& records) {
  std::string out = "scheme,beta,x,pe,stderr,trials,tie_flag_rate\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%.5e,%.5e,%.5e,%.5e,%lld,%.5e\n",
                  r.scheme.c_str(), r.beta, r.x, r.pe, r.stderr_nominal, r.trials,
                  r.tie_flag_rate);
    out += buf;
  }
  return out;
}

}  // namespace crowdsim
