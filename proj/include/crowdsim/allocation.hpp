#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "crowdsim/objectives.hpp"

namespace crowdsim {

struct GreedyStep {
  int iteration;
  int task;
  int cls;
  double objective;  // objective value after this increment
};

struct GreedyResult {
  DegreeMatrix degrees;
  std::vector<GreedyStep> trace;
};

// Adds one feasible (task, class) unit at a time, always the one whose
// incremented matrix scores highest; ties go to the lowest task index, then
// the lowest class index. Stops when the budget is exhausted or every pair is
// saturated. For monotone submodular objectives (P3) over the feasible-set
// matroid this is the classic 1/2-approximation greedy.
GreedyResult greedy_allocate(const Problem& p, ObjectiveKind kind,
                             ChernoffVariant variant = ChernoffVariant::Corrected);

struct InfeasibleRegularGraph : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reputation-agnostic baseline: picks ceil(budget / r) workers uniformly at
// random, then builds a near-regular bipartite graph (task degrees differ by
// at most one, worker loads at most r). Deterministic in (p, r, seed).
Assignment uniform_allocate(const Problem& p, int r, std::uint64_t seed);

struct RealizationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Expands a class-level degree matrix into concrete edges, always picking the
// currently least-loaded workers of the class (ties in class order rotated by
// the task index, so equal-degree fills stay connected instead of splitting
// into aligned blocks). Uniform within-class loads make this always succeed;
// heterogeneous loads can make a feasible-looking matrix unrealizable, which
// throws RealizationFailed.
Assignment realize_assignment(const DegreeMatrix& d, const Problem& p);

// True iff every worker's load is within its limit, no (task, worker) pair
// repeats, and the total number of edges is within the budget.
bool is_feasible(const Assignment& a, const Problem& p);

// Exhaustive enumeration of every feasible edge set for tiny instances
// (tasks * workers <= 20 bits, family used by the matroid test-suites).
// Bit i of a member mask is the edge (task i / W, worker i % W).
std::vector<std::uint32_t> enumerate_feasible_family(const Problem& p);

}  // namespace crowdsim
