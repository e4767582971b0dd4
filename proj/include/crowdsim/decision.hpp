#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "crowdsim/model.hpp"
#include "crowdsim/rng.hpp"

namespace crowdsim {

// What the requester knows about workers: class membership and the class
// average error probabilities, never the realized per-worker values.
struct ReputationView {
  int tasks = 0;
  int classes = 0;
  std::vector<int> worker_class;  // length = workers
  std::vector<double> pi;         // row-major tasks x classes

  static ReputationView from_problem(const Problem& p);
  double pi_at(int t, int k) const { return pi[static_cast<std::size_t>(t) * classes + k]; }
};

// Sign of the per-task answer sum; zero sums are fair coin flips.
DecisionVector decide_majority(const AnswerMatrix& a, rng::Stream& tie_rng);

// Log-likelihood ratio log P(answers | tau=+1) / P(answers | tau=-1) for one
// task, given d[k] answers of which m[k] are "-1" per class. Equals
// sum_k (d[k] - 2 m[k]) * log((1-pi[k]) / pi[k]). The analytic error path
// and the sampled decision path both call this, so their tie sets agree
// bit for bit. Requires 0 < pi[k] < 1.
double map_llr(std::span<const int> degrees, std::span<const int> minus_counts,
               std::span<const double> pi);

// Per-task sign of map_llr under the view's class probabilities; zero ratios
// are fair coin flips.
DecisionVector decide_map(const AnswerMatrix& a, const ReputationView& view,
                          rng::Stream& tie_rng);

struct ZeroMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularTriple {
  std::vector<double> v;  // unit right singular vector estimate, length = workers
  double sigma = 0.0;
  int iterations = 0;
  bool converged = false;
  bool restarted = false;
};

// Power iteration on A^T A from the normalized all-ones vector. Convergence:
// successive iterates differ by < tol. On stagnation at zero or failure to
// converge within max_iter, restarts once from a seeded random unit vector;
// a still-unconverged result is returned with converged = false so callers
// can surface the degenerate-spectrum diagnostic instead of hiding it.
// Throws ZeroMatrix when A has no answers.
SingularTriple leading_right_singular_vector(const AnswerMatrix& a, double tol,
                                             int max_iter, std::uint64_t seed);

inline constexpr double kLraTol = 1e-10;
inline constexpr int kLraMaxIter = 1000;

struct LraDiagnostics {
  bool flagged = false;  // spectrum too degenerate for the iteration budget
  bool flipped = false;  // orientation resolved to -v
  int iterations = 0;
  double sigma = 0.0;
};

// Low-rank approximation rule: score_t = sum_w a_tw v_w with v the leading
// right singular vector, orientation chosen to agree with raw majority on the
// larger number of tasks; zero scores are fair coin flips.
DecisionVector decide_lra(const AnswerMatrix& a, rng::Stream& tie_rng,
                          LraDiagnostics* diag = nullptr);

}  // namespace crowdsim
