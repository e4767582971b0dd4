#pragma once

#include <span>
#include <stdexcept>

#include "crowdsim/model.hpp"

namespace crowdsim {

// Allocation quality measures. All are higher-is-better so one greedy
// maximizer serves every kind; error-based kinds carry a minus sign.
enum class ObjectiveKind {
  P1AvgError,      // -(1/T) sum_t exact task error
  P2AvgChernoff,   // -(1/T) sum_t Chernoff bound
  P3MutualInfo,    // sum_t I(answers_t ; truth_t)
  P4MaxError,      // -max_t exact task error
  P5MaxChernoff,   // -max_t Chernoff bound
  P6MinMutualInfo  // min_t I(answers_t ; truth_t)
};

// AsPrinted keeps the exponent denominator sum_k (d_k z_k)^2, which is not
// monotone in d and is retained only for side-by-side comparison. Corrected
// is the Hoeffding bound exp(-(sum_k d_k z_k (1-2 pi_k))^2 / (2 sum_k d_k z_k^2)).
enum class ChernoffVariant { AsPrinted, Corrected };

const char* objective_name(ObjectiveKind k);

// Lattice enumeration larger than this throws ComplexityGuard.
inline constexpr double kLatticeGuard = 1e8;

struct ComplexityGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Entropy of a Bernoulli(p) in bits. Domain [0, 1], endpoints give 0.
double binary_entropy(double p);

// Exact error probability of the maximum-a-posteriori decision for one task
// that receives d[k] independent answers from each class, where a class-k
// answer is wrong with probability pi[k]. Zero-likelihood-ratio patterns
// count half. Requires 0 < pi[k] < 1; cost is prod_k (d[k]+1) lattice points.
double exact_task_error(std::span<const int> degrees, std::span<const double> pi);

// Chernoff-style upper bound on the same error. Degenerate inputs (no
// informative answers) return 1.
double chernoff_task_error(std::span<const int> degrees, std::span<const double> pi,
                           ChernoffVariant variant);

// Mutual information (bits) between the task's answer vector and its truth.
double task_mutual_information(std::span<const int> degrees, std::span<const double> pi);

// Definition-level oracles: enumerate all 2^(sum d) sign patterns one by one
// instead of aggregating count vectors. Independent of the lattice code paths
// above; used by the verification suites. Require sum d <= 20.
double brute_force_task_error(std::span<const int> degrees, std::span<const double> pi);
double brute_force_mutual_information(std::span<const int> degrees,
                                      std::span<const double> pi);

double evaluate_objective(ObjectiveKind kind, const DegreeMatrix& d, const Problem& p,
                          ChernoffVariant variant = ChernoffVariant::Corrected);

}  // namespace crowdsim
