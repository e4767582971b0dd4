#include "crowdsim/objectives.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "crowdsim/decision.hpp"

namespace crowdsim {
namespace {

constexpr double kLn2 = 0.6931471805599453;

// Compensated accumulator; lattice sums can mix magnitudes badly.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

void check_task_inputs(std::span<const int> degrees, std::span<const double> pi) {
  if (degrees.size() != pi.size())
    throw std::invalid_argument("degrees and pi must have one entry per class");
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    if (degrees[k] < 0) throw std::invalid_argument("negative degree");
    if (!(pi[k] > 0.0) || !(pi[k] < 1.0))
      throw std::domain_error("pi must lie strictly inside (0, 1)");
  }
}

void check_lattice_size(std::span<const int> degrees) {
  double points = 1.0;
  for (int d : degrees) points *= static_cast<double>(d) + 1.0;
  if (points > kLatticeGuard) {
    std::ostringstream os;
    os << "count-vector lattice has " << points << " points, over the "
       << kLatticeGuard << " guard";
    throw ComplexityGuard(os.str());
  }
}

double log_binom(int n, int m) {
  return std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
}

bool advance(std::vector<int>& m, std::span<const int> degrees) {
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] < degrees[k]) {
      ++m[k];
      std::fill(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(k), 0);
      return true;
    }
  }
  return false;
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

const char* objective_name(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::P1AvgError: return "P1";
    case ObjectiveKind::P2AvgChernoff: return "P2";
    case ObjectiveKind::P3MutualInfo: return "P3";
    case ObjectiveKind::P4MaxError: return "P4";
    case ObjectiveKind::P5MaxChernoff: return "P5";
    case ObjectiveKind::P6MinMutualInfo: return "P6";
  }
  return "?";
}

double binary_entropy(double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) throw std::domain_error("entropy needs p in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

double exact_task_error(std::span<const int> degrees, std::span<const double> pi) {
  check_task_inputs(degrees, pi);
  check_lattice_size(degrees);
  const std::size_t K = degrees.size();

  // log P(m_k wrong answers | truth) per class and count.
  std::vector<std::vector<double>> lp(K);
  for (std::size_t k = 0; k < K; ++k) {
    lp[k].resize(degrees[k] + 1);
    const double lpi = std::log(pi[k]), lq = std::log1p(-pi[k]);
    for (int m = 0; m <= degrees[k]; ++m)
      lp[k][m] = log_binom(degrees[k], m) + m * lpi + (degrees[k] - m) * lq;
  }

  std::vector<int> m(K, 0);
  Kahan err;
  do {
    double logp = 0.0;
    for (std::size_t k = 0; k < K; ++k) logp += lp[k][m[k]];
    // Shared with decide_map so analytic and sampled tie sets agree exactly.
    const double llr = map_llr(degrees, m, pi);
    if (llr < 0.0)
      err.add(std::exp(logp));
    else if (llr == 0.0)
      err.add(0.5 * std::exp(logp));
  } while (advance(m, degrees));
  return err.sum;
}

double chernoff_task_error(std::span<const int> degrees, std::span<const double> pi,
                           ChernoffVariant variant) {
  check_task_inputs(degrees, pi);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    const double z = std::log((1.0 - pi[k]) / pi[k]);
    num += degrees[k] * (1.0 - 2.0 * pi[k]) * z;
    if (variant == ChernoffVariant::AsPrinted)
      den += (degrees[k] * z) * (degrees[k] * z);
    else
      den += 2.0 * degrees[k] * z * z;
  }
  if (num == 0.0 || den == 0.0) return 1.0;
  if (variant == ChernoffVariant::AsPrinted) return std::exp(-num / den);
  return std::min(1.0, std::exp(-num * num / den));
}

double task_mutual_information(std::span<const int> degrees, std::span<const double> pi) {
  check_task_inputs(degrees, pi);
  check_lattice_size(degrees);
  const std::size_t K = degrees.size();

  std::vector<std::vector<double>> lbin(K), la(K), lb(K);
  double h_cond = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const int d = degrees[k];
    lbin[k].resize(d + 1);
    la[k].resize(d + 1);
    lb[k].resize(d + 1);
    const double lpi = std::log(pi[k]), lq = std::log1p(-pi[k]);
    for (int m = 0; m <= d; ++m) {
      lbin[k][m] = log_binom(d, m);
      la[k][m] = m * lpi + (d - m) * lq;  // log P(pattern | tau = +1)
      lb[k][m] = (d - m) * lpi + m * lq;  // log P(pattern | tau = -1)
    }
    h_cond += d * binary_entropy(pi[k]);
  }

  std::vector<int> m(K, 0);
  Kahan h_ans;
  do {
    double ln = 0.0, pa = 0.0, pb = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      ln += lbin[k][m[k]];
      pa += la[k][m[k]];
      pb += lb[k][m[k]];
    }
    const double logp = -kLn2 + log_add_exp(pa, pb);  // log of the symmetrized P
    h_ans.add(std::exp(ln + logp) * (-logp / kLn2));
  } while (advance(m, degrees));
  return h_ans.sum - h_cond;
}

namespace {

// Per-pattern machinery shared by the two brute-force oracles: conditional
// probabilities of one fully spelled-out sign pattern, no binomial counting.
struct PatternEnumerator {
  std::vector<std::uint32_t> class_mask;
  std::vector<std::vector<double>> powp, powq;
  std::span<const int> degrees;
  int n = 0;

  PatternEnumerator(std::span<const int> d, std::span<const double> pi) : degrees(d) {
    check_task_inputs(d, pi);
    for (int dk : d) n += dk;
    if (n > 20)
      throw std::invalid_argument("brute-force oracles take at most 20 answers");
    const std::size_t K = d.size();
    class_mask.resize(K);
    powp.resize(K);
    powq.resize(K);
    int bit = 0;
    for (std::size_t k = 0; k < K; ++k) {
      for (int i = 0; i < d[k]; ++i) class_mask[k] |= 1u << bit++;
      powp[k].resize(d[k] + 1);
      powq[k].resize(d[k] + 1);
      powp[k][0] = powq[k][0] = 1.0;
      for (int j = 1; j <= d[k]; ++j) {
        powp[k][j] = powp[k][j - 1] * pi[k];
        powq[k][j] = powq[k][j - 1] * (1.0 - pi[k]);
      }
    }
  }

  // P(pattern | tau = +1) and P(pattern | tau = -1); a set bit is a "-1"
  // answer, i.e. an error when tau = +1.
  void conditionals(std::uint32_t mask, double* p_plus, double* p_minus) const {
    double a = 1.0, b = 1.0;
    for (std::size_t k = 0; k < class_mask.size(); ++k) {
      const int m = std::popcount(mask & class_mask[k]);
      a *= powp[k][m] * powq[k][degrees[k] - m];
      b *= powp[k][degrees[k] - m] * powq[k][m];
    }
    *p_plus = a;
    *p_minus = b;
  }
};

}  // namespace

double brute_force_task_error(std::span<const int> degrees, std::span<const double> pi) {
  PatternEnumerator pat(degrees, pi);
  Kahan err;
  for (std::uint32_t mask = 0; mask < (1u << pat.n); ++mask) {
    double p_plus, p_minus;
    pat.conditionals(mask, &p_plus, &p_minus);
    if (p_plus < p_minus)
      err.add(p_plus);
    else if (p_plus == p_minus)
      err.add(0.5 * p_plus);
  }
  return err.sum;
}

double brute_force_mutual_information(std::span<const int> degrees,
                                      std::span<const double> pi) {
  PatternEnumerator pat(degrees, pi);
  Kahan h_ans, h_plus, h_minus;
  for (std::uint32_t mask = 0; mask < (1u << pat.n); ++mask) {
    double p_plus, p_minus;
    pat.conditionals(mask, &p_plus, &p_minus);
    const double pa = 0.5 * (p_plus + p_minus);
    h_ans.add(-pa * std::log2(pa));
    h_plus.add(-p_plus * std::log2(p_plus));
    h_minus.add(-p_minus * std::log2(p_minus));
  }
  return h_ans.sum - 0.5 * (h_plus.sum + h_minus.sum);
}

double evaluate_objective(ObjectiveKind kind, const DegreeMatrix& d, const Problem& p,
                          ChernoffVariant variant) {
  if (d.tasks != p.tasks || d.classes != p.num_classes())
    throw std::invalid_argument("degree matrix shape differs from the problem");
  const int T = d.tasks, K = d.classes;

  std::vector<int> row(K);
  std::vector<double> pi_row(K);
  auto task_value = [&](int t) {
    for (int k = 0; k < K; ++k) {
      row[k] = d.at(t, k);
      pi_row[k] = p.pi(t, k);
    }
    switch (kind) {
      case ObjectiveKind::P1AvgError:
      case ObjectiveKind::P4MaxError:
        return exact_task_error(row, pi_row);
      case ObjectiveKind::P2AvgChernoff:
      case ObjectiveKind::P5MaxChernoff:
        return chernoff_task_error(row, pi_row, variant);
      case ObjectiveKind::P3MutualInfo:
      case ObjectiveKind::P6MinMutualInfo:
        return task_mutual_information(row, pi_row);
    }
    return 0.0;
  };

  switch (kind) {
    case ObjectiveKind::P1AvgError:
    case ObjectiveKind::P2AvgChernoff: {
      Kahan sum;
      for (int t = 0; t < T; ++t) sum.add(task_value(t));
      return -sum.sum / T;
    }
    case ObjectiveKind::P3MutualInfo: {
      Kahan sum;
      for (int t = 0; t < T; ++t) sum.add(task_value(t));
      return sum.sum;
    }
    case ObjectiveKind::P4MaxError:
    case ObjectiveKind::P5MaxChernoff: {
      double worst = 0.0;
      for (int t = 0; t < T; ++t) worst = std::max(worst, task_value(t));
      return -worst;
    }
    case ObjectiveKind::P6MinMutualInfo: {
      double worst = std::numeric_limits<double>::infinity();
      for (int t = 0; t < T; ++t) worst = std::min(worst, task_value(t));
      return worst;
    }
  }
  return 0.0;
}

}  // namespace crowdsim
