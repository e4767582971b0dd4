#include "crowdsim/decision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crowdsim {

ReputationView ReputationView::from_problem(const Problem& p) {
  ReputationView v;
  v.tasks = p.tasks;
  v.classes = p.num_classes();
  const int W = p.num_workers();
  v.worker_class.resize(W);
  for (int w = 0; w < W; ++w) v.worker_class[w] = p.class_of_worker(w);
  v.pi.resize(static_cast<std::size_t>(v.tasks) * v.classes);
  for (int t = 0; t < v.tasks; ++t)
    for (int k = 0; k < v.classes; ++k)
      v.pi[static_cast<std::size_t>(t) * v.classes + k] = p.pi(t, k);
  return v;
}

DecisionVector decide_majority(const AnswerMatrix& a, rng::Stream& tie_rng) {
  DecisionVector out(a.tasks);
  for (int t = 0; t < a.tasks; ++t) {
    int sum = 0;
    for (const auto& e : a.rows[t]) sum += e.value;
    if (sum > 0)
      out[t] = 1;
    else if (sum < 0)
      out[t] = -1;
    else
      out[t] = tie_rng.coin() ? 1 : -1;
  }
  return out;
}

double map_llr(std::span<const int> degrees, std::span<const int> minus_counts,
               std::span<const double> pi) {
  double llr = 0.0;
  for (std::size_t k = 0; k < degrees.size(); ++k)
    llr += (degrees[k] - 2 * minus_counts[k]) * std::log((1.0 - pi[k]) / pi[k]);
  return llr;
}

DecisionVector decide_map(const AnswerMatrix& a, const ReputationView& view,
                          rng::Stream& tie_rng) {
  if (a.tasks != view.tasks)
    throw std::invalid_argument("answer matrix and reputation view disagree on tasks");
  const int K = view.classes;
  DecisionVector out(a.tasks);
  std::vector<int> deg(K), minus(K);
  std::vector<double> pi_row(K);
  for (int t = 0; t < a.tasks; ++t) {
    std::fill(deg.begin(), deg.end(), 0);
    std::fill(minus.begin(), minus.end(), 0);
    for (const auto& e : a.rows[t]) {
      const int k = view.worker_class[e.worker];
      ++deg[k];
      if (e.value < 0) ++minus[k];
    }
    for (int k = 0; k < K; ++k) pi_row[k] = view.pi_at(t, k);
    const double llr = map_llr(deg, minus, pi_row);
    if (llr > 0.0)
      out[t] = 1;
    else if (llr < 0.0)
      out[t] = -1;
    else
      out[t] = tie_rng.coin() ? 1 : -1;
  }
  return out;
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// One multiplication by A^T A through the sparse edge lists.
void apply_gram(const AnswerMatrix& a, const std::vector<double>& v,
                std::vector<double>& av, std::vector<double>& out) {
  for (int t = 0; t < a.tasks; ++t) {
    double s = 0.0;
    for (const auto& e : a.rows[t]) s += e.value * v[e.worker];
    av[t] = s;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (int t = 0; t < a.tasks; ++t)
    for (const auto& e : a.rows[t]) out[e.worker] += e.value * av[t];
}

}  // namespace

SingularTriple leading_right_singular_vector(const AnswerMatrix& a, double tol,
                                             int max_iter, std::uint64_t seed) {
  long long entries = 0;
  for (const auto& row : a.rows) entries += static_cast<long long>(row.size());
  if (entries == 0) throw ZeroMatrix("answer matrix has no entries");
  const int W = a.workers;

  SingularTriple best;
  std::vector<double> v(W, 1.0 / std::sqrt(static_cast<double>(W)));
  std::vector<double> av(a.tasks), next(W), probe(W);

  auto seeded_unit = [&](std::vector<double>& u) {
    rng::Stream s(seed);
    double n = 0.0;
    while (n == 0.0) {
      for (int w = 0; w < W; ++w) u[w] = s.uniform() - 0.5;
      n = norm2(u);
    }
    for (int w = 0; w < W; ++w) u[w] /= n;
  };

  // Any eigenvector is a fixed point of the normalized iteration, and an
  // integer-symmetric matrix can make the all-ones start sit exactly on a
  // subdominant one. After converging, boost a seeded probe kept orthogonal
  // to the accepted vector; a larger Rayleigh quotient there unmasks the
  // stuck start, and the probe doubles as the restart direction.
  auto dominated = [&](const std::vector<double>& vec, double lambda) {
    seeded_unit(probe);
    for (int it = 0; it < 24; ++it) {
      double along = 0.0;
      for (int w = 0; w < W; ++w) along += probe[w] * vec[w];
      for (int w = 0; w < W; ++w) probe[w] -= along * vec[w];
      const double rest = norm2(probe);
      if (rest < 1e-12) return true;  // probe collapsed onto vec itself
      for (int w = 0; w < W; ++w) probe[w] /= rest;
      apply_gram(a, probe, av, next);
      const double q = norm2(next);
      if (q > lambda * (1.0 + 1e-9)) return false;
      if (q == 0.0) return true;
      probe = next;
      for (int w = 0; w < W; ++w) probe[w] /= q;
    }
    return true;
  };

  for (int phase = 0; phase < 2; ++phase) {
    for (int it = 0; it < max_iter; ++it) {
      apply_gram(a, v, av, next);
      const double n = norm2(next);
      ++best.iterations;
      if (n == 0.0) break;  // start vector sits in the kernel; try random
      for (int w = 0; w < W; ++w) next[w] /= n;
      double diff = 0.0;
      for (int w = 0; w < W; ++w) diff += (next[w] - v[w]) * (next[w] - v[w]);
      diff = std::sqrt(diff);
      v.swap(next);
      if (diff < tol) {
        if (phase == 0 && !dominated(v, n)) break;  // restart via the probe
        best.v = v;
        best.sigma = std::sqrt(n);
        best.converged = true;
        return best;
      }
    }
    if (phase == 1) break;
    // One restart: seeded random direction, almost surely outside any kernel
    // and misaligned with whatever symmetry stalled the deterministic start.
    seeded_unit(v);
    best.restarted = true;
  }

  best.v = v;
  apply_gram(a, v, av, next);
  best.sigma = std::sqrt(norm2(next));
  best.converged = false;
  return best;
}

DecisionVector decide_lra(const AnswerMatrix& a, rng::Stream& tie_rng,
                          LraDiagnostics* diag) {
  // The restart seed is drawn up front so the draw count never depends on
  // whether the iteration happened to converge.
  const std::uint64_t restart_seed = tie_rng.next();
  SingularTriple sv =
      leading_right_singular_vector(a, kLraTol, kLraMaxIter, restart_seed);

  std::vector<double> score(a.tasks);
  int agree = 0;
  for (int t = 0; t < a.tasks; ++t) {
    double s = 0.0;
    int raw = 0;
    for (const auto& e : a.rows[t]) {
      s += e.value * sv.v[e.worker];
      raw += e.value;
    }
    score[t] = s;
    const int ds = (s > 0.0) - (s < 0.0);
    const int dm = (raw > 0) - (raw < 0);
    agree += ds * dm;
  }
  const bool flip = agree < 0;
  DecisionVector out(a.tasks);
  for (int t = 0; t < a.tasks; ++t) {
    const double s = flip ? -score[t] : score[t];
    if (s > 0.0)
      out[t] = 1;
    else if (s < 0.0)
      out[t] = -1;
    else
      out[t] = tie_rng.coin() ? 1 : -1;
  }
  if (diag) {
    diag->flagged = !sv.converged || sv.restarted;
    diag->flipped = flip;
    diag->iterations = sv.iterations;
    diag->sigma = sv.sigma;
  }
  return out;
}

}  // namespace crowdsim
