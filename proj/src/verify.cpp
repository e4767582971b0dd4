#include "crowdsim/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "crowdsim/allocation.hpp"
#include "crowdsim/decision.hpp"
#include "crowdsim/model.hpp"
#include "crowdsim/objectives.hpp"
#include "crowdsim/rng.hpp"

namespace crowdsim {
namespace {

struct Recorder {
  SuiteResult r;
  std::ostringstream detail;

  explicit Recorder(std::string name) { r.name = std::move(name); }

  void check(bool ok, const std::string& context) {
    ++r.checks;
    if (!ok) {
      ++r.failures;
      if (r.failures <= 5) detail << "  counterexample: " << context << "\n";
    }
  }

  SuiteResult finish(const std::string& note = "") {
    r.passed = r.failures == 0;
    if (!note.empty()) detail << "  " << note << "\n";
    r.detail = detail.str();
    return r;
  }
};

std::string describe(const std::vector<int>& d, const std::vector<double>& pi) {
  std::ostringstream os;
  os << "d=(";
  for (std::size_t k = 0; k < d.size(); ++k) os << (k ? "," : "") << d[k];
  os << ") pi=(";
  for (std::size_t k = 0; k < pi.size(); ++k) os << (k ? "," : "") << pi[k];
  os << ")";
  return os.str();
}

// Random per-task instances small enough for the pattern-level oracles.
void random_instance(rng::Stream& s, std::vector<int>* d, std::vector<double>* pi,
                     int max_classes = 3, int max_deg = 4, int min_total = 0) {
  for (;;) {
    const int K = 1 + static_cast<int>(s.below(max_classes));
    d->assign(K, 0);
    pi->assign(K, 0.0);
    int total = 0;
    for (int k = 0; k < K; ++k) {
      (*d)[k] = static_cast<int>(s.below(max_deg + 1));
      (*pi)[k] = 0.02 + 0.96 * s.uniform();
      total += (*d)[k];
    }
    if (total >= min_total) return;
  }
}

SuiteResult suite_mi_vs_brute_force() {
  Recorder rec("mi_vs_brute_force");
  rng::Stream s(0xA11CE5EEDULL);
  std::vector<int> d;
  std::vector<double> pi;
  for (int i = 0; i < 500; ++i) {
    random_instance(s, &d, &pi);
    const double a = task_mutual_information(d, pi);
    const double b = brute_force_mutual_information(d, pi);
    rec.check(std::abs(a - b) <= 1e-10,
              describe(d, pi) + " lattice=" + std::to_string(a) +
                  " pattern=" + std::to_string(b));
  }
  return rec.finish();
}

SuiteResult suite_error_vs_brute_force() {
  Recorder rec("error_vs_brute_force");
  rng::Stream s(0xE44041ULL);
  std::vector<int> d;
  std::vector<double> pi;
  for (int i = 0; i < 500; ++i) {
    random_instance(s, &d, &pi);
    const double a = exact_task_error(d, pi);
    const double b = brute_force_task_error(d, pi);
    rec.check(std::abs(a - b) <= 1e-12,
              describe(d, pi) + " lattice=" + std::to_string(a) +
                  " pattern=" + std::to_string(b));
  }
  return rec.finish();
}

// Independent route to the same number: enumerate count vectors with exact
// Pascal binomials and score 1/2 * sum_m N(m) * min(P(m|+), P(m|-)).
double posterior_route_error(const std::vector<int>& d, const std::vector<double>& pi) {
  const std::size_t K = d.size();
  std::vector<std::vector<double>> binom(K), pa(K), pb(K);
  for (std::size_t k = 0; k < K; ++k) {
    const int n = d[k];
    binom[k].assign(n + 1, 1.0);
    for (int i = 1; i <= n; ++i)
      for (int j = i - 1; j >= 1; --j) binom[k][j] += binom[k][j - 1];
    // binom[k] now holds row n of Pascal's triangle, built in place.
    pa[k].resize(n + 1);
    pb[k].resize(n + 1);
    for (int m = 0; m <= n; ++m) {
      double x = 1.0, y = 1.0;
      for (int i = 0; i < m; ++i) x *= pi[k];
      for (int i = 0; i < n - m; ++i) x *= 1.0 - pi[k];
      for (int i = 0; i < n - m; ++i) y *= pi[k];
      for (int i = 0; i < m; ++i) y *= 1.0 - pi[k];
      pa[k][m] = x;
      pb[k][m] = y;
    }
  }
  std::vector<int> m(K, 0);
  double err = 0.0;
  for (;;) {
    double n = 1.0, a = 1.0, b = 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      n *= binom[k][m[k]];
      a *= pa[k][m[k]];
      b *= pb[k][m[k]];
    }
    err += 0.5 * n * std::min(a, b);
    std::size_t k = 0;
    while (k < K && m[k] == d[k]) m[k++] = 0;
    if (k == K) break;
    ++m[k];
  }
  return err;
}

SuiteResult suite_error_posterior_identity() {
  Recorder rec("error_posterior_identity");
  rng::Stream s(0x9057E4ULL);
  std::vector<int> d;
  std::vector<double> pi;
  for (int i = 0; i < 500; ++i) {
    random_instance(s, &d, &pi, 3, 5);
    const double a = exact_task_error(d, pi);
    const double b = posterior_route_error(d, pi);
    rec.check(std::abs(a - b) <= 1e-12,
              describe(d, pi) + " llr-route=" + std::to_string(a) +
                  " min-route=" + std::to_string(b));
  }
  return rec.finish();
}

SuiteResult suite_chernoff_domination() {
  Recorder rec("chernoff_domination");
  rng::Stream s(0xC4EABULL);
  std::vector<int> d;
  std::vector<double> pi;
  int printed_violations = 0;
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    random_instance(s, &d, &pi, 3, 6);
    const double exact = exact_task_error(d, pi);
    const double corrected = chernoff_task_error(d, pi, ChernoffVariant::Corrected);
    rec.check(corrected >= exact - 1e-12,
              describe(d, pi) + " corrected=" + std::to_string(corrected) +
                  " exact=" + std::to_string(exact));
    const double printed = chernoff_task_error(d, pi, ChernoffVariant::AsPrinted);
    if (printed < exact - 1e-12) ++printed_violations;
  }
  std::ostringstream note;
  note << "as_printed variant undershoots the exact error on " << printed_violations
       << "/" << n << " instances (reported, not a failure)";
  return rec.finish(note.str());
}

SuiteResult suite_mi_monotonicity() {
  Recorder rec("mi_monotonicity");
  rng::Stream s(0x303030ULL);
  std::vector<int> d;
  std::vector<double> pi;
  for (int i = 0; i < 1000; ++i) {
    random_instance(s, &d, &pi);
    const double before = task_mutual_information(d, pi);
    const int k = static_cast<int>(s.below(d.size()));
    ++d[k];
    const double after = task_mutual_information(d, pi);
    rec.check(after >= before - 1e-12,
              describe(d, pi) + " grew class " + std::to_string(k) + ": " +
                  std::to_string(before) + " -> " + std::to_string(after));
  }
  return rec.finish();
}

SuiteResult suite_mi_submodularity() {
  Recorder rec("mi_submodularity");
  rng::Stream s(0x5B0D5ULL);
  std::vector<int> small, big;
  std::vector<double> pi;
  for (int i = 0; i < 200; ++i) {
    random_instance(s, &small, &pi);
    big = small;
    for (std::size_t k = 0; k < big.size(); ++k)
      big[k] += static_cast<int>(s.below(4));
    const int k = static_cast<int>(s.below(small.size()));
    const double gain_small = [&] {
      const double base = task_mutual_information(small, pi);
      ++small[k];
      const double grown = task_mutual_information(small, pi);
      --small[k];
      return grown - base;
    }();
    const double gain_big = [&] {
      const double base = task_mutual_information(big, pi);
      ++big[k];
      const double grown = task_mutual_information(big, pi);
      --big[k];
      return grown - base;
    }();
    rec.check(gain_small >= gain_big - 1e-9,
              describe(small, pi) + " vs " + describe(big, pi) + " class " +
                  std::to_string(k) + ": gains " + std::to_string(gain_small) +
                  " < " + std::to_string(gain_big));
  }
  return rec.finish();
}

SuiteResult suite_class_symmetry_inertness() {
  Recorder rec("class_symmetry_inertness");
  rng::Stream s(0x5F33DULL);
  std::vector<int> d, dp;
  std::vector<double> pi, pip;
  for (int i = 0; i < 200; ++i) {
    random_instance(s, &d, &pi);
    const std::size_t K = d.size();

    // Permuting class labels changes nothing.
    std::vector<std::size_t> perm(K);
    for (std::size_t k = 0; k < K; ++k) perm[k] = k;
    for (std::size_t k = K; k > 1; --k)
      std::swap(perm[k - 1], perm[s.below(k)]);
    dp.resize(K);
    pip.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      dp[k] = d[perm[k]];
      pip[k] = pi[perm[k]];
    }
    rec.check(std::abs(exact_task_error(d, pi) - exact_task_error(dp, pip)) <= 1e-12,
              "error changed under permutation, " + describe(d, pi));
    rec.check(std::abs(task_mutual_information(d, pi) -
                       task_mutual_information(dp, pip)) <= 1e-12,
              "mi changed under permutation, " + describe(d, pi));

    // A coin-flip class carries no information.
    dp = d;
    pip = pi;
    dp.push_back(1 + static_cast<int>(s.below(3)));
    pip.push_back(0.5);
    rec.check(std::abs(exact_task_error(d, pi) - exact_task_error(dp, pip)) <= 1e-12,
              "error moved when adding a pi=1/2 class, " + describe(d, pi));
    rec.check(std::abs(task_mutual_information(d, pi) -
                       task_mutual_information(dp, pip)) <= 1e-12,
              "mi moved when adding a pi=1/2 class, " + describe(d, pi));
  }
  return rec.finish();
}

SuiteResult suite_matroid_family() {
  Recorder rec("matroid_family");
  rng::Stream s(0x3A7401DULL);
  for (int i = 0; i < 25; ++i) {
    Problem p;
    for (;;) {
      p.tasks = 1 + static_cast<int>(s.below(3));
      const int W = 1 + static_cast<int>(s.below(4));
      if (p.tasks * W > 12) continue;
      p.classes = {ClassSpec{W, std::vector<double>(p.tasks, 0.3)}};
      p.loads.resize(W);
      for (int w = 0; w < W; ++w)
        p.loads[w] = 1 + static_cast<int>(s.below(p.tasks));
      p.budget = 1 + static_cast<int>(s.below(4));
      break;
    }
    const int W = p.num_workers();
    const int bits = p.tasks * W;
    const std::vector<std::uint32_t> family = enumerate_feasible_family(p);
    std::vector<char> member(1u << bits, 0);
    for (std::uint32_t m : family) member[m] = 1;

    std::ostringstream inst;
    inst << "T=" << p.tasks << " W=" << W << " C=" << p.budget;

    bool closed = true;
    for (std::uint32_t g : family)
      for (int b = 0; b < bits && closed; ++b)
        if ((g >> b) & 1u) closed = member[g ^ (1u << b)] != 0;
    rec.check(closed, inst.str() + ": downward closure fails");

    bool exchange = true;
    for (std::size_t gi = 0; gi < family.size() && exchange; ++gi) {
      for (std::size_t hi = 0; hi < family.size() && exchange; ++hi) {
        const std::uint32_t g = family[gi], h = family[hi];
        if (std::popcount(g) <= std::popcount(h)) continue;
        bool found = false;
        std::uint32_t extra = g & ~h;
        while (extra && !found) {
          const std::uint32_t bit = extra & (~extra + 1);
          found = member[h | bit] != 0;
          extra ^= bit;
        }
        exchange = found;
      }
    }
    rec.check(exchange, inst.str() + ": exchange fails");

    long long cap = 0;
    for (int w = 0; w < W; ++w) cap += std::min(p.loads[w], p.tasks);
    const int expected = static_cast<int>(std::min<long long>(p.budget, cap));
    bool maximal_ok = true;
    for (std::uint32_t g : family) {
      bool maximal = true;
      for (int b = 0; b < bits && maximal; ++b)
        if (!((g >> b) & 1u)) maximal = member[g | (1u << b)] == 0;
      if (maximal && std::popcount(g) != expected) maximal_ok = false;
    }
    rec.check(maximal_ok, inst.str() + ": a maximal member misses size " +
                              std::to_string(expected));
  }
  return rec.finish();
}

SuiteResult suite_greedy_half_guarantee() {
  Recorder rec("greedy_half_guarantee");
  rng::Stream s(0x62EEDULL);
  for (int i = 0; i < 40; ++i) {
    Problem p;
    p.tasks = 1 + static_cast<int>(s.below(3));
    const int K = 1 + static_cast<int>(s.below(2));
    p.classes.resize(K);
    int W = 0;
    for (int k = 0; k < K; ++k) {
      p.classes[k].size = 1 + static_cast<int>(s.below(3));
      W += p.classes[k].size;
      p.classes[k].pi.resize(p.tasks);
      for (int t = 0; t < p.tasks; ++t)
        p.classes[k].pi[t] = 0.05 + 0.9 * s.uniform();
    }
    p.loads.resize(W);
    for (int w = 0; w < W; ++w) p.loads[w] = 1 + static_cast<int>(s.below(3));
    p.budget = 1 + static_cast<int>(s.below(5));

    const GreedyResult g = greedy_allocate(p, ObjectiveKind::P3MutualInfo);
    const double got = evaluate_objective(ObjectiveKind::P3MutualInfo, g.degrees, p);

    // Exhaustive optimum over feasible degree matrices.
    const int cells = p.tasks * K;
    DegreeMatrix d = DegreeMatrix::zeros(p.tasks, K);
    double best = 0.0;
    for (;;) {
      if (degree_matrix_feasible(d, p))
        best = std::max(best, evaluate_objective(ObjectiveKind::P3MutualInfo, d, p));
      int c = 0;
      while (c < cells) {
        const int k = c % K;
        if (d.d[c] < std::min<long long>(p.classes[k].size, p.budget)) {
          ++d.d[c];
          break;
        }
        d.d[c++] = 0;
      }
      if (c == cells) break;
    }

    std::ostringstream inst;
    inst << "T=" << p.tasks << " K=" << K << " C=" << p.budget
         << " greedy=" << got << " optimum=" << best;
    rec.check(got >= 0.5 * best - 1e-9, inst.str());
  }
  return rec.finish();
}

// Cyclic Jacobi eigensolver, the dense oracle for the sparse power iteration.
void jacobi_symmetric(std::vector<double> a, int n, std::vector<double>* values,
                      std::vector<double>* vectors) {
  std::vector<double>& v = *vectors;
  v.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
  auto at = [&](std::vector<double>& m, int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * n + c];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(at(a, p, q)));
    if (off < 1e-14) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = at(a, i, p), aiq = at(a, i, q);
          at(a, i, p) = c * aip - sn * aiq;
          at(a, i, q) = sn * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = at(a, p, i), aqi = at(a, q, i);
          at(a, p, i) = c * api - sn * aqi;
          at(a, q, i) = sn * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = at(v, i, p), viq = at(v, i, q);
          at(v, i, p) = c * vip - sn * viq;
          at(v, i, q) = sn * vip + c * viq;
        }
      }
    }
  }
  values->resize(n);
  for (int i = 0; i < n; ++i) (*values)[i] = a[static_cast<std::size_t>(i) * n + i];
}

SuiteResult suite_power_iteration_vs_jacobi() {
  Recorder rec("power_iteration_vs_jacobi");
  rng::Stream s(0x7AC0B1ULL);
  int kept = 0;
  while (kept < 100) {
    const int T = 2 + static_cast<int>(s.below(9));   // 2..10
    const int W = 2 + static_cast<int>(s.below(9));   // 2..10
    AnswerMatrix a;
    a.tasks = T;
    a.workers = W;
    a.rows.resize(T);
    long long entries = 0;
    for (int t = 0; t < T; ++t)
      for (int w = 0; w < W; ++w)
        if (s.uniform() < 0.6) {
          a.rows[t].push_back(
              AnswerMatrix::Entry{w, static_cast<std::int8_t>(s.coin() ? 1 : -1)});
          ++entries;
        }
    if (entries == 0) continue;

    std::vector<double> gram(static_cast<std::size_t>(W) * W, 0.0);
    for (int t = 0; t < T; ++t)
      for (const auto& e1 : a.rows[t])
        for (const auto& e2 : a.rows[t])
          gram[static_cast<std::size_t>(e1.worker) * W + e2.worker] +=
              static_cast<double>(e1.value) * e2.value;

    std::vector<double> values, vectors;
    jacobi_symmetric(gram, W, &values, &vectors);
    int top = 0;
    for (int i = 1; i < W; ++i)
      if (values[i] > values[top]) top = i;
    double second = -1.0;
    for (int i = 0; i < W; ++i)
      if (i != top) second = std::max(second, values[i]);
    const double lambda1 = values[top];
    if (lambda1 <= 0.0 || (second > 0.0 && second / lambda1 > 0.9))
      continue;  // spectrum too flat for a fixed iteration budget; resample
    ++kept;

    const SingularTriple triple =
        leading_right_singular_vector(a, kLraTol, kLraMaxIter, 0xFEEDULL);
    double dot = 0.0;
    for (int w = 0; w < W; ++w)
      dot += triple.v[w] * vectors[static_cast<std::size_t>(w) * W + top];
    // Residual orthogonal to the oracle vector = sin of the angle between
    // them, computed without the cancellation that sqrt(1 - dot^2) suffers.
    double angle_err = 0.0;
    for (int w = 0; w < W; ++w) {
      const double r = triple.v[w] - dot * vectors[static_cast<std::size_t>(w) * W + top];
      angle_err += r * r;
    }
    angle_err = std::sqrt(angle_err);
    std::ostringstream inst;
    inst << "T=" << T << " W=" << W << " lambda1=" << lambda1
         << " angle_err=" << angle_err << " converged=" << triple.converged;
    rec.check(triple.converged && angle_err <= 1e-8, inst.str());
    rec.check(std::abs(triple.sigma * triple.sigma - lambda1) <=
                  1e-6 * std::max(1.0, lambda1),
              inst.str() + " sigma^2 != lambda1");
  }
  return rec.finish();
}

}  // namespace

std::vector<std::string> verification_suite_names() {
  return {"mi_vs_brute_force",      "error_vs_brute_force",
          "error_posterior_identity", "chernoff_domination",
          "mi_monotonicity",        "mi_submodularity",
          "class_symmetry_inertness", "matroid_family",
          "greedy_half_guarantee",  "power_iteration_vs_jacobi"};
}

SuiteResult run_verification_suite(const std::string& name) {
  if (name == "mi_vs_brute_force") return suite_mi_vs_brute_force();
  if (name == "error_vs_brute_force") return suite_error_vs_brute_force();
  if (name == "error_posterior_identity") return suite_error_posterior_identity();
  if (name == "chernoff_domination") return suite_chernoff_domination();
  if (name == "mi_monotonicity") return suite_mi_monotonicity();
  if (name == "mi_submodularity") return suite_mi_submodularity();
  if (name == "class_symmetry_inertness") return suite_class_symmetry_inertness();
  if (name == "matroid_family") return suite_matroid_family();
  if (name == "greedy_half_guarantee") return suite_greedy_half_guarantee();
  if (name == "power_iteration_vs_jacobi") return suite_power_iteration_vs_jacobi();
  throw std::invalid_argument("unknown verification suite: " + name);
}

std::vector<SuiteResult> run_verification_suites() {
  std::vector<SuiteResult> out;
  for (const std::string& name : verification_suite_names())
    out.push_back(run_verification_suite(name));
  return out;
}

}  // namespace crowdsim
