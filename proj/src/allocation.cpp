#include "crowdsim/allocation.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "crowdsim/rng.hpp"

namespace crowdsim {
namespace {

double task_measure(ObjectiveKind kind, std::span<const int> row,
                    std::span<const double> pi, ChernoffVariant variant) {
  switch (kind) {
    case ObjectiveKind::P1AvgError:
    case ObjectiveKind::P4MaxError:
      return exact_task_error(row, pi);
    case ObjectiveKind::P2AvgChernoff:
    case ObjectiveKind::P5MaxChernoff:
      return chernoff_task_error(row, pi, variant);
    case ObjectiveKind::P3MutualInfo:
    case ObjectiveKind::P6MinMutualInfo:
      return task_mutual_information(row, pi);
  }
  return 0.0;
}

}  // namespace

GreedyResult greedy_allocate(const Problem& p, ObjectiveKind kind,
                             ChernoffVariant variant) {
  require_valid(p);
  const int T = p.tasks, K = p.num_classes();
  GreedyResult res{DegreeMatrix::zeros(T, K), {}};
  if (p.budget <= 0) return res;

  std::vector<long long> class_budget(K);
  for (int k = 0; k < K; ++k) class_budget[k] = p.class_load_budget(k);
  std::vector<long long> class_used(K, 0);
  long long total = 0;

  DegreeMatrix& d = res.degrees;
  std::vector<int> row(K);
  std::vector<double> pi_row(K);
  auto fill_row = [&](int t) {
    for (int k = 0; k < K; ++k) {
      row[k] = d.at(t, k);
      pi_row[k] = p.pi(t, k);
    }
  };

  // v[t] = current task measure, cand[t*K+k] = measure after one more answer
  // of class k; only the chosen task's entries ever need refreshing.
  std::vector<double> v(T);
  std::vector<double> cand(static_cast<std::size_t>(T) * K);
  auto refresh = [&](int t) {
    fill_row(t);
    v[t] = task_measure(kind, row, pi_row, variant);
    for (int k = 0; k < K; ++k) {
      ++row[k];
      cand[static_cast<std::size_t>(t) * K + k] = task_measure(kind, row, pi_row, variant);
      --row[k];
    }
  };
  for (int t = 0; t < T; ++t) refresh(t);

  const bool extreme_kind = kind == ObjectiveKind::P4MaxError ||
                            kind == ObjectiveKind::P5MaxChernoff ||
                            kind == ObjectiveKind::P6MinMutualInfo;
  const bool min_kind = kind == ObjectiveKind::P6MinMutualInfo;
  double sum_v = 0.0;
  for (int t = 0; t < T; ++t) sum_v += v[t];

  // Extremes of v excluding one task, via prefix/suffix scans.
  std::vector<double> pre(T + 1), suf(T + 1);
  auto rebuild_extremes = [&] {
    const double init = min_kind ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    pre[0] = suf[T] = init;
    for (int t = 0; t < T; ++t)
      pre[t + 1] = min_kind ? std::min(pre[t], v[t]) : std::max(pre[t], v[t]);
    for (int t = T - 1; t >= 0; --t)
      suf[t] = min_kind ? std::min(suf[t + 1], v[t]) : std::max(suf[t + 1], v[t]);
  };

  auto objective_with = [&](int t, double nv) {
    switch (kind) {
      case ObjectiveKind::P1AvgError:
      case ObjectiveKind::P2AvgChernoff:
        return -(sum_v - v[t] + nv) / T;
      case ObjectiveKind::P3MutualInfo:
        return sum_v - v[t] + nv;
      case ObjectiveKind::P4MaxError:
      case ObjectiveKind::P5MaxChernoff:
        return -std::max(std::max(pre[t], suf[t + 1]), nv);
      case ObjectiveKind::P6MinMutualInfo:
        return std::min(std::min(pre[t], suf[t + 1]), nv);
    }
    return 0.0;
  };

  int iteration = 0;
  while (total < p.budget) {
    if (extreme_kind) rebuild_extremes();
    int best_t = -1, best_k = -1;
    double best_obj = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < K; ++k) {
        if (d.at(t, k) >= p.classes[k].size) continue;
        if (class_used[k] >= class_budget[k]) continue;
        const double obj = objective_with(t, cand[static_cast<std::size_t>(t) * K + k]);
        if (obj > best_obj) {
          best_obj = obj;
          best_t = t;
          best_k = k;
        }
      }
    }
    if (best_t < 0) break;

    const double nv = cand[static_cast<std::size_t>(best_t) * K + best_k];
    ++d.at(best_t, best_k);
    ++class_used[best_k];
    ++total;
    sum_v += nv - v[best_t];
    refresh(best_t);
    ++iteration;

    double obj_now;
    switch (kind) {
      case ObjectiveKind::P1AvgError:
      case ObjectiveKind::P2AvgChernoff:
        obj_now = -sum_v / T;
        break;
      case ObjectiveKind::P3MutualInfo:
        obj_now = sum_v;
        break;
      case ObjectiveKind::P4MaxError:
      case ObjectiveKind::P5MaxChernoff:
        obj_now = -*std::max_element(v.begin(), v.end());
        break;
      default:
        obj_now = *std::min_element(v.begin(), v.end());
        break;
    }
    res.trace.push_back(GreedyStep{iteration, best_t, best_k, obj_now});
  }
  return res;
}

namespace {

Assignment finish(int tasks, int workers, std::vector<std::vector<int>> rows) {
  for (auto& r : rows) std::sort(r.begin(), r.end());
  return Assignment{tasks, workers, std::move(rows)};
}

}  // namespace

Assignment uniform_allocate(const Problem& p, int r, std::uint64_t seed) {
  require_valid(p);
  if (r <= 0) throw std::invalid_argument("uniform allocation needs a positive load");
  const int T = p.tasks, W = p.num_workers();
  const long long C = p.budget;
  if (C <= 0) return Assignment{T, W, std::vector<std::vector<int>>(T)};

  const long long n_sel = (C + r - 1) / r;
  if (n_sel > W) {
    std::ostringstream os;
    os << "budget " << C << " at load " << r << " needs " << n_sel
       << " workers, population has " << W;
    throw InfeasibleRegularGraph(os.str());
  }
  const long long max_deg = (C + T - 1) / T;  // ceil: the largest task degree
  if (max_deg > n_sel) {
    std::ostringstream os;
    os << "a task needs " << max_deg << " distinct workers but only " << n_sel
       << " are hired";
    throw InfeasibleRegularGraph(os.str());
  }
  const int n = static_cast<int>(n_sel);

  rng::Stream s(seed);

  // Hire n workers uniformly at random; the sampled order stays random, which
  // the quota split below relies on.
  std::vector<int> idx(W);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < n; ++i) {
    const int j = i + static_cast<int>(s.below(static_cast<std::uint64_t>(W - i)));
    std::swap(idx[i], idx[j]);
  }

  std::vector<int> deg(T);
  const long long base = C / T, extra = C % T;
  for (int t = 0; t < T; ++t) deg[t] = static_cast<int>(base + (t < extra ? 1 : 0));

  std::vector<int> quota(n);
  for (int i = 0; i < n; ++i) quota[i] = static_cast<int>(C / n + (i < C % n ? 1 : 0));

  std::vector<int> stubs;
  stubs.reserve(static_cast<std::size_t>(C));
  for (int i = 0; i < n; ++i) stubs.insert(stubs.end(), quota[i], i);

  // Pair task slots with worker stubs; a shuffle collides (same worker twice
  // in one task) only rarely, so a few attempts nearly always land.
  std::vector<int> seen(n, -1);
  for (int attempt = 0; attempt < 8; ++attempt) {
    for (std::size_t i = stubs.size(); i > 1; --i) {
      const std::size_t j = s.below(i);
      std::swap(stubs[i - 1], stubs[j]);
    }
    std::vector<std::vector<int>> rows(T);
    std::size_t pos = 0;
    bool ok = true;
    for (int t = 0; t < T && ok; ++t) {
      rows[t].reserve(deg[t]);
      for (int j = 0; j < deg[t]; ++j) {
        const int local = stubs[pos++];
        if (seen[local] == t) {
          ok = false;
          break;
        }
        seen[local] = t;
        rows[t].push_back(idx[local]);
      }
    }
    if (ok) return finish(T, W, std::move(rows));
    std::fill(seen.begin(), seen.end(), -1);
  }

  // Deterministic fallback: fill each task with the least-loaded hires, ties
  // broken by a fresh random key, which keeps loads within ceil(C/n) <= r.
  std::vector<int> load(n, 0);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> key(n);
  std::vector<std::vector<int>> rows(T);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) key[i] = s.next();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (load[a] != load[b]) return load[a] < load[b];
      return key[a] < key[b];
    });
    rows[t].reserve(deg[t]);
    for (int j = 0; j < deg[t]; ++j) {
      const int local = order[j];
      ++load[local];
      rows[t].push_back(idx[local]);
    }
  }
  Assignment a = finish(T, W, std::move(rows));
  if (!is_feasible(a, p))
    throw InfeasibleRegularGraph("constructed graph violates worker loads");
  return a;
}

Assignment realize_assignment(const DegreeMatrix& d, const Problem& p) {
  std::string why;
  if (!degree_matrix_feasible(d, p, &why))
    throw std::invalid_argument("infeasible degree matrix: " + why);
  const int T = p.tasks, K = p.num_classes(), W = p.num_workers();

  std::vector<int> load(W, 0);
  std::vector<std::vector<int>> rows(T);
  std::vector<int> pool;
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      const int need = d.at(t, k);
      if (need == 0) continue;
      const int begin = p.class_begin(k), size = p.classes[k].size;
      pool.resize(size);
      std::iota(pool.begin(), pool.end(), begin);
      // Ties rotate with the task index. A fixed tie order can lock the
      // fill into disjoint worker blocks whenever d_tk divides the class
      // size (e.g. 6 into 30), splitting the answer graph into
      // disconnected components that spectral decoding cannot orient
      // against each other; the rotation staggers sweep starts so
      // consecutive tasks share workers. Load balance is unaffected:
      // least-loaded-first keeps the class load profile within +-1
      // regardless of tie order.
      const int rot = t % size;
      auto tie_key = [&](int w) { return (w - begin - rot + size) % size; };
      std::sort(pool.begin(), pool.end(), [&](int a, int b) {
        if (load[a] != load[b]) return load[a] < load[b];
        return tie_key(a) < tie_key(b);
      });
      for (int j = 0; j < need; ++j) {
        ++load[pool[j]];
        rows[t].push_back(pool[j]);
      }
    }
  }
  for (int w = 0; w < W; ++w) {
    if (load[w] > p.loads[w]) {
      std::ostringstream os;
      os << "worker " << w << " would carry " << load[w] << " tasks, limit "
         << p.loads[w];
      throw RealizationFailed(os.str());
    }
  }
  return finish(T, W, std::move(rows));
}

bool is_feasible(const Assignment& a, const Problem& p) {
  if (a.tasks != p.tasks || a.workers != p.num_workers()) return false;
  if (static_cast<int>(a.task_workers.size()) != a.tasks) return false;
  std::vector<int> load(a.workers, 0);
  long long total = 0;
  std::vector<int> sorted;
  for (const auto& row : a.task_workers) {
    sorted = row;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] < 0 || sorted[i] >= a.workers) return false;
      if (i > 0 && sorted[i] == sorted[i - 1]) return false;
      ++load[sorted[i]];
      ++total;
    }
  }
  for (int w = 0; w < a.workers; ++w)
    if (load[w] > p.loads[w]) return false;
  return total <= p.budget;
}

std::vector<std::uint32_t> enumerate_feasible_family(const Problem& p) {
  require_valid(p);
  const int T = p.tasks, W = p.num_workers();
  const int bits = T * W;
  if (bits > 20)
    throw std::invalid_argument("feasible-family enumeration is limited to 20 edges");

  std::vector<std::uint32_t> worker_mask(W, 0);
  for (int i = 0; i < bits; ++i) worker_mask[i % W] |= 1u << i;

  std::vector<std::uint32_t> family;
  for (std::uint32_t mask = 0; mask < (1u << bits); ++mask) {
    if (std::popcount(mask) > p.budget) continue;
    bool ok = true;
    for (int w = 0; w < W && ok; ++w)
      ok = std::popcount(mask & worker_mask[w]) <= p.loads[w];
    if (ok) family.push_back(mask);
  }
  return family;
}

}  // namespace crowdsim
