// Acceptance gates for the simulator as shipped: end-to-end Monte Carlo
// behavior on the bundled scenarios plus the numerical property suites.
// Each criterion prints exactly one [PASS]/[FAIL] line with the measured
// values and the pinned thresholds, so a log diff shows what moved.
//
// Criteria 1 and 4 encode strict external targets. The first clause of each
// is known to miss for the decision rules this project pins down: the exact
// MAP error floor at beta=4 on scenario s1 is 0.028 (above the 0.02 target),
// and on scenario s3 the pinned power iteration keeps a tiny oriented
// component on the weaker diagonal block, so low-rank decoding beats majority
// voting instead of collapsing to coin flips on that block. Both clauses are
// kept failing rather than loosened; the measurements are the record.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "crowdsim/objectives.hpp"
#include "crowdsim/simulate.hpp"
#include "crowdsim/verify.hpp"

namespace {

using namespace crowdsim;

// Pinned thresholds. Edit history on this block is the audit trail for any
// loosening, so keep every tolerance here and nowhere else.
constexpr int kHeavyTrials = 5000;     // criteria 1 and 2
constexpr int kStandardTrials = 2000;  // criteria 3, 4, 5
constexpr double kSigmas = 3.0;        // separation required of one-sided gaps
constexpr double kC1MapBeta4Max = 0.02;
constexpr double kC1MajorityBeta20Min = 0.008;
constexpr double kC1MajorityOverMapMin = 5.0;
constexpr double kC1WallSecondsMax = 300.0;
constexpr double kC2LraOverMapMax = 3.0;
constexpr double kC3MapFlatFactorMax = 2.0;
constexpr double kC4BlockBetaMax = 16.0;  // block structure must hold through here

struct CriterionResult {
  bool pass = true;
  std::string detail;
};

__attribute__((format(printf, 2, 3))) void appendf(std::string* s, const char* fmt,
                                                   ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  *s += buf;
}

const char* tag(bool ok) { return ok ? "ok" : "FAIL"; }

[[noreturn]] void die(const std::string& msg) {
  std::fprintf(stderr, "acceptance: internal error: %s\n", msg.c_str());
  std::exit(2);
}

const SweepRecord& find_record(const std::vector<SweepRecord>& rs,
                               const char* scheme, double beta, double x) {
  for (const SweepRecord& r : rs)
    if (r.scheme == scheme && std::fabs(r.beta - beta) < 1e-9 &&
        std::fabs(r.x - x) < 1e-9)
      return r;
  die(std::string("no record for ") + scheme);
}

double combined_sigma(const SweepRecord& a, const SweepRecord& b) {
  return std::hypot(a.stderr_nominal, b.stderr_nominal);
}

// Exact decoding headroom on s1: MAP on the greedy allocation must crush the
// error at beta=4, majority voting on the uniform graph must stay visibly
// lossy at beta=20, and the gap between the two at beta=4 must be wide.
CriterionResult criterion_1() {
  Scenario s = scenario_preset("s1");
  s.schemes = {SchemeKind::MajorityUniform, SchemeKind::MapGreedy};
  s.sweep = SweepVariable::Beta;
  s.sweep_values = {4.0, 20.0};
  s.fixed_x = 0.0;
  s.trials = kHeavyTrials;

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SweepRecord> rs = monte_carlo(s);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const SweepRecord& map4 = find_record(rs, "map_greedy", 4.0, 0.0);
  const SweepRecord& maj4 = find_record(rs, "majority_uniform", 4.0, 0.0);
  const SweepRecord& maj20 = find_record(rs, "majority_uniform", 20.0, 0.0);

  const bool a = map4.pe <= kC1MapBeta4Max;
  const bool b = maj20.pe >= kC1MajorityBeta20Min;
  const double ratio = maj4.pe / map4.pe;
  const bool c = ratio >= kC1MajorityOverMapMin;
  const bool d = wall < kC1WallSecondsMax;

  CriterionResult r;
  r.pass = a && b && c && d;
  appendf(&r.detail,
          "map_greedy@beta=4 pe=%.3e (need <= %.2e) [%s]; "
          "majority_uniform@beta=20 pe=%.3e (need >= %.2e) [%s]; "
          "majority/map@beta=4 = %.2f (need >= %.1f) [%s]; "
          "wall=%.1fs (need < %.0fs) [%s]",
          map4.pe, kC1MapBeta4Max, tag(a), maj20.pe, kC1MajorityBeta20Min, tag(b),
          ratio, kC1MajorityOverMapMin, tag(c), wall, kC1WallSecondsMax, tag(d));
  return r;
}

// Low-rank decoding must track MAP within a constant factor on s1 when the
// population matches the class averages exactly.
CriterionResult criterion_2() {
  Scenario s = scenario_preset("s1");
  s.schemes = {SchemeKind::LraGreedy, SchemeKind::MapGreedy};
  s.sweep = SweepVariable::Beta;
  s.sweep_values = {4.0, 10.0};
  s.fixed_x = 0.0;
  s.trials = kHeavyTrials;
  const std::vector<SweepRecord> rs = monte_carlo(s);

  CriterionResult r;
  for (double beta : s.sweep_values) {
    const SweepRecord& lra = find_record(rs, "lra_greedy", beta, 0.0);
    const SweepRecord& map = find_record(rs, "map_greedy", beta, 0.0);
    const double ratio = lra.pe / map.pe;
    const bool ok = ratio <= kC2LraOverMapMax;
    r.pass = r.pass && ok;
    if (!r.detail.empty()) r.detail += "; ";
    appendf(&r.detail, "beta=%g lra/map = %.3e/%.3e = %.2f (need <= %.1f) [%s]",
            beta, lra.pe, map.pe, ratio, kC2LraOverMapMax, tag(ok));
  }
  return r;
}

// Dispersion robustness on s1 at beta=10: with fully spread worker quality
// (x=1) the low-rank decoder, which weights individual workers, must beat
// MAP, which only knows class averages, by a clear margin; and MAP itself
// must stay nearly flat across x because class mixtures are unchanged.
CriterionResult criterion_3() {
  Scenario s = scenario_preset("s1");
  s.schemes = {SchemeKind::LraGreedy, SchemeKind::MapGreedy};
  s.sweep = SweepVariable::X;
  s.sweep_values = {0.0, 0.5, 1.0};
  s.fixed_beta = 10.0;
  s.trials = kStandardTrials;
  const std::vector<SweepRecord> rs = monte_carlo(s);

  const SweepRecord& lra1 = find_record(rs, "lra_greedy", 10.0, 1.0);
  const SweepRecord& map1 = find_record(rs, "map_greedy", 10.0, 1.0);
  const double gap = map1.pe - lra1.pe;
  const double sigma = combined_sigma(map1, lra1);
  const bool a = gap >= kSigmas * sigma;

  double lo = 1.0, hi = 0.0;
  for (double x : s.sweep_values) {
    const double pe = find_record(rs, "map_greedy", 10.0, x).pe;
    lo = std::min(lo, pe);
    hi = std::max(hi, pe);
  }
  const double flat = hi / lo;
  const bool b = flat <= kC3MapFlatFactorMax;

  CriterionResult r;
  r.pass = a && b;
  appendf(&r.detail,
          "x=1: map-lra gap = %.3e-%.3e = %.3e (need >= %.1f sigma = %.3e) [%s]; "
          "map spread across x = %.3e/%.3e = %.2f (need <= %.1f) [%s]",
          map1.pe, lra1.pe, gap, kSigmas, kSigmas * sigma, tag(a), hi, lo, flat,
          kC3MapFlatFactorMax, tag(b));
  return r;
}

// s3 stresses the low-rank decoder with a two-block allocation. The target
// says block structure should make it lose to majority voting; it must also
// confirm the greedy allocation really is block diagonal up to beta=16.
CriterionResult criterion_4() {
  Scenario s = scenario_preset("s3");
  s.schemes = {SchemeKind::MajorityUniform, SchemeKind::LraGreedy};
  s.sweep = SweepVariable::Beta;
  s.sweep_values = {10.0};
  s.fixed_x = 0.0;
  s.trials = kStandardTrials;
  const std::vector<SweepRecord> rs = monte_carlo(s);

  const SweepRecord& lra = find_record(rs, "lra_greedy", 10.0, 0.0);
  const SweepRecord& maj = find_record(rs, "majority_uniform", 10.0, 0.0);
  const double gap = lra.pe - maj.pe;
  const double sigma = combined_sigma(lra, maj);
  const bool a = gap >= kSigmas * sigma;

  // Block diagnostic: first-group tasks draw only on class 0, second-group
  // tasks only on class 2, class 1 stays idle for every beta through 16.
  Scenario diag = scenario_preset("s3");
  diag.schemes = {SchemeKind::MapGreedy};
  diag.sweep = SweepVariable::Beta;
  diag.sweep_values.clear();
  for (double beta = 2.0; beta <= kC4BlockBetaMax; beta += 2.0)
    diag.sweep_values.push_back(beta);
  const int group1 = diag.groups[0].count;
  bool b = true;
  double first_broken_beta = 0.0;
  for (int i = 0; i < static_cast<int>(diag.sweep_values.size()); ++i) {
    const PointPlan plan = plan_point(diag, i);
    const DegreeMatrix& d = plan.greedy_degrees;
    bool block = d.class_total(1) == 0;
    for (int t = 0; t < plan.problem.tasks && block; ++t) {
      if (t < group1)
        block = d.at(t, 1) == 0 && d.at(t, 2) == 0;
      else
        block = d.at(t, 0) == 0 && d.at(t, 1) == 0;
    }
    if (!block && b) first_broken_beta = plan.beta;
    b = b && block;
  }

  CriterionResult r;
  r.pass = a && b;
  appendf(&r.detail,
          "beta=10: lra-majority gap = %.3e-%.3e = %+.3e (need >= %.1f sigma = "
          "%.3e, lra flag rate %.2f) [%s]; ",
          lra.pe, maj.pe, gap, kSigmas, kSigmas * sigma, lra.tie_flag_rate, tag(a));
  if (b)
    appendf(&r.detail, "allocation block-diagonal for beta=2..%.0f [ok]",
            kC4BlockBetaMax);
  else
    appendf(&r.detail, "allocation loses block structure at beta=%g [FAIL]",
            first_broken_beta);
  return r;
}

// The Monte Carlo loop and the analytic objective must agree: measured MAP
// error on the greedy allocation matches -P1 within 3 nominal standard
// errors at every integer beta from 2 to 20.
CriterionResult criterion_5() {
  Scenario s = scenario_preset("s1");
  s.schemes = {SchemeKind::MapGreedy};
  s.sweep = SweepVariable::Beta;
  s.sweep_values.clear();
  for (int beta = 2; beta <= 20; ++beta) s.sweep_values.push_back(beta);
  s.fixed_x = 0.0;
  s.trials = kStandardTrials;
  const std::vector<SweepRecord> rs = monte_carlo(s);

  CriterionResult r;
  int within = 0;
  double worst_dev = -1.0, worst_beta = 0.0, worst_sigma = 0.0;
  std::string failures;
  const long long decisions =
      static_cast<long long>(s.trials) * scenario_preset("s1").task_count();
  for (int i = 0; i < static_cast<int>(s.sweep_values.size()); ++i) {
    const PointPlan plan = plan_point(s, i);
    const double analytic = -evaluate_objective(ObjectiveKind::P1AvgError,
                                                plan.greedy_degrees, plan.problem,
                                                s.chernoff);
    const SweepRecord& rec = find_record(rs, "map_greedy", plan.beta, 0.0);
    // Nominal sigma from the measured rate, with the analytic rate as a floor
    // so a zero-error sample at tiny pe cannot make the window collapse.
    const double sigma =
        std::max(rec.stderr_nominal,
                 std::sqrt(analytic * (1.0 - analytic) / decisions));
    const double dev = std::fabs(rec.pe - analytic);
    const bool ok = dev <= kSigmas * sigma;
    if (ok) ++within;
    if (sigma > 0 && dev / sigma > worst_dev) {
      worst_dev = dev / sigma;
      worst_beta = plan.beta;
      worst_sigma = sigma;
    }
    if (!ok) {
      if (!failures.empty()) failures += ",";
      appendf(&failures, " beta=%g dev=%.2e (%.1f sigma)", plan.beta, dev,
              sigma > 0 ? dev / sigma : 0.0);
    }
    r.pass = r.pass && ok;
  }
  appendf(&r.detail,
          "%d/%zu betas match analytic -P1 within %.0f sigma (worst beta=%g: "
          "%.2f sigma, sigma=%.2e)",
          within, s.sweep_values.size(), kSigmas, worst_beta, worst_dev,
          worst_sigma);
  if (!failures.empty()) r.detail += "; out of band:" + failures;
  return r;
}

CriterionResult from_suites(const std::vector<std::string>& names) {
  CriterionResult r;
  for (const std::string& name : names) {
    const SuiteResult s = run_verification_suite(name);
    r.pass = r.pass && s.passed;
    if (!r.detail.empty()) r.detail += "; ";
    appendf(&r.detail, "%s: %d checks, %d failures [%s]", s.name.c_str(), s.checks,
            s.failures, tag(s.passed));
  }
  return r;
}

// 6: closed-form task measures vs direct pattern enumeration.
CriterionResult criterion_6() {
  return from_suites({"mi_vs_brute_force", "error_vs_brute_force"});
}
// 7: diminishing returns of the information objective.
CriterionResult criterion_7() { return from_suites({"mi_submodularity"}); }
// 8: the feasible family satisfies the matroid axioms.
CriterionResult criterion_8() { return from_suites({"matroid_family"}); }
// 9: greedy lands within half of the exhaustive optimum.
CriterionResult criterion_9() { return from_suites({"greedy_half_guarantee"}); }
// 10: the power iteration agrees with a dense eigensolver.
CriterionResult criterion_10() {
  return from_suites({"power_iteration_vs_jacobi"});
}

CriterionResult run_criterion(int id) {
  switch (id) {
    case 1: return criterion_1();
    case 2: return criterion_2();
    case 3: return criterion_3();
    case 4: return criterion_4();
    case 5: return criterion_5();
    case 6: return criterion_6();
    case 7: return criterion_7();
    case 8: return criterion_8();
    case 9: return criterion_9();
    case 10: return criterion_10();
    default: die("criterion id out of range");
  }
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;  // 0 = all
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > 10) {
        std::fprintf(stderr, "acceptance: --criterion takes 1..10\n");
        return 2;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }

  bool all_pass = true;
  for (int id = 1; id <= 10; ++id) {
    if (only != 0 && id != only) continue;
    const CriterionResult r = run_criterion(id);
    std::printf("[%s] criterion %d: %s\n", r.pass ? "PASS" : "FAIL", id,
                r.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}
