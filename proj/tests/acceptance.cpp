// Acceptance gate: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asymhash/attacker.hpp"
#include "asymhash/authsim.hpp"
#include "asymhash/defender.hpp"
#include "asymhash/oracle.hpp"
#include "asymhash/report.hpp"
#include "instances.hpp"

namespace {

using namespace asymhash;
namespace t = asymhash::testing;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Instance {
  GameConfig config;
  BestResponse oracle;
};

// n_p <= 8, m in {2, 3}, v log-uniform on [0.1, 100], cost-even uniform.
const std::vector<Instance>& random_family() {
  static const std::vector<Instance> family = [] {
    std::mt19937_64 rng(20240601);
    std::vector<Instance> out;
    for (int i = 0; i < 200; ++i) {
      const auto dist = to_distribution(t::random_corpus(rng, 8));
      const int m = 2 + static_cast<int>(rng() % 2);
      auto config = t::cost_even_uniform(t::log_uniform(rng, 0.1, 100.0), m, dist);
      auto oracle = enumerate_optimal(config);
      out.push_back({std::move(config), std::move(oracle)});
    }
    return out;
  }();
  return family;
}

const EquivalenceSets& zipf_corpus() {
  static const EquivalenceSets corpus = gen_zipf(1000, 1.0, 100000, 7);
  return corpus;
}

std::vector<double> zipf_grid() { return log_grid(1.0, 1e7, 30); }

Outcome contrived_regression() {
  const auto dist = PasswordDistribution::from_probabilities({0.5, 0.5});
  const double det = deterministic_best_response(1.45, 1.0, dist).success_rate;
  const GameConfig config{1.45, make_schedule({.family = ScheduleFamily::kTimeEven, .m = 2}), dist};
  const auto r = enumerate_optimal(config);
  const bool ok = det == 0.0 && r.seq == CheckingSequence{{1, 1}} &&
                  std::abs(r.utility - 0.025) <= 1e-9 && std::abs(r.success_rate - 0.5) <= 1e-9;
  return {ok, fmt("baseline=%.17g tau=%s U=%.17g lambda=%.17g", det, to_string(r.seq).c_str(),
                  r.utility, r.success_rate)};
}

Outcome concat_exact_for_uniform_cost_even() {
  int bad = 0;
  std::string first;
  for (const auto& inst : random_family()) {
    const auto loc = extend_by_concat(inst.config, {});
    const double u = utility(inst.config, loc);
    if (std::abs(u - inst.oracle.utility) > 1e-9) {
      if (bad++ == 0) {
        first = fmt("first: n_p=%zu m=%d v=%.6g concat=%s U=%.6g oracle=%s U=%.6g",
                    inst.config.dist.size(), inst.config.schedule.m(), inst.config.v,
                    to_string(loc).c_str(), u, to_string(inst.oracle.seq).c_str(),
                    inst.oracle.utility);
      }
    }
  }
  return {bad == 0, fmt("%d/%zu mismatches", bad, random_family().size()) + (bad ? "; " + first : "")};
}

Outcome dominance() {
  int checks = 0;
  int bad = 0;
  for (const auto& inst : random_family()) {
    const double det = deterministic_best_response(inst.config.v, 1.0, inst.config.dist).success_rate;
    ++checks;
    if (best_response(inst.config).success_rate > det + 1e-12) ++bad;
  }
  const auto dist = to_distribution(zipf_corpus());
  for (double ratio : zipf_grid()) {
    const double det = deterministic_best_response(ratio, 1.0, dist).success_rate;
    for (int m : {2, 3, 7}) {
      ++checks;
      if (best_response(t::cost_even_uniform(ratio, m, dist)).success_rate > det + 1e-12) ++bad;
    }
  }
  return {bad == 0, fmt("%d/%d comparisons exceed the deterministic rate", bad, checks)};
}

Outcome subset_chain() {
  int bad = 0;
  for (const auto& inst : random_family()) {
    const auto loc = extend_by_concat(inst.config, {});
    const auto lo = extend(inst.config);
    if (!is_subset(loc, lo) || !is_subset(lo, inst.oracle.seq)) ++bad;
  }
  return {bad == 0, fmt("%d/%zu chain violations", bad, random_family().size())};
}

// Cost-even instances collected by later criteria for the peak check.
std::vector<Instance> cost_even_pool;

Outcome optimality_test_soundness() {
  std::mt19937_64 rng(20240602);
  int passes = 0, false_pass = 0, fail_but_optimal = 0;
  for (int i = 0; i < 500; ++i) {
    const auto dist = to_distribution(t::random_corpus(rng, 6));
    const int m = 1 + static_cast<int>(rng() % 3);
    const int family = static_cast<int>(rng() % 3);
    ScheduleOptions o{.family = static_cast<ScheduleFamily>(family), .m = m, .q = t::random_q(rng, m)};
    if (o.family == ScheduleFamily::kCustom) o.betas = t::random_betas(rng, m);
    GameConfig config{t::log_uniform(rng, 0.1, 100.0), make_schedule(o), dist};
    auto oracle = enumerate_optimal(config);
    const auto lo = extend(config);
    const bool optimal = std::abs(utility(config, lo) - oracle.utility) <= 1e-9;
    if (optimality_test(config, lo).pass) {
      ++passes;
      if (!optimal) ++false_pass;
    } else if (optimal) {
      ++fail_but_optimal;
    }
    if (config.schedule.is_cost_even()) cost_even_pool.push_back({std::move(config), std::move(oracle)});
  }
  return {false_pass == 0 && fail_but_optimal > 0,
          fmt("PASS verdicts=%d wrong=%d; FAIL-but-optimal witnessed=%d", passes, false_pass,
              fail_but_optimal)};
}

Outcome find_good_exact() {
  std::mt19937_64 rng(20240603);
  int found = 0, bad = 0;
  while (found < 200) {
    const int m = 2 + static_cast<int>(rng() % 2);
    auto q = t::random_q(rng, m);
    if (find_peaks(q).size() != 2) continue;
    const auto dist = to_distribution(t::random_corpus(rng, 8));
    GameConfig config{t::log_uniform(rng, 0.1, 100.0),
                      make_schedule({.family = ScheduleFamily::kCostEven, .m = m, .q = std::move(q)}),
                      dist};
    auto oracle = enumerate_optimal(config);
    const auto fg = find_good(config, extend(config));
    if (std::abs(utility(config, fg) - oracle.utility) > 1e-9) ++bad;
    ++found;
    cost_even_pool.push_back({std::move(config), std::move(oracle)});
  }
  return {bad == 0, fmt("%d/%d mismatches", bad, found)};
}

Outcome peak_confinement() {
  int checked = 0, bad = 0;
  auto check = [&](const Instance& inst) {
    ++checked;
    const auto peaks = find_peaks(inst.config.schedule.q());
    for (int tau : inst.oracle.seq.taus) {
      if (std::find(peaks.begin(), peaks.end(), tau) == peaks.end()) {
        ++bad;
        return;
      }
    }
  };
  for (const auto& inst : random_family()) check(inst);
  for (const auto& inst : cost_even_pool) check(inst);
  return {bad == 0, fmt("%d/%d optima with a cap off the peaks", bad, checked)};
}

Outcome marginal_cost_identity() {
  std::mt19937_64 rng(20240604);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0, total = 0;
  double worst = 0.0;
  for (int m : {2, 3, 7}) {
    for (int i = 0; i < 100; ++i) {
      const double c_max = 0.5 + 4.5 * u(rng);
      const double lambda = u(rng);
      const double p = u(rng) * (1.0 - lambda);
      const auto dist = PasswordDistribution::from_probabilities({0.5});
      const GameConfig uniform{0.0, make_schedule({.family = ScheduleFamily::kCostEven, .m = m, .c_max = c_max}), dist};
      const GameConfig det{0.0, make_schedule({.family = ScheduleFamily::kCostEven, .m = 1, .c_max = c_max}), dist};
      // With v = 0 a concatenation marginal is minus the expected cost.
      const double diff = -concat_marginal(uniform, p, lambda, m) + concat_marginal(det, p, lambda, 1);
      const double expected = (m - 1.0) / (m + 1.0) * c_max * ((1.0 - lambda) - p);
      worst = std::max(worst, std::abs(diff - expected));
      ++total;
      if (std::abs(diff - expected) > 1e-9 || diff < -1e-12) ++bad;
    }
  }
  return {bad == 0, fmt("%d/%d violations, max error %.3g", bad, total, worst)};
}

Outcome diminishing_returns() {
  const auto dist = to_distribution(zipf_corpus());
  const auto grid = zipf_grid();
  int monotone_bad = 0, diminishing = 0;
  for (double ratio : grid) {
    double rate[4];
    const int ms[4] = {2, 3, 7, 15};
    for (int k = 0; k < 4; ++k) rate[k] = best_response(t::cost_even_uniform(ratio, ms[k], dist)).success_rate;
    if (rate[1] > rate[0] + 1e-12 || rate[2] > rate[1] + 1e-12) ++monotone_bad;
    if (rate[1] - rate[2] >= rate[2] - rate[3] - 1e-12) ++diminishing;
  }
  const double share = static_cast<double>(diminishing) / static_cast<double>(grid.size());
  return {monotone_bad == 0 && share >= 0.8,
          fmt("non-monotone points=%d; 3->7 >= 7->15 on %d/%zu points", monotone_bad, diminishing,
              grid.size())};
}

Outcome defender_optimizer() {
  struct Case {
    PasswordDistribution dist;
    int m;
    double v;
  };
  const auto contrived = PasswordDistribution::from_probabilities({0.5, 0.5});
  const auto zipf = to_distribution(gen_zipf(200, 1.0, 10000, 11));
  const std::vector<Case> cases{{contrived, 2, 1.45}, {contrived, 2, 3.0}, {contrived, 3, 1.45},
                                {zipf, 2, 50.0},      {zipf, 3, 500.0},  {zipf, 3, 5000.0}};
  int bad = 0;
  std::string detail;
  for (const auto& c : cases) {
    DistributionProblem p;
    p.v = c.v;
    p.betas.clear();
    for (int j = 1; j <= c.m; ++j) p.betas.push_back(std::sqrt(static_cast<double>(j)));
    p.dist = c.dist;
    p.budget = 2000;
    p.seed = 1;
    const auto r = optimize_distribution(p);
    const double uniform = best_response(config_for(p, uniform_q(c.m))).success_rate;
    if (!(r.attacker_success <= uniform + 1e-9)) ++bad;
    detail += fmt("[m=%d v=%g opt=%.6g uni=%.6g] ", c.m, c.v, r.attacker_success, uniform);
  }

  DistributionProblem p;
  p.v = 1.45;
  p.betas = {1.0, std::sqrt(2.0)};
  p.dist = contrived;
  p.budget = 2000;
  p.seed = 1;
  const auto r = optimize_distribution(p);
  double grid = 1.0;
  const double ub = upper_bounds(p)[0];
  for (int k = 0; k * 0.01 <= ub + 1e-12; ++k) {
    const std::vector<double> q{1.0 - k * 0.01, k * 0.01};
    grid = std::min(grid, best_response(config_for(p, q)).success_rate);
  }
  const bool grid_ok = std::abs(r.attacker_success - grid) <= 1e-6;
  return {bad == 0 && grid_ok,
          detail + fmt("grid=%.17g optimizer=%.17g", grid, r.attacker_success)};
}

Outcome authsim_workload() {
  auto schedule = std::make_shared<const BreakpointSchedule>(
      make_schedule({.family = ScheduleFamily::kCostEven, .m = 3}));
  std::mt19937_64 rng(20240605);
  const auto correct = measure_workload(schedule, 10000, 1.0, rng);
  // Costs 0.5, 1, 1.5 (times C_max) with equal weight: variance 1/6.
  const double sigma = std::sqrt(1.0 / 6.0) / std::sqrt(10000.0);
  const bool mean_ok = std::abs(correct.mean_correct - 1.0) <= 3.0 * sigma;
  const auto wrong = measure_workload(schedule, 10000, 0.0, rng);
  // Every rejection equals unit * beta_m^2 bit for bit; that value is 1.5 up
  // to the rounding of unit = C_max / sum(q beta^2).
  const bool exact = wrong.incorrect_exact && std::abs(schedule->cumulative_cost(3) - 1.5) <= 1e-12 &&
                     std::abs(wrong.mean_incorrect - 1.5) <= 1e-12;
  const bool asym = correct.mean_correct < wrong.mean_incorrect;
  return {mean_ok && exact && asym,
          fmt("mean correct=%.6f (3 sigma=%.6f) rejection=%.17g asymmetry=%s", correct.mean_correct,
              3.0 * sigma, wrong.mean_incorrect, asym ? "yes" : "no")};
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "asymhash_acceptance";
  fs::create_directories(dir);
  auto run = [&](const std::string& args, const std::string& out) {
    const std::string cmd = std::string(ASYMHASH_CLI) + " " + args + " --out " + (dir / out).string() +
                            " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  auto read = [&](const std::string& name) {
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string corpus = (dir / "zipf.es").string();
  const std::vector<std::string> commands{
      "sweep --corpus " + corpus + " --m 2,3,7 --v-grid 1:1e6:20 --seed 5",
      "sweep --corpus " + corpus + " --schedule time-even --m 2 --v-grid 1:1e6:10 --emit json --seed 5",
      "optimize --corpus " + corpus + " --m 3 --v 300 --budget 200 --seed 5",
      "authsim --m 3 --trials 2000 --correct-fraction 0.5 --seed 5",
  };
  bool ok = run("gen-synthetic --n-p 400 --n-a 20000 --seed 5", "zipf.es") &&
            run("gen-synthetic --n-p 400 --n-a 20000 --seed 5", "zipf2.es") &&
            read("zipf.es") == read("zipf2.es");
  int identical = ok ? 1 : 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const auto a = "a" + std::to_string(i);
    const auto b = "b" + std::to_string(i);
    const bool same = run(commands[i], a) && run(commands[i], b) && !read(a).empty() && read(a) == read(b);
    identical += same ? 1 : 0;
    ok = ok && same;
  }
  return {ok, fmt("%d/%zu invocation pairs byte-identical", identical, commands.size() + 1)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"contrived example regression", 1, contrived_regression},
      {"concat search exact for cost-even uniform", 30, concat_exact_for_uniform_cost_even},
      {"cost-even uniform never above deterministic", 120, dominance},
      {"subset chain concat <= local <= optimum", 0, subset_chain},
      {"optimality test soundness", 0, optimality_test_soundness},
      {"find_good exactness", 0, find_good_exact},
      {"peak confinement", 0, peak_confinement},
      {"marginal cost identity", 0, marginal_cost_identity},
      {"diminishing returns in m", 300, diminishing_returns},
      {"defender optimizer", 0, defender_optimizer},
      {"authsim workload", 10, authsim_workload},
      {"cli determinism", 0, cli_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += fmt(" (runtime %.2fs over %.0fs)", secs, c.limit_seconds);
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %s: %s [%.2fs] %s\n", i + 1, o.pass ? "PASS" : "FAIL", c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
