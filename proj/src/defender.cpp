#include "asymhash/defender.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "asymhash/errors.hpp"
#include "asymhash/oracle.hpp"

namespace asymhash {

namespace {

constexpr double kFeasibilityTolerance = 1e-12;
constexpr double kDifferentialWeight = 0.7;
constexpr double kCrossover = 0.9;

double workload_sum(const DistributionProblem& problem, std::span<const double> free_vars) {
  double total = 0.0;
  for (std::size_t i = 0; i < free_vars.size(); ++i) {
    const double beta = problem.betas[i + 1];
    total += (beta * beta - 1.0) * free_vars[i];
  }
  return total;
}

double mass_sum(std::span<const double> free_vars) {
  double total = 0.0;
  for (double x : free_vars) total += x;
  return total;
}

ScheduleFamily detect_family(std::span<const double> betas) {
  bool cost_even = true;
  bool time_even = true;
  for (std::size_t j = 0; j < betas.size(); ++j) {
    const double label = static_cast<double>(j + 1);
    cost_even = cost_even && std::abs(betas[j] - std::sqrt(label)) <= 1e-12;
    time_even = time_even && std::abs(betas[j] - label) <= 1e-12;
  }
  if (cost_even) return ScheduleFamily::kCostEven;
  if (time_even) return ScheduleFamily::kTimeEven;
  return ScheduleFamily::kCustom;
}

void check_problem(const DistributionProblem& problem) {
  if (problem.betas.empty()) throw InputError("at least one breakpoint is required");
  if (problem.betas.front() != 1.0) throw InputError("betas must start at 1");
  for (std::size_t j = 1; j < problem.betas.size(); ++j) {
    if (!(problem.betas[j] > problem.betas[j - 1])) {
      throw InputError("betas must be strictly increasing");
    }
  }
  if (!(problem.c_max > 0.0)) throw InputError("workload ceiling must be positive");
  if (!(problem.v >= 0.0) || !std::isfinite(problem.v)) {
    throw InputError("password value must be finite and non-negative");
  }
  const auto& p = problem.penalty;
  if (!(p.cons1 > 1.0 && p.cons2 > 1.0 && p.cons3 > 1.0 && p.cons4 > 1.0)) {
    throw InputError("penalty constants must exceed 1");
  }
  if (!(effective_alpha(problem) >= 1.0)) throw InputError("alpha must be at least 1");
}

struct Evaluated {
  std::vector<double> x;
  double fitness = 0.0;
  bool feasible = false;
};

void evaluate_all(const DistributionProblem& problem, std::vector<Evaluated>& batch) {
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < batch.size(); i += stride) {
      batch[i].fitness = penalized_objective(problem, batch[i].x);
      batch[i].feasible = is_feasible(problem, batch[i].x);
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(problem.workers, batch.size()));
  if (workers == 1) {
    run(0, 1);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
}

}  // namespace

double effective_alpha(const DistributionProblem& problem) {
  if (problem.alpha) return *problem.alpha;
  double total = 0.0;
  for (double beta : problem.betas) total += beta * beta;
  return total / static_cast<double>(problem.betas.size());
}

std::vector<double> upper_bounds(const DistributionProblem& problem) {
  const double alpha = effective_alpha(problem);
  std::vector<double> out;
  for (std::size_t j = 1; j < problem.betas.size(); ++j) {
    const double beta = problem.betas[j];
    out.push_back(std::min(1.0, (alpha - 1.0) / (beta * beta - 1.0)));
  }
  return out;
}

std::vector<double> expand_q(std::span<const double> free_vars) {
  std::vector<double> q{1.0 - mass_sum(free_vars)};
  q.insert(q.end(), free_vars.begin(), free_vars.end());
  return q;
}

bool is_feasible(const DistributionProblem& problem, std::span<const double> free_vars) {
  for (double x : free_vars) {
    if (x < 0.0) return false;
  }
  return workload_sum(problem, free_vars) <= effective_alpha(problem) - 1.0 + kFeasibilityTolerance &&
         mass_sum(free_vars) <= 1.0 + kFeasibilityTolerance;
}

GameConfig config_for(const DistributionProblem& problem, std::span<const double> q) {
  std::vector<double> probs(q.begin(), q.end());
  if (!probs.empty() && probs.front() < 0.0 && probs.front() >= -kFeasibilityTolerance) {
    probs.front() = 0.0;
  }
  const int m = static_cast<int>(problem.betas.size());
  ScheduleOptions options{.family = detect_family(problem.betas),
                          .m = m,
                          .q = std::move(probs),
                          .c_max = problem.c_max,
                          .alpha = effective_alpha(problem)};
  if (options.family == ScheduleFamily::kCustom) options.betas = problem.betas;
  return GameConfig{problem.v, make_schedule(options), problem.dist};
}

double penalized_objective(const DistributionProblem& problem, std::span<const double> free_vars) {
  const auto& c = problem.penalty;
  const double alpha = effective_alpha(problem);
  const double work = workload_sum(problem, free_vars);
  const double mass = mass_sum(free_vars);

  double penalty1 = 0.0;
  if (work > alpha - 1.0 + kFeasibilityTolerance) penalty1 = c.cons1 + c.cons2 * work;
  double penalty2 = 0.0;
  if (mass > 1.0 + kFeasibilityTolerance) penalty2 = c.cons3 + c.cons4 * mass;

  double f = 1.0;
  if (is_feasible(problem, free_vars)) {
    f = best_response(config_for(problem, expand_q(free_vars))).success_rate;
  }
  return f + penalty1 + penalty2;
}

DistributionResult optimize_distribution(const DistributionProblem& problem) {
  check_problem(problem);
  const std::size_t dim = problem.betas.size() - 1;
  DistributionResult out;

  auto finish = [&](std::vector<double> q, bool feasible) {
    const auto config = config_for(problem, q);
    const auto response = best_response(config);
    out.q_star = std::move(q);
    out.attacker_success = response.success_rate;
    out.defender_utility = -response.success_rate;
    out.certificate = response.certificate;
    out.feasible = feasible;
    const OracleLimits limits;
    if (response.certificate == Certificate::kLocalOnly &&
        config.dist.size() <= limits.max_passwords &&
        config.schedule.m() <= static_cast<int>(limits.max_labels)) {
      out.oracle_success = enumerate_optimal(config, limits).success_rate;
    }
  };

  if (dim == 0) {
    if (problem.budget < 1) throw InputError("optimizer budget must be at least 1");
    out.evaluations_used = 1;
    out.history.push_back(penalized_objective(problem, {}));
    finish({1.0}, true);
    return out;
  }

  const std::size_t population = 8 * dim;
  if (problem.budget < population) {
    throw InputError("optimizer budget " + std::to_string(problem.budget) +
                     " is smaller than the population size " + std::to_string(population));
  }

  const auto upper = upper_bounds(problem);
  std::mt19937_64 rng(problem.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Evaluated> pop(population);
  pop[0].x.assign(dim, 1.0 / static_cast<double>(dim + 1));
  for (std::size_t i = 1; i < population; ++i) {
    pop[i].x.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) pop[i].x[d] = unit(rng) * upper[d];
  }
  evaluate_all(problem, pop);
  std::size_t evaluations = population;

  std::optional<Evaluated> best_feasible;
  const Evaluated* best_any = &pop[0];
  auto track = [&](const Evaluated& e) {
    if (e.feasible && (!best_feasible || e.fitness < best_feasible->fitness)) best_feasible = e;
  };
  for (const auto& e : pop) track(e);

  auto population_best = [&] {
    double b = pop[0].fitness;
    for (const auto& e : pop) b = std::min(b, e.fitness);
    return b;
  };
  out.history.push_back(population_best());

  std::uniform_int_distribution<std::size_t> pick(0, population - 1);
  std::uniform_int_distribution<std::size_t> pick_dim(0, dim - 1);
  while (evaluations < problem.budget) {
    const std::size_t count = std::min(population, problem.budget - evaluations);
    std::vector<Evaluated> trials(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const std::size_t forced = pick_dim(rng);
      trials[i].x = pop[i].x;
      for (std::size_t d = 0; d < dim; ++d) {
        if (d == forced || unit(rng) < kCrossover) {
          const double mutant = pop[r1].x[d] + kDifferentialWeight * (pop[r2].x[d] - pop[r3].x[d]);
          trials[i].x[d] = std::clamp(mutant, 0.0, upper[d]);
        }
      }
    }
    evaluate_all(problem, trials);
    evaluations += count;
    for (std::size_t i = 0; i < count; ++i) {
      track(trials[i]);
      if (trials[i].fitness <= pop[i].fitness) pop[i] = std::move(trials[i]);
    }
    out.history.push_back(population_best());
  }

  for (const auto& e : pop) {
    if (e.fitness < best_any->fitness) best_any = &e;
  }
  out.evaluations_used = evaluations;
  if (best_feasible) {
    finish(expand_q(best_feasible->x), true);
  } else {
    out.q_star = expand_q(best_any->x);
    out.attacker_success = 1.0;
    out.defender_utility = -1.0;
    out.feasible = false;
  }
  return out;
}

}  // namespace asymhash
