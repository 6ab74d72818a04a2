#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "asymhash/attacker.hpp"
#include "asymhash/corpus.hpp"

namespace asymhash {

struct PenaltyConstants {
  double cons1 = 2.0;
  double cons2 = 10.0;
  double cons3 = 2.0;
  double cons4 = 10.0;
};

// Stage-1 problem over q_2..q_m with betas and unit cost held fixed.
struct DistributionProblem {
  double v = 1.0;
  std::vector<double> betas{1.0};
  double c_max = 1.0;
  // C_max / unit_cost. Unset: the value that makes uniform q exactly tight,
  // i.e. the mean of beta_i^2.
  std::optional<double> alpha;
  PasswordDistribution dist;
  PenaltyConstants penalty;
  std::size_t budget = 2000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct DistributionResult {
  std::vector<double> q_star;
  double attacker_success = 1.0;
  double defender_utility = -1.0;
  bool feasible = false;
  std::size_t evaluations_used = 0;
  Certificate certificate = Certificate::kLocalOnly;
  // Exhaustive re-evaluation at q_star when the response is local_only and the
  // instance is small enough.
  std::optional<double> oracle_success;
  // Best penalized fitness after the initial population and each generation.
  std::vector<double> history;
};

double effective_alpha(const DistributionProblem& problem);

// Box upper bound min(1, (alpha-1)/(beta_i^2-1)) for each free variable.
std::vector<double> upper_bounds(const DistributionProblem& problem);

// Full q (q_1 first) for the given free variables; q_1 may be negative.
std::vector<double> expand_q(std::span<const double> free_vars);

bool is_feasible(const DistributionProblem& problem, std::span<const double> free_vars);

// Attacker success rate plus workload and probability penalties. Infeasible
// points score f = 1 before penalties.
double penalized_objective(const DistributionProblem& problem, std::span<const double> free_vars);

GameConfig config_for(const DistributionProblem& problem, std::span<const double> q);

// Seeded differential evolution (rand/1/bin). Throws InputError when the
// budget is smaller than the population.
DistributionResult optimize_distribution(const DistributionProblem& problem);

}  // namespace asymhash
