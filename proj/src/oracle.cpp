#include "asymhash/oracle.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "asymhash/errors.hpp"

namespace asymhash {

namespace {

constexpr double kTieTolerance = 1e-12;

struct Search {
  double v;
  std::vector<double> probs;
  std::vector<double> q;
  std::vector<double> round;  // round[j-1] = unit_cost * (beta_j^2 - beta_{j-1}^2)

  std::vector<int> taus;
  std::size_t instructions = 0;

  std::vector<int> best_taus;
  std::size_t best_instructions = 0;
  double best_value = 0.0;

  void consider(double value) {
    bool better = value > best_value + kTieTolerance;
    if (!better && std::abs(value - best_value) <= kTieTolerance) {
      better = instructions < best_instructions ||
               (instructions == best_instructions && taus < best_taus);
    }
    if (better) {
      best_value = value;
      best_taus = taus;
      best_instructions = instructions;
    }
  }

  // `lambda` and `cost` describe the instructions executed so far:
  // cost = sum_k c(pi_k) * (1 - lambda(pi, k-1)).
  void descend(double lambda, double cost) {
    consider(v * lambda - cost);
    const std::size_t next = taus.size();
    if (next == probs.size()) return;
    const int m = static_cast<int>(q.size());
    double l = lambda;
    double c = cost;
    taus.push_back(0);
    for (int tau = 1; tau <= m; ++tau) {
      c += round[tau - 1] * (1.0 - l);
      l += probs[next] * q[tau - 1];
      taus.back() = tau;
      instructions += static_cast<std::size_t>(tau);
      descend(l, c);
      instructions -= static_cast<std::size_t>(tau);
    }
    taus.pop_back();
  }
};

}  // namespace

BestResponse enumerate_optimal(const GameConfig& config, OracleLimits limits) {
  const auto& s = config.schedule;
  const std::size_t n_p = config.dist.size();
  if (n_p > limits.max_passwords || s.m() > limits.max_labels) {
    throw InputError("instance too large for exhaustive search (n_p=" + std::to_string(n_p) +
                     ", m=" + std::to_string(s.m()) + ")");
  }

  Search search;
  search.v = config.v;
  search.probs.assign(config.dist.probs().begin(), config.dist.probs().end());
  search.q.assign(s.q().begin(), s.q().end());
  double previous = 0.0;
  for (double beta : s.betas()) {
    const double sq = beta * beta;
    search.round.push_back(s.unit_cost() * (sq - previous));
    previous = sq;
  }
  search.descend(0.0, 0.0);

  BestResponse out;
  out.seq.taus = search.best_taus;
  out.utility = search.best_value;
  double lambda = 0.0;
  for (std::size_t i = 0; i < out.seq.taus.size(); ++i) {
    for (int j = 1; j <= out.seq.taus[i]; ++j) lambda += search.probs[i] * search.q[j - 1];
  }
  out.success_rate = lambda;
  out.certificate = Certificate::kGlobalExact;
  out.i_max = max_prefix_index(config).i_max;
  return out;
}

}  // namespace asymhash
