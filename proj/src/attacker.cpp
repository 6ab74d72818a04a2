#include "asymhash/attacker.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "asymhash/errors.hpp"

namespace asymhash {

namespace {

void count(SearchStats* stats, std::size_t n = 1) {
  if (stats) stats->marginal_evaluations += n;
}

// Probability mass of the `count` most popular passwords.
double head_mass(const PasswordDistribution& dist, std::size_t count) {
  double mass = 0.0;
  for (std::size_t i = 0; i < count; ++i) mass += dist.prob(i);
  return mass;
}

// Best label cap for one password appended onto a base covering `lambda`;
// near-ties go to the larger cap. Returns (cap, marginal); cap 0 means skip.
std::pair<int, double> best_concat_cap(const GameConfig& config, double prob, double lambda,
                                       SearchStats* stats) {
  const auto& s = config.schedule;
  int best_cap = 0;
  double best = 0.0;
  double delta = 0.0;
  double covered = lambda;
  for (int j = 1; j <= s.m(); ++j) {
    const double mass = prob * s.q(j);
    delta += mass * config.v - (1.0 - covered) * s.round_cost(j);
    covered += mass;
    count(stats);
    if (delta >= best - kInclusionTolerance) {
      best_cap = j;
      best = std::max(best, delta);
    }
  }
  return {best_cap, best};
}

}  // namespace

const char* to_string(Certificate certificate) {
  switch (certificate) {
    case Certificate::kGlobalExact:
      return "global_exact";
    case Certificate::kGlobalCertified:
      return "global_certified";
    case Certificate::kLocalOnly:
      return "local_only";
  }
  return "?";
}

double prefix_profit_bound(const GameConfig& config, std::size_t password) {
  if (password < 1 || password > config.dist.size()) {
    throw InputError("password rank outside the corpus");
  }
  const double lambda = head_mass(config.dist, password - 1);
  const double p = config.dist.prob(password - 1);
  double best = concat_marginal(config, p, lambda, 1);
  for (int j = 2; j <= config.schedule.m(); ++j) {
    best = std::max(best, concat_marginal(config, p, lambda, j));
  }
  return best;
}

PrefixBound max_prefix_index(const GameConfig& config) {
  PrefixBound out;
  const auto& dist = config.dist;
  const auto bounds = dist.boundaries();
  out.f_values.reserve(bounds.size() - 1);
  double lambda = 0.0;  // mass of Pi(i-1, m)
  std::size_t next = 0;
  for (std::size_t k = 1; k < bounds.size(); ++k) {
    const std::size_t last = bounds[k];  // 1-based rank of the set's last password
    for (; next + 1 < last; ++next) lambda += dist.prob(next);
    const double p = dist.prob(last - 1);
    double f = -std::numeric_limits<double>::infinity();
    double delta = 0.0;
    double covered = lambda;
    for (int j = 1; j <= config.schedule.m(); ++j) {
      const double mass = p * config.schedule.q(j);
      delta += mass * config.v - (1.0 - covered) * config.schedule.round_cost(j);
      covered += mass;
      f = std::max(f, delta);
    }
    out.f_values.emplace_back(last, f);
    if (f >= -kInclusionTolerance) out.i_max = last;
  }
  return out;
}

CheckingSequence extend_by_concat(const GameConfig& config, const CheckingSequence& start,
                                  SearchStats* stats) {
  CheckingSequence seq = start;
  double lambda = success_rate(config, seq);
  const auto& dist = config.dist;
  for (std::size_t i = seq.length(); i < dist.size(); ++i) {
    const double p = dist.prob(i);
    const auto [cap, gain] = best_concat_cap(config, p, lambda, stats);
    if (cap == 0) break;
    seq.taus.push_back(cap);
    lambda += p * config.schedule.q_prefix(cap);
  }
  if (!dist.is_boundary(seq.length())) {
    const std::size_t cut = std::max(dist.boundary_at_or_below(seq.length()), start.length());
    if (cut < seq.length()) {
      seq.taus.resize(cut);
      if (stats) stats->truncated_to_boundary = true;
    }
  }
  return seq;
}

CheckingSequence extend_by_insert(const GameConfig& config, const CheckingSequence& start,
                                  SearchStats* stats) {
  validate(config, start);
  CheckingSequence seq = start;
  const auto& s = config.schedule;
  const int m = s.m();
  bool changed = true;
  while (changed) {
    changed = false;
    double total_cost = 0.0;
    for (int t : seq.taus) total_cost += s.cumulative_cost(t);
    double mass_before = 0.0;   // passwords 1..i-1
    double cost_through = 0.0;  // passwords 1..i
    for (std::size_t i = 0; i < seq.length(); ++i) {
      const double p = config.dist.prob(i);
      int& tau = seq.taus[i];
      while (tau < m) {
        const double future = total_cost - cost_through - s.cumulative_cost(tau);
        double covered = mass_before + p * s.q_prefix(tau);
        double delta = 0.0;
        int accepted = 0;
        for (int j = tau + 1; j <= m; ++j) {
          const double mass = p * s.q(j);
          delta += mass * (config.v + future) - (1.0 - covered) * s.round_cost(j);
          covered += mass;
          count(stats);
          if (delta >= -kInclusionTolerance) {
            accepted = j;
            break;
          }
        }
        if (accepted == 0) break;
        total_cost += s.cumulative_cost(accepted) - s.cumulative_cost(tau);
        tau = accepted;
        changed = true;
      }
      mass_before += p * s.q_prefix(tau);
      cost_through += s.cumulative_cost(tau);
    }
  }
  return seq;
}

CheckingSequence extend(const GameConfig& config, SearchStats* stats) {
  CheckingSequence seq = extend_by_concat(config, {}, stats);
  for (int pass = 1; pass <= kMaxExtendPasses; ++pass) {
    if (stats) stats->extend_passes = static_cast<std::size_t>(pass);
    CheckingSequence next = extend_by_concat(config, extend_by_insert(config, seq, stats), stats);
    if (next == seq) return seq;
    seq = std::move(next);
  }
  throw InvariantViolation("local search did not converge within the pass limit");
}

OptimalityVerdict optimality_test(const GameConfig& config, const CheckingSequence& local,
                                  SearchStats* stats) {
  validate(config, local);
  if (stats) stats->optimality_test_run = true;
  const auto& s = config.schedule;
  const int m = s.m();
  const std::size_t i_max = max_prefix_index(config).i_max;

  double total_cost = 0.0;
  for (int t : local.taus) total_cost += s.cumulative_cost(t);
  double checked_before = 0.0;    // checked mass of passwords 1..i-1
  double unchecked_before = 0.0;  // unchecked mass of passwords 1..i-1
  double cost_through = 0.0;
  OptimalityVerdict verdict;
  for (std::size_t rank = 1; rank <= i_max; ++rank) {
    const double p = config.dist.prob(rank - 1);
    const int tau = local.tau(rank);
    cost_through += s.cumulative_cost(tau);
    const double future = total_cost - cost_through;
    double covered = checked_before + p * s.q_prefix(tau);
    double delta = 0.0;
    for (int b = tau + 1; b <= m; ++b) {
      const double mass = p * s.q(b);
      delta += mass * (config.v + future) - (1.0 - covered) * s.round_cost(b);
      covered += mass;
      count(stats);
      const double bundle_cost = s.cumulative_cost(b) - s.cumulative_cost(tau);
      const double test = delta + unchecked_before * bundle_cost;
      if (test >= -kInclusionTolerance) {
        verdict.pass = false;
        verdict.witness = Bundle{rank, tau + 1, b};
        verdict.witness_test = test;
        if (stats) stats->optimality_test_passed = false;
        return verdict;
      }
    }
    checked_before += p * s.q_prefix(tau);
    unchecked_before += p * (1.0 - s.q_prefix(tau));
  }
  if (stats) stats->optimality_test_passed = true;
  return verdict;
}

std::vector<int> find_peaks(std::span<const double> q) {
  const int m = static_cast<int>(q.size());
  std::vector<int> peaks;
  for (int j = 1; j <= m; ++j) {
    const bool is_peak = j == m || (j == 1 && q[0] > q[1]) ||
                         (j > 1 && q[j - 2] <= q[j - 1] && q[j - 1] > q[j]);
    if (is_peak) peaks.push_back(j);
  }
  return peaks;
}

CheckingSequence find_good(const GameConfig& config, const CheckingSequence& local,
                           SearchStats* stats) {
  validate(config, local);
  const auto& s = config.schedule;
  const int m = s.m();
  if (!s.is_cost_even() || m > 3) {
    throw InputError("find_good needs cost-even breakpoints with m <= 3; use extend()");
  }
  const auto peaks = find_peaks(s.q());
  if (peaks.size() != 2) {
    throw InputError("find_good needs exactly two peaks");
  }
  if (stats) stats->find_good_run = true;
  const int low_peak = peaks.front();
  const auto& dist = config.dist;
  const std::size_t i_max = max_prefix_index(config).i_max;
  const double tail_q = 1.0 - s.q_prefix(low_peak);
  const double tail_cost = s.cumulative_cost(m) - s.cumulative_cost(low_peak);

  CheckingSequence base = local;
  double base_utility = utility(config, base);
  double base_lambda = success_rate(config, base);

  CheckingSequence best = local;
  double best_utility = base_utility;

  auto evaluate_length = [&] {
    const std::size_t n = base.length();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < n; ++i) {
      if (base.taus[i] == low_peak) candidates.push_back(i);
    }
    if (candidates.empty()) return;

    // Mass checked before, and cost checked after, each candidate's tail bundle.
    std::vector<double> before(candidates.size());
    std::vector<double> after(candidates.size());
    {
      double total_cost = 0.0;
      for (int t : base.taus) total_cost += s.cumulative_cost(t);
      double mass = 0.0;
      double cost = 0.0;
      std::size_t c = 0;
      for (std::size_t i = 0; i < n && c < candidates.size(); ++i) {
        mass += dist.prob(i) * s.q_prefix(base.taus[i]);
        cost += s.cumulative_cost(base.taus[i]);
        if (i == candidates[c]) {
          before[c] = mass;
          after[c] = total_cost - cost;
          ++c;
        }
      }
    }

    std::vector<bool> taken(candidates.size(), false);
    std::vector<std::size_t> order;
    double running = 0.0;
    double best_gain = 0.0;
    std::size_t best_count = 0;
    for (std::size_t step = 0; step < candidates.size(); ++step) {
      std::size_t pick = candidates.size();
      double pick_gain = 0.0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (taken[c]) continue;
        const double p = dist.prob(candidates[c]);
        double covered = before[c];
        double gain = 0.0;
        for (int j = low_peak + 1; j <= m; ++j) {
          const double mass = p * s.q(j);
          gain += mass * (config.v + after[c]) - (1.0 - covered) * s.round_cost(j);
          covered += mass;
        }
        count(stats);
        if (pick == candidates.size() || gain > pick_gain) {
          pick = c;
          pick_gain = gain;
        }
      }
      taken[pick] = true;
      order.push_back(candidates[pick]);
      const double p = dist.prob(candidates[pick]);
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (c < pick) after[c] += tail_cost;
        if (c > pick) before[c] += p * tail_q;
      }
      running += pick_gain;
      if (running >= best_gain) {
        best_gain = running;
        best_count = step + 1;
      }
    }
    const double total = base_utility + best_gain;
    if (total >= best_utility) {
      best_utility = total;
      best = base;
      for (std::size_t k = 0; k < best_count; ++k) best.taus[order[k]] = m;
    }
  };

  evaluate_length();
  const auto bounds = dist.boundaries();
  for (std::size_t k = 1; k < bounds.size() && bounds[k] <= i_max; ++k) {
    if (bounds[k] <= base.length()) continue;
    while (base.length() < bounds[k]) {
      const double p = dist.prob(base.length());
      base_utility += concat_marginal(config, p, base_lambda, low_peak);
      base_lambda += p * s.q_prefix(low_peak);
      base.taus.push_back(low_peak);
    }
    evaluate_length();
  }
  return best;
}

CheckingSequence best_full_check_prefix(const GameConfig& config) {
  const auto& dist = config.dist;
  const int m = config.schedule.m();
  const auto bounds = dist.boundaries();
  double lambda = 0.0;
  double value = 0.0;
  double best_value = 0.0;
  std::size_t best_len = 0;
  std::size_t i = 0;
  for (std::size_t k = 1; k < bounds.size(); ++k) {
    for (; i < bounds[k]; ++i) {
      const double p = dist.prob(i);
      value += concat_marginal(config, p, lambda, m);
      lambda += p;
    }
    if (value >= best_value - kInclusionTolerance) {
      best_value = std::max(best_value, value);
      best_len = bounds[k];
    }
  }
  return CheckingSequence{std::vector<int>(best_len, m)};
}

BestResponse make_response(const GameConfig& config, CheckingSequence seq,
                           Certificate certificate) {
  BestResponse out;
  out.utility = utility(config, seq);
  out.success_rate = success_rate(config, seq);
  out.seq = std::move(seq);
  out.certificate = certificate;
  out.i_max = max_prefix_index(config).i_max;
  return out;
}

BestResponse best_response(const GameConfig& config) {
  const auto& s = config.schedule;
  SearchStats stats;
  // Cost-even with nondecreasing q: an optimum is a full-check prefix ending on
  // a set boundary. The concatenation search alone can stop early when F dips
  // and recovers.
  if (s.is_cost_even() && find_peaks(s.q()).size() == 1) {
    auto out = make_response(config, best_full_check_prefix(config), Certificate::kGlobalExact);
    out.stats = stats;
    return out;
  }

  auto local = extend(config, &stats);
  const auto verdict = optimality_test(config, local, &stats);
  BestResponse out;
  if (verdict.pass) {
    out = make_response(config, std::move(local), Certificate::kGlobalCertified);
  } else if (s.is_cost_even() && s.m() <= 3 && find_peaks(s.q()).size() == 2) {
    // find_good only places caps on peaks and an optimum can sit between them
    // (q1 barely above q2). The optimality test cannot see that either, since
    // the better sequence drops instructions, so nothing here is certified.
    auto promoted = find_good(config, local, &stats);
    if (utility(config, promoted) < utility(config, local)) promoted = std::move(local);
    out = make_response(config, std::move(promoted), Certificate::kLocalOnly);
  } else {
    out = make_response(config, std::move(local), Certificate::kLocalOnly);
  }
  out.stats = stats;
  return out;
}

BestResponse deterministic_best_response(double v, double c_max,
                                         const PasswordDistribution& dist) {
  GameConfig config{v, make_schedule({.family = ScheduleFamily::kCostEven, .m = 1, .c_max = c_max}),
                    dist};
  return make_response(config, best_full_check_prefix(config), Certificate::kGlobalExact);
}

}  // namespace asymhash
