#include "asymhash/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asymhash/errors.hpp"

namespace asymhash {

const char* to_string(ScheduleFamily family) {
  switch (family) {
    case ScheduleFamily::kCostEven:
      return "cost-even";
    case ScheduleFamily::kTimeEven:
      return "time-even";
    case ScheduleFamily::kCustom:
      return "custom";
  }
  return "?";
}

std::vector<double> uniform_q(int m) { return std::vector<double>(m, 1.0 / m); }

BreakpointSchedule::BreakpointSchedule()
    : betas_{1.0}, q_{1.0}, q_prefix_{0.0, 1.0}, cumulative_{0.0, 1.0} {}

double BreakpointSchedule::expected_cost() const {
  double total = 0.0;
  for (int j = 1; j <= m(); ++j) total += q(j) * cumulative_cost(j);
  return total;
}

bool BreakpointSchedule::is_uniform() const {
  for (double qi : q_) {
    if (qi != q_.front()) return false;
  }
  return true;
}

bool BreakpointSchedule::is_cost_even() const {
  for (int j = 1; j <= m(); ++j) {
    if (std::abs(beta(j) - std::sqrt(static_cast<double>(j))) > 1e-12) return false;
  }
  return true;
}

BreakpointSchedule make_schedule(const ScheduleOptions& options) {
  const int m = options.m;
  if (m < 1) throw InputError("schedule needs at least one breakpoint");
  if (!(options.c_max > 0.0) || !std::isfinite(options.c_max)) {
    throw InputError("workload ceiling must be positive");
  }

  BreakpointSchedule s;
  s.family_ = options.family;
  s.c_max_ = options.c_max;
  s.betas_.assign(m, 0.0);
  switch (options.family) {
    case ScheduleFamily::kCostEven:
      for (int j = 1; j <= m; ++j) s.betas_[j - 1] = std::sqrt(static_cast<double>(j));
      break;
    case ScheduleFamily::kTimeEven:
      for (int j = 1; j <= m; ++j) s.betas_[j - 1] = j;
      break;
    case ScheduleFamily::kCustom:
      if (static_cast<int>(options.betas.size()) != m) {
        throw InputError("custom schedule needs exactly m betas");
      }
      if (options.betas.front() != 1.0) throw InputError("custom betas must start at 1");
      for (int j = 1; j < m; ++j) {
        if (!(options.betas[j] > options.betas[j - 1]) || !std::isfinite(options.betas[j])) {
          throw InputError("custom betas must be strictly increasing");
        }
      }
      s.betas_ = options.betas;
      break;
  }

  s.q_ = options.q.empty() ? uniform_q(m) : options.q;
  if (static_cast<int>(s.q_.size()) != m) throw InputError("q must have exactly m entries");
  double total = 0.0;
  for (double qi : s.q_) {
    if (!(qi >= 0.0 && qi <= 1.0)) throw InputError("q entries must lie in [0, 1]");
    total += qi;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("q must sum to 1");

  s.q_prefix_.assign(m + 1, 0.0);
  for (int j = 1; j <= m; ++j) s.q_prefix_[j] = s.q_prefix_[j - 1] + s.q_[j - 1];

  double weighted = 0.0;  // sum q_i beta_i^2
  for (int j = 1; j <= m; ++j) weighted += s.q_[j - 1] * s.betas_[j - 1] * s.betas_[j - 1];

  if (options.alpha) {
    if (!(*options.alpha > 0.0)) throw InputError("alpha must be positive");
    s.unit_cost_ = options.c_max / *options.alpha;
  } else {
    s.unit_cost_ = options.c_max / weighted;
  }

  s.cumulative_.assign(m + 1, 0.0);
  for (int j = 1; j <= m; ++j) {
    s.cumulative_[j] = s.unit_cost_ * s.betas_[j - 1] * s.betas_[j - 1];
  }
  if (s.expected_cost() > options.c_max + 1e-9) {
    throw InputError("expected verification cost exceeds the workload ceiling");
  }
  return s;
}

std::size_t CheckingSequence::instruction_count() const {
  std::size_t n = 0;
  for (int t : taus) n += static_cast<std::size_t>(t);
  return n;
}

std::string to_string(const CheckingSequence& seq) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < seq.taus.size(); ++i) {
    if (i) out << ',';
    out << seq.taus[i];
  }
  out << ')';
  return out.str();
}

bool is_subset(const CheckingSequence& inner, const CheckingSequence& outer) {
  if (inner.length() > outer.length()) return false;
  for (std::size_t i = 0; i < inner.length(); ++i) {
    if (inner.taus[i] > outer.taus[i]) return false;
  }
  return true;
}

void validate(const GameConfig& config, const CheckingSequence& seq) {
  if (seq.length() > config.dist.size()) {
    throw InputError("checking sequence covers more passwords than the corpus holds");
  }
  for (int t : seq.taus) {
    if (t < 1 || t > config.schedule.m()) {
      throw InputError("label index outside 1..m in checking sequence");
    }
  }
}

double success_rate(const GameConfig& config, const CheckingSequence& seq) {
  validate(config, seq);
  double lambda = 0.0;
  for (std::size_t i = 0; i < seq.length(); ++i) {
    lambda += config.dist.prob(i) * config.schedule.q_prefix(seq.taus[i]);
  }
  return std::min(lambda, 1.0);  // summation can overshoot by an ulp
}

double success_rate(const GameConfig& config, const CheckingSequence& seq, std::size_t budget) {
  validate(config, seq);
  if (budget > seq.instruction_count()) {
    throw InputError("instruction budget exceeds the checking sequence length");
  }
  double lambda = 0.0;
  std::size_t executed = 0;
  for (std::size_t i = 0; i < seq.length() && executed < budget; ++i) {
    for (int j = 1; j <= seq.taus[i] && executed < budget; ++j, ++executed) {
      lambda += config.dist.prob(i) * config.schedule.q(j);
    }
  }
  return lambda;
}

double utility(const GameConfig& config, const CheckingSequence& seq) {
  validate(config, seq);
  const auto& s = config.schedule;
  double lambda = 0.0;
  double cost = 0.0;
  for (std::size_t i = 0; i < seq.length(); ++i) {
    const double p = config.dist.prob(i);
    for (int j = 1; j <= seq.taus[i]; ++j) {
      cost += s.round_cost(j) * (1.0 - lambda);
      lambda += p * s.q(j);
    }
  }
  return config.v * lambda - cost;
}

namespace {

void check_compatible(const GameConfig& config, const CheckingSequence& base, const Bundle& b,
                      MarginalMode mode) {
  validate(config, base);
  const std::size_t ell = base.length();
  if (b.password < 1 || b.password > config.dist.size()) {
    throw InputError("bundle password rank outside the corpus");
  }
  if (b.first_label < 1 || b.last_label < b.first_label || b.last_label > config.schedule.m()) {
    throw InputError("bundle label range must satisfy 1 <= first <= last <= m");
  }
  const bool starts_new = b.password == ell + 1 && b.first_label == 1;
  const bool extends = b.password <= ell && b.first_label == base.tau(b.password) + 1;
  const bool ok = mode == MarginalMode::kConcat ? starts_new || (extends && b.password == ell)
                                                : starts_new || extends;
  if (!ok) throw InputError("bundle is incompatible with the base sequence");
}

}  // namespace

double marginal(const GameConfig& config, const CheckingSequence& base, const Bundle& bundle,
                MarginalMode mode) {
  if (bundle.empty()) return 0.0;
  check_compatible(config, base, bundle, mode);
  const auto& s = config.schedule;
  const std::size_t target = bundle.password - 1;

  // Mass covered before the first new instruction and cost of the base
  // instructions that follow the bundle in natural order.
  double before = 0.0;
  double future = 0.0;
  for (std::size_t i = 0; i < base.length(); ++i) {
    if (i <= target) {
      before += config.dist.prob(i) * s.q_prefix(base.taus[i]);
    } else {
      future += s.cumulative_cost(base.taus[i]);
    }
  }

  const double p = config.dist.prob(target);
  double delta = 0.0;
  for (int j = bundle.first_label; j <= bundle.last_label; ++j) {
    const double mass = p * s.q(j);
    delta += mass * (config.v + future) - (1.0 - before) * s.round_cost(j);
    before += mass;
  }
  return delta;
}

CheckingSequence include(const CheckingSequence& base, const Bundle& bundle) {
  if (bundle.empty()) return base;
  CheckingSequence out = base;
  if (bundle.password == base.length() + 1 && bundle.first_label == 1) {
    out.taus.push_back(bundle.last_label);
  } else if (bundle.password >= 1 && bundle.password <= base.length() &&
             bundle.first_label == base.tau(bundle.password) + 1) {
    out.taus[bundle.password - 1] = bundle.last_label;
  } else {
    throw InputError("bundle is incompatible with the base sequence");
  }
  return out;
}

double concat_marginal(const GameConfig& config, double prob, double lambda, int last_label) {
  const auto& s = config.schedule;
  double delta = 0.0;
  double covered = lambda;
  for (int j = 1; j <= last_label; ++j) {
    const double mass = prob * s.q(j);
    delta += mass * config.v - (1.0 - covered) * s.round_cost(j);
    covered += mass;
  }
  return delta;
}

std::vector<std::size_t> es_boundaries(const PasswordDistribution& dist) {
  auto b = dist.boundaries();
  return {b.begin(), b.end()};
}

}  // namespace asymhash
