#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asymhash/corpus.hpp"

namespace asymhash {

// Tolerance used when deciding whether a marginal utility is "non-negative".
// Exact indifference is resolved toward checking.
inline constexpr double kInclusionTolerance = 1e-12;

enum class ScheduleFamily { kCostEven, kTimeEven, kCustom };

const char* to_string(ScheduleFamily family);

struct ScheduleOptions {
  ScheduleFamily family = ScheduleFamily::kCostEven;
  int m = 1;
  std::vector<double> q;      // empty means uniform
  double c_max = 1.0;
  std::vector<double> betas;  // custom family only; beta_1 must be 1
  // Unset: tight scaling, unit cost chosen so the expected verification cost
  // equals c_max. Set: unit cost = c_max / alpha.
  std::optional<double> alpha;
};

// Halting breakpoints t_i = beta_i * t_1 sampled with probability q_i. Costs
// follow the area-time model c_M * t^2; unit_cost is c_M * t_1^2.
class BreakpointSchedule {
 public:
  // Single breakpoint, unit cost 1: deterministic hashing.
  BreakpointSchedule();

  int m() const { return static_cast<int>(betas_.size()); }
  ScheduleFamily family() const { return family_; }
  std::span<const double> betas() const { return betas_; }
  std::span<const double> q() const { return q_; }
  double beta(int label) const { return betas_[label - 1]; }
  double q(int label) const { return q_[label - 1]; }
  double unit_cost() const { return unit_cost_; }
  double c_max() const { return c_max_; }
  double alpha() const { return c_max_ / unit_cost_; }

  // Sum of q_1..q_label; q_prefix(0) == 0.
  double q_prefix(int label) const { return q_prefix_[label]; }

  // Cost of computing labels 1..label: unit_cost * beta_label^2 (0 for label 0).
  double cumulative_cost(int label) const { return cumulative_[label]; }

  // Incremental cost of label `label`: unit_cost * (beta_l^2 - beta_{l-1}^2).
  double round_cost(int label) const { return cumulative_[label] - cumulative_[label - 1]; }

  // sum_i q_i * unit_cost * beta_i^2.
  double expected_cost() const;

  bool is_uniform() const;
  // beta_i == sqrt(i) for every label, regardless of the declared family.
  bool is_cost_even() const;

 private:
  friend BreakpointSchedule make_schedule(const ScheduleOptions& options);

  ScheduleFamily family_ = ScheduleFamily::kCostEven;
  std::vector<double> betas_;
  std::vector<double> q_;
  std::vector<double> q_prefix_;
  std::vector<double> cumulative_;
  double unit_cost_ = 1.0;
  double c_max_ = 1.0;
};

// Throws InputError for q not summing to 1, non-increasing custom betas, or a
// unit cost that violates the workload ceiling.
BreakpointSchedule make_schedule(const ScheduleOptions& options);

std::vector<double> uniform_q(int m);

struct GameConfig {
  double v = 0.0;
  BreakpointSchedule schedule;
  PasswordDistribution dist;
};

// The attacker's plan: passwords are tried in probability order and password
// i has labels 1..taus[i-1] computed. Instructions are ordered naturally
// (password first, then label), so the legit restrictions hold by
// construction.
struct CheckingSequence {
  std::vector<int> taus;

  std::size_t length() const { return taus.size(); }
  std::size_t instruction_count() const;
  bool empty() const { return taus.empty(); }
  // tau for 1-based password rank, 0 when the password is not checked.
  int tau(std::size_t password) const {
    return password <= taus.size() ? taus[password - 1] : 0;
  }

  friend bool operator==(const CheckingSequence&, const CheckingSequence&) = default;
};

std::string to_string(const CheckingSequence& seq);

// Instruction-set inclusion: every (password, label) in `inner` is in `outer`.
bool is_subset(const CheckingSequence& inner, const CheckingSequence& outer);

// Throws InputError unless every tau lies in 1..m and length <= n_p.
void validate(const GameConfig& config, const CheckingSequence& seq);

// Consecutive labels first_label..last_label of the password with 1-based
// rank `password`. first_label == last_label == 0 is the empty bundle.
struct Bundle {
  std::size_t password = 0;
  int first_label = 0;
  int last_label = 0;

  bool empty() const { return first_label == 0 && last_label == 0; }
  friend bool operator==(const Bundle&, const Bundle&) = default;
};

enum class MarginalMode { kConcat, kInsert };

// lambda(pi): total probability mass covered by the sequence.
double success_rate(const GameConfig& config, const CheckingSequence& seq);
// lambda(pi, B): mass covered by the first B instructions.
double success_rate(const GameConfig& config, const CheckingSequence& seq, std::size_t budget);

// U_adv = v * lambda(pi) - sum_k c(pi_k) * (1 - lambda(pi, k-1)).
double utility(const GameConfig& config, const CheckingSequence& seq);

// Utility change from adding `bundle` to `base`, by appending (concat) or by
// inserting in natural order (insert). Multi-label bundles are evaluated one
// instruction at a time. Throws InputError when the bundle is incompatible.
double marginal(const GameConfig& config, const CheckingSequence& base, const Bundle& bundle,
                MarginalMode mode);

// base with `bundle` merged in; bundle must be compatible.
CheckingSequence include(const CheckingSequence& base, const Bundle& bundle);

// Concatenation marginal of labels 1..last_label of a password with
// probability `prob` onto a base that already covers `lambda` mass.
double concat_marginal(const GameConfig& config, double prob, double lambda, int last_label);

std::vector<std::size_t> es_boundaries(const PasswordDistribution& dist);

}  // namespace asymhash
