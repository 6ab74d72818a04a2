#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "asymhash/game.hpp"

namespace asymhash {

enum class Certificate { kGlobalExact, kGlobalCertified, kLocalOnly };

const char* to_string(Certificate certificate);

// Work counters and events observed during a search.
struct SearchStats {
  std::size_t marginal_evaluations = 0;
  std::size_t extend_passes = 0;
  // Concatenation stopped inside an equivalence set and was cut back to the
  // preceding boundary.
  bool truncated_to_boundary = false;
  bool optimality_test_run = false;
  bool optimality_test_passed = false;
  bool find_good_run = false;
};

struct BestResponse {
  CheckingSequence seq;
  double utility = 0.0;
  double success_rate = 0.0;
  Certificate certificate = Certificate::kLocalOnly;
  std::size_t i_max = 0;
  SearchStats stats;
};

struct PrefixBound {
  std::size_t i_max = 0;
  // (last password rank of each equivalence set, F at that rank).
  std::vector<std::pair<std::size_t, double>> f_values;
};

// F(v, q, i): best concatenation marginal of a bundle of password i onto
// Pi(i-1, m), the full check of every more popular password.
double prefix_profit_bound(const GameConfig& config, std::size_t password);

// Largest password rank any optimal sequence can touch. F is evaluated at the
// last rank of every equivalence set without early exit, since F need not be
// monotone across sets.
PrefixBound max_prefix_index(const GameConfig& config);

// Appends, password by password, the label prefix with the best concatenation
// marginal, stopping at the first password for which checking nothing is best.
CheckingSequence extend_by_concat(const GameConfig& config, const CheckingSequence& start,
                                  SearchStats* stats = nullptr);

// Inserts single-password bundles with non-negative insertion marginal until
// none remain.
CheckingSequence extend_by_insert(const GameConfig& config, const CheckingSequence& seq,
                                  SearchStats* stats = nullptr);

// Fixed point of alternating insertion and concatenation, starting from
// extend_by_concat of the empty sequence.
CheckingSequence extend(const GameConfig& config, SearchStats* stats = nullptr);

inline constexpr int kMaxExtendPasses = 50;

struct OptimalityVerdict {
  bool pass = true;
  std::optional<Bundle> witness;
  double witness_test = 0.0;
};

// One-sided certificate: PASS proves `local` optimal, FAIL proves nothing.
OptimalityVerdict optimality_test(const GameConfig& config, const CheckingSequence& local,
                                  SearchStats* stats = nullptr);

// 1-based peak indices of q in increasing order.
std::vector<int> find_peaks(std::span<const double> q);

// Promotes a local optimum for cost-even schedules with m <= 3 and exactly two
// peaks by searching sequences whose caps are both peaks. Not exact: an
// optimum may cap between peaks. Throws InputError when the preconditions do
// not hold.
CheckingSequence find_good(const GameConfig& config, const CheckingSequence& local,
                           SearchStats* stats = nullptr);

// Best prefix among full checks Pi(x_k, m) over every equivalence-set
// boundary x_k.
CheckingSequence best_full_check_prefix(const GameConfig& config);

BestResponse best_response(const GameConfig& config);

// Baseline: deterministic hashing at cost c_max per guess.
BestResponse deterministic_best_response(double v, double c_max, const PasswordDistribution& dist);

// Fills utility, success rate and i_max for an already chosen sequence.
BestResponse make_response(const GameConfig& config, CheckingSequence seq,
                           Certificate certificate);

}  // namespace asymhash
