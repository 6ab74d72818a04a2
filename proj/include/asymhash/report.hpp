#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "asymhash/corpus.hpp"
#include "asymhash/defender.hpp"
#include "asymhash/game.hpp"

namespace asymhash {

inline constexpr const char* kToolVersion = "0.1.0";

struct SweepRow {
  double v_over_cmax = 0.0;
  int m = 1;
  std::string schedule;
  std::string q;  // "uniform" or ';'-separated probabilities
  double success_rate = 0.0;
  double utility = 0.0;
  std::size_t prefix_len = 0;
  std::string certificate;
  std::string region;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepReport {
  std::string corpus_id;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::vector<SweepRow> rows;
};

struct SweepSpec {
  ScheduleFamily family = ScheduleFamily::kCostEven;
  std::vector<int> ms{2};
  std::vector<double> q;      // empty means uniform; otherwise needs a single m
  std::vector<double> betas;  // custom family only
  double c_max = 1.0;
  std::vector<double> v_over_cmax;
  bool baseline = true;
  // Rows certified only locally are re-solved exhaustively when n_p is at
  // most this and m <= 3. Zero disables the fallback.
  std::size_t oracle_limit = 10;
  unsigned workers = 1;
};

// `points` values log-spaced over [start, stop]; a single point yields start.
std::vector<double> log_grid(double start, double stop, std::size_t points);

// Parses "start:stop:points".
std::vector<double> parse_grid(const std::string& text);

std::string describe_q(std::span<const double> q, bool uniform);

// Solves one configuration and applies the oracle fallback.
BestResponse solve_point(const GameConfig& config, std::size_t oracle_limit);

SweepReport run_sweep(const EquivalenceSets& corpus, const SweepSpec& spec);

struct OptimizeOutcome {
  DistributionResult result;
  double uniform_success = 0.0;
  SweepReport report;  // uniform row followed by the optimized row
};

OptimizeOutcome run_optimize(const EquivalenceSets& corpus, const DistributionProblem& problem);

void write_csv(std::ostream& out, const SweepReport& report);
void write_json(std::ostream& out, const SweepReport& report);

// Round-trip readers used by the format-equivalence checks.
std::vector<SweepRow> read_csv(std::istream& in);
std::vector<SweepRow> read_json(std::istream& in);

// %.17g
std::string format_double(double x);

}  // namespace asymhash
