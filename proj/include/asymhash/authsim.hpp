#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <string_view>

#include "asymhash/game.hpp"

namespace asymhash {

using Salt = std::array<std::uint8_t, 16>;
using Digest = std::array<std::uint8_t, 32>;

// Sequential SHA-256 chain standing in for an MHF label stream:
// L_1 = H(salt || pw || 1), L_j = H(L_{j-1} || j).
class MockLabelStream {
 public:
  MockLabelStream(std::string_view password, const Salt& salt);

  const Digest& next();
  // Number of labels produced so far.
  int position() const { return position_; }

 private:
  std::string password_;
  Salt salt_;
  Digest current_{};
  int position_ = 0;
};

// The sampled breakpoint index is not part of the record.
struct AccountRecord {
  std::string user;
  Salt salt{};
  Digest hash{};
  std::shared_ptr<const BreakpointSchedule> schedule;
};

struct Registration {
  AccountRecord record;
  double cost = 0.0;
};

struct Verification {
  bool accepted = false;
  int labels_computed = 0;
  double cost = 0.0;
};

// Line-delimited JSON event log, opened in append mode.
class Journal {
 public:
  explicit Journal(const std::string& path);
  void record(std::string_view event, double cost, int labels, bool accepted);

 private:
  std::ofstream out_;
};

Registration register_account(std::string user, std::string_view password,
                              std::shared_ptr<const BreakpointSchedule> schedule,
                              std::mt19937_64& rng, Journal* journal = nullptr);

Verification verify(const AccountRecord& record, std::string_view guess, Journal* journal = nullptr);

struct WorkloadStats {
  std::size_t trials = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  double mean_correct = 0.0;
  double stddev_correct = 0.0;  // sample standard deviation
  double mean_incorrect = 0.0;
  double mean_overall = 0.0;
  double mean_registration = 0.0;
  // mean(correct) <= C_max * (1 + 3 / sqrt(trials)); vacuous without correct logins.
  bool correct_within_bound = true;
  // Every rejection cost exactly unit_cost * beta_m^2.
  bool incorrect_exact = true;
};

// Registers one fresh account per trial and logs in with the right password
// with probability `correct_fraction`, otherwise with a wrong one.
WorkloadStats measure_workload(std::shared_ptr<const BreakpointSchedule> schedule,
                               std::size_t trials, double correct_fraction, std::mt19937_64& rng,
                               Journal* journal = nullptr);

}  // namespace asymhash
