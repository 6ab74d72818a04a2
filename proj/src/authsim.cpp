#include "asymhash/authsim.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <vector>

#include "asymhash/errors.hpp"

namespace asymhash {

namespace {

void append_index(std::vector<std::uint8_t>& buf, int index) {
  const auto u = static_cast<std::uint32_t>(index);
  for (int shift = 24; shift >= 0; shift -= 8) buf.push_back(static_cast<std::uint8_t>(u >> shift));
}

Digest sha256(const std::vector<std::uint8_t>& data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw InvariantViolation("SHA-256 evaluation failed");
  }
  return out;
}

}  // namespace

MockLabelStream::MockLabelStream(std::string_view password, const Salt& salt)
    : password_(password), salt_(salt) {}

const Digest& MockLabelStream::next() {
  std::vector<std::uint8_t> buf;
  if (position_ == 0) {
    buf.assign(salt_.begin(), salt_.end());
    buf.insert(buf.end(), password_.begin(), password_.end());
  } else {
    buf.assign(current_.begin(), current_.end());
  }
  ++position_;
  append_index(buf, position_);
  current_ = sha256(buf);
  return current_;
}

Journal::Journal(const std::string& path) : out_(path, std::ios::app) {
  if (!out_) throw InputError("cannot open journal '" + path + "'");
}

void Journal::record(std::string_view event, double cost, int labels, bool accepted) {
  nlohmann::json line{{"event", event}, {"cost", cost}, {"labels", labels}, {"accepted", accepted}};
  out_ << line.dump() << '\n';
}

Registration register_account(std::string user, std::string_view password,
                              std::shared_ptr<const BreakpointSchedule> schedule,
                              std::mt19937_64& rng, Journal* journal) {
  if (!schedule) throw InputError("registration needs a schedule");
  Registration out;
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : out.record.salt) b = static_cast<std::uint8_t>(byte(rng));

  const auto q = schedule->q();
  std::discrete_distribution<int> pick(q.begin(), q.end());
  const int label = pick(rng) + 1;

  MockLabelStream stream(password, out.record.salt);
  for (int j = 1; j <= label; ++j) out.record.hash = stream.next();
  out.record.user = std::move(user);
  out.cost = schedule->cumulative_cost(label);
  out.record.schedule = std::move(schedule);
  if (journal) journal->record("register", out.cost, label, true);
  return out;
}

Verification verify(const AccountRecord& record, std::string_view guess, Journal* journal) {
  if (!record.schedule) throw InputError("account record has no schedule");
  const auto& s = *record.schedule;
  MockLabelStream stream(guess, record.salt);
  Verification out;
  while (stream.position() < s.m()) {
    if (stream.next() == record.hash) {
      out.accepted = true;
      break;
    }
  }
  out.labels_computed = stream.position();
  out.cost = s.cumulative_cost(out.labels_computed);
  if (journal) journal->record("verify", out.cost, out.labels_computed, out.accepted);
  return out;
}

WorkloadStats measure_workload(std::shared_ptr<const BreakpointSchedule> schedule,
                               std::size_t trials, double correct_fraction, std::mt19937_64& rng,
                               Journal* journal) {
  if (!schedule) throw InputError("workload measurement needs a schedule");
  if (trials < 1) throw InputError("trials must be at least 1");
  if (!(correct_fraction >= 0.0 && correct_fraction <= 1.0)) {
    throw InputError("correct fraction must lie in [0, 1]");
  }

  const double rejection_cost = schedule->cumulative_cost(schedule->m());
  std::bernoulli_distribution correct_login(correct_fraction);
  WorkloadStats stats;
  stats.trials = trials;
  double sum_correct = 0.0;
  double sumsq_correct = 0.0;
  double sum_incorrect = 0.0;
  double sum_registration = 0.0;

  for (std::size_t t = 0; t < trials; ++t) {
    const std::string password = "pw-" + std::to_string(t);
    auto reg = register_account("user-" + std::to_string(t), password, schedule, rng, journal);
    sum_registration += reg.cost;
    if (correct_login(rng)) {
      const auto result = verify(reg.record, password, journal);
      if (!result.accepted) throw InvariantViolation("correct password was rejected");
      ++stats.correct;
      sum_correct += result.cost;
      sumsq_correct += result.cost * result.cost;
    } else {
      const auto result = verify(reg.record, password + "-wrong", journal);
      if (result.accepted) throw InvariantViolation("wrong password was accepted");
      ++stats.incorrect;
      sum_incorrect += result.cost;
      if (result.cost != rejection_cost) stats.incorrect_exact = false;
    }
  }

  const auto n = static_cast<double>(trials);
  stats.mean_overall = (sum_correct + sum_incorrect) / n;
  stats.mean_registration = sum_registration / n;
  if (stats.correct > 0) {
    const auto k = static_cast<double>(stats.correct);
    stats.mean_correct = sum_correct / k;
    if (stats.correct > 1) {
      const double var = (sumsq_correct - k * stats.mean_correct * stats.mean_correct) / (k - 1.0);
      stats.stddev_correct = std::sqrt(std::max(0.0, var));
    }
    stats.correct_within_bound = stats.mean_correct <= schedule->c_max() * (1.0 + 3.0 / std::sqrt(n));
  }
  if (stats.incorrect > 0) stats.mean_incorrect = sum_incorrect / static_cast<double>(stats.incorrect);
  return stats;
}

}  // namespace asymhash
