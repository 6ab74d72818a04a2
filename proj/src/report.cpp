#include "asymhash/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "asymhash/attacker.hpp"
#include "asymhash/errors.hpp"
#include "asymhash/oracle.hpp"

namespace asymhash {

namespace {

constexpr const char* kCsvHeader =
    "v_over_cmax,m,schedule,q,success_rate,utility,prefix_len,certificate,region";

double parse_number(const std::string& text, const char* what) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw InputError(std::string("invalid ") + what + ": '" + text + "'");
  }
  return x;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

template <class Fn>
void for_each_parallel(std::size_t count, unsigned workers, Fn fn) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(workers, count));
  if (w == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < count; i += w) fn(i);
    });
  }
}

SweepRow make_row(double v_over_cmax, int m, std::string schedule, std::string q,
                  const BestResponse& r) {
  return SweepRow{v_over_cmax,      m,
                  std::move(schedule), std::move(q),
                  r.success_rate,   r.utility,
                  r.seq.length(),   to_string(r.certificate),
                  ""};
}

void annotate_regions(const EquivalenceSets& corpus, std::vector<SweepRow>& rows) {
  std::vector<double> cutoffs;
  for (const auto& row : rows) cutoffs.push_back(std::clamp(row.success_rate, 0.0, 1.0));
  const auto annotation = confidence_regions(corpus, cutoffs);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].region = to_string(annotation.region[i]);
}

void sort_rows(std::vector<SweepRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.schedule != b.schedule) return a.schedule < b.schedule;
    if (a.m != b.m) return a.m < b.m;
    return a.v_over_cmax < b.v_over_cmax;
  });
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> log_grid(double start, double stop, std::size_t points) {
  if (points == 0) return {};
  if (!(start > 0.0) || !(stop >= start) || !std::isfinite(stop)) {
    throw InputError("v grid needs 0 < start <= stop");
  }
  if (points == 1) return {start};
  std::vector<double> out(points);
  const double lo = std::log(start);
  const double step = (std::log(stop) - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = std::exp(lo + step * static_cast<double>(i));
  out.front() = start;
  out.back() = stop;
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InputError("v grid must look like start:stop:points");
  const double start = parse_number(parts[0], "grid start");
  const double stop = parse_number(parts[1], "grid stop");
  const double points = parse_number(parts[2], "grid point count");
  if (points < 0 || points != std::floor(points)) {
    throw InputError("grid point count must be a non-negative integer");
  }
  return log_grid(start, stop, static_cast<std::size_t>(points));
}

std::string describe_q(std::span<const double> q, bool uniform) {
  if (uniform) return "uniform";
  std::string out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ';';
    out += format_double(q[i]);
  }
  return out;
}

BestResponse solve_point(const GameConfig& config, std::size_t oracle_limit) {
  auto response = best_response(config);
  if (response.certificate == Certificate::kLocalOnly && config.dist.size() <= oracle_limit &&
      config.schedule.m() <= 3) {
    auto exact = enumerate_optimal(config, {.max_passwords = oracle_limit, .max_labels = 3});
    exact.stats = response.stats;
    return exact;
  }
  return response;
}

SweepReport run_sweep(const EquivalenceSets& corpus, const SweepSpec& spec) {
  if (!spec.q.empty() && spec.ms.size() != 1) {
    throw InputError("an explicit q needs exactly one m");
  }
  for (std::size_t i = 1; i < spec.v_over_cmax.size(); ++i) {
    if (!(spec.v_over_cmax[i] > spec.v_over_cmax[i - 1])) throw InputError("v grid must be ascending");
  }
  for (double v : spec.v_over_cmax) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("v grid values must be positive");
  }

  SweepReport report;
  const auto dist = to_distribution(corpus);
  const std::size_t n_v = spec.v_over_cmax.size();

  std::vector<BreakpointSchedule> schedules;
  for (int m : spec.ms) {
    schedules.push_back(make_schedule({.family = spec.family,
                                       .m = m,
                                       .q = spec.q,
                                       .c_max = spec.c_max,
                                       .betas = spec.betas}));
  }

  const std::size_t jobs = schedules.size() * n_v + (spec.baseline ? n_v : 0);
  std::vector<SweepRow> rows(jobs);
  for_each_parallel(jobs, spec.workers, [&](std::size_t job) {
    if (job < schedules.size() * n_v) {
      const auto& s = schedules[job / n_v];
      const double ratio = spec.v_over_cmax[job % n_v];
      const GameConfig config{ratio * spec.c_max, s, dist};
      rows[job] = make_row(ratio, s.m(), to_string(s.family()), describe_q(s.q(), spec.q.empty()),
                           solve_point(config, spec.oracle_limit));
    } else {
      const double ratio = spec.v_over_cmax[job - schedules.size() * n_v];
      rows[job] = make_row(ratio, 1, "deterministic", "uniform",
                           deterministic_best_response(ratio * spec.c_max, spec.c_max, dist));
    }
  });

  annotate_regions(corpus, rows);
  sort_rows(rows);
  report.rows = std::move(rows);
  return report;
}

OptimizeOutcome run_optimize(const EquivalenceSets& corpus, const DistributionProblem& problem) {
  OptimizeOutcome out;
  out.result = optimize_distribution(problem);

  const int m = static_cast<int>(problem.betas.size());
  const auto uniform = uniform_q(m);
  const auto uniform_config = config_for(problem, uniform);
  const auto uniform_response = best_response(uniform_config);
  out.uniform_success = uniform_response.success_rate;

  const auto optimized_config = config_for(problem, out.result.q_star);
  const auto optimized_response = best_response(optimized_config);
  const std::string family = to_string(uniform_config.schedule.family());
  const double ratio = problem.v / problem.c_max;

  out.report.seed = problem.seed;
  out.report.rows.push_back(make_row(ratio, m, family, "uniform", uniform_response));
  out.report.rows.push_back(
      make_row(ratio, m, family, describe_q(out.result.q_star, false), optimized_response));
  annotate_regions(corpus, out.report.rows);
  return out;
}

void write_csv(std::ostream& out, const SweepReport& report) {
  out << kCsvHeader << '\n';
  for (const auto& r : report.rows) {
    out << format_double(r.v_over_cmax) << ',' << r.m << ',' << r.schedule << ',' << r.q << ','
        << format_double(r.success_rate) << ',' << format_double(r.utility) << ',' << r.prefix_len
        << ',' << r.certificate << ',' << r.region << '\n';
  }
}

void write_json(std::ostream& out, const SweepReport& report) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"v_over_cmax", r.v_over_cmax},
                    {"m", r.m},
                    {"schedule", r.schedule},
                    {"q", r.q},
                    {"success_rate", r.success_rate},
                    {"utility", r.utility},
                    {"prefix_len", r.prefix_len},
                    {"certificate", r.certificate},
                    {"region", r.region}});
  }
  out << rows.dump(2) << '\n';
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw InputError("unexpected CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 9) throw InputError("CSV row must have 9 fields");
    rows.push_back({parse_number(f[0], "v_over_cmax"), static_cast<int>(parse_number(f[1], "m")),
                    f[2], f[3], parse_number(f[4], "success_rate"), parse_number(f[5], "utility"),
                    static_cast<std::size_t>(parse_number(f[6], "prefix_len")), f[7], f[8]});
  }
  return rows;
}

std::vector<SweepRow> read_json(std::istream& in) {
  std::vector<SweepRow> rows;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& r : doc) {
      rows.push_back({r.at("v_over_cmax").get<double>(), r.at("m").get<int>(),
                      r.at("schedule").get<std::string>(), r.at("q").get<std::string>(),
                      r.at("success_rate").get<double>(), r.at("utility").get<double>(),
                      r.at("prefix_len").get<std::size_t>(), r.at("certificate").get<std::string>(),
                      r.at("region").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed JSON report: ") + e.what());
  }
  return rows;
}

}  // namespace asymhash
