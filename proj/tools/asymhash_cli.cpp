#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asymhash/attacker.hpp"
#include "asymhash/authsim.hpp"
#include "asymhash/corpus.hpp"
#include "asymhash/defender.hpp"
#include "asymhash/errors.hpp"
#include "asymhash/game.hpp"
#include "asymhash/report.hpp"

namespace {

using namespace asymhash;

struct Common {
  std::string corpus = "-";
  std::string format = "es";
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string emit = "csv";
};

struct ScheduleArgs {
  std::string family = "cost-even";
  std::string m = "2";
  std::string q = "uniform";
  std::string betas;
  double c_max = 1.0;
};

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw InputError(std::string("invalid ") + what + " entry '" + item + "'");
    }
    out.push_back(x);
  }
  if (out.empty()) throw InputError(std::string(what) + " must not be empty");
  return out;
}

std::vector<int> parse_ms(const std::string& text) {
  std::vector<int> out;
  for (double x : parse_doubles(text, "--m")) {
    if (x < 1 || x != static_cast<int>(x)) throw InputError("--m entries must be positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

ScheduleFamily parse_family(const std::string& text) {
  if (text == "cost-even") return ScheduleFamily::kCostEven;
  if (text == "time-even") return ScheduleFamily::kTimeEven;
  if (text == "custom") return ScheduleFamily::kCustom;
  throw InputError("unknown schedule family '" + text + "'");
}

CorpusFormat parse_format(const std::string& text) {
  if (text == "es") return CorpusFormat::kEquivalenceSets;
  if (text == "plaintext") return CorpusFormat::kPlaintext;
  throw InputError("unknown corpus format '" + text + "'");
}

std::vector<double> parse_q(const std::string& text) {
  if (text == "uniform") return {};
  return parse_doubles(text, "--q");
}

ScheduleOptions schedule_options(const ScheduleArgs& a, int m) {
  ScheduleOptions o{.family = parse_family(a.family), .m = m, .q = parse_q(a.q), .c_max = a.c_max};
  if (o.family == ScheduleFamily::kCustom) {
    if (a.betas.empty()) throw InputError("--schedule custom needs --betas");
    o.betas = parse_doubles(a.betas, "--betas");
  }
  return o;
}

std::vector<double> betas_for(const ScheduleArgs& a, int m) {
  auto s = make_schedule(schedule_options({a.family, a.m, "uniform", a.betas, a.c_max}, m));
  return {s.betas().begin(), s.betas().end()};
}

void add_common(CLI::App& app, Common& c, bool corpus) {
  if (corpus) {
    app.add_option("--corpus", c.corpus, "corpus path, '-' for stdin");
    app.add_option("--format", c.format, "es|plaintext");
  }
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--out", c.out, "output path, '-' for stdout");
}

void add_schedule(CLI::App& app, ScheduleArgs& s) {
  app.add_option("--schedule", s.family, "cost-even|time-even|custom");
  app.add_option("--m", s.m, "breakpoint count (comma list for sweep)");
  app.add_option("--q", s.q, "uniform or comma list");
  app.add_option("--betas", s.betas, "comma list, custom schedule only");
  app.add_option("--c-max", s.c_max, "workload ceiling");
}

void emit_text(const Common& c, const std::string& text) {
  if (c.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw InputError("cannot open output '" + c.out + "'");
  f << text;
}

std::string render(const SweepReport& report, const std::string& emit) {
  std::ostringstream out;
  if (emit == "csv") {
    write_csv(out, report);
  } else if (emit == "json") {
    write_json(out, report);
  } else {
    throw InputError("unknown --emit '" + emit + "'");
  }
  return out.str();
}

EquivalenceSets corpus_of(const Common& c) { return load_corpus(c.corpus, parse_format(c.format)); }

int run(int argc, char** argv) {
  CLI::App app{"Randomized MHF breakpoint game toolkit"};
  app.require_subcommand(1);

  Common solve_c, sweep_c, opt_c, auth_c, gen_c;
  ScheduleArgs solve_s, sweep_s, opt_s, auth_s;

  auto* solve = app.add_subcommand("solve", "attacker best response at one value");
  add_common(*solve, solve_c, true);
  add_schedule(*solve, solve_s);
  double solve_v = 1.0;
  std::size_t solve_limit = 10;
  solve->add_option("--v", solve_v, "v / C_max")->required();
  solve->add_option("--emit", solve_c.emit, "csv|json");
  solve->add_option("--oracle-limit", solve_limit, "largest n_p solved exhaustively");

  auto* sweep = app.add_subcommand("sweep", "success rate across a v grid");
  add_common(*sweep, sweep_c, true);
  add_schedule(*sweep, sweep_s);
  std::string grid;
  std::size_t sweep_limit = 10;
  unsigned sweep_workers = 1;
  sweep->add_option("--v-grid", grid, "start:stop:points, log spaced")->required();
  sweep->add_option("--emit", sweep_c.emit, "csv|json");
  sweep->add_option("--oracle-limit", sweep_limit, "largest n_p solved exhaustively");
  sweep->add_option("--workers", sweep_workers, "concurrent grid points");

  auto* opt = app.add_subcommand("optimize", "defender breakpoint distribution");
  add_common(*opt, opt_c, true);
  add_schedule(*opt, opt_s);
  double opt_v = 1.0;
  std::size_t budget = 2000;
  std::optional<double> alpha;
  unsigned opt_workers = 1;
  opt->add_option("--v", opt_v, "v / C_max")->required();
  opt->add_option("--budget", budget, "objective evaluations");
  opt->add_option("--alpha", alpha, "C_max / unit cost (default: uniform q is tight)");
  opt->add_option("--emit", opt_c.emit, "csv|json");
  opt->add_option("--workers", opt_workers, "concurrent evaluations");

  auto* auth = app.add_subcommand("authsim", "simulate registrations and logins");
  add_common(*auth, auth_c, false);
  add_schedule(*auth, auth_s);
  std::size_t trials = 10000;
  double correct_fraction = 1.0;
  std::string journal_path;
  auth->add_option("--trials", trials, "simulated logins");
  auth->add_option("--correct-fraction", correct_fraction, "share of correct logins");
  auth->add_option("--journal", journal_path, "append JSON-lines events here");

  auto* gen = app.add_subcommand("gen-synthetic", "sample a Zipf corpus");
  add_common(*gen, gen_c, false);
  std::uint64_t n_p = 1000;
  std::uint64_t n_a = 100000;
  double s = 1.0;
  gen->add_option("--n-p", n_p, "distinct passwords");
  gen->add_option("--s", s, "Zipf exponent");
  gen->add_option("--n-a", n_a, "accounts sampled");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*solve) {
    const auto corpus = corpus_of(solve_c);
    const auto ms = parse_ms(solve_s.m);
    if (ms.size() != 1) throw InputError("solve takes a single --m");
    if (!(solve_v > 0.0)) throw InputError("--v must be positive");
    const GameConfig config{solve_v * solve_s.c_max, make_schedule(schedule_options(solve_s, ms[0])),
                            to_distribution(corpus)};
    const auto r = solve_point(config, solve_limit);
    const auto region = confidence_regions(corpus, std::vector<double>{std::clamp(r.success_rate, 0.0, 1.0)});
    SweepReport report;
    report.seed = solve_c.seed;
    report.rows.push_back({solve_v, config.schedule.m(), to_string(config.schedule.family()),
                           describe_q(config.schedule.q(), solve_s.q == "uniform"), r.success_rate,
                           r.utility, r.seq.length(), to_string(r.certificate),
                           to_string(region.region[0])});
    if (solve_c.emit == "json") {
      nlohmann::ordered_json doc{{"v_over_cmax", solve_v},
                                 {"m", config.schedule.m()},
                                 {"schedule", report.rows[0].schedule},
                                 {"q", report.rows[0].q},
                                 {"success_rate", r.success_rate},
                                 {"utility", r.utility},
                                 {"prefix_len", r.seq.length()},
                                 {"certificate", report.rows[0].certificate},
                                 {"region", report.rows[0].region},
                                 {"i_max", r.i_max},
                                 {"taus", r.seq.taus}};
      emit_text(solve_c, doc.dump(2) + "\n");
    } else {
      emit_text(solve_c, render(report, solve_c.emit));
    }
    return 0;
  }

  if (*sweep) {
    const auto corpus = corpus_of(sweep_c);
    SweepSpec spec;
    spec.family = parse_family(sweep_s.family);
    spec.ms = parse_ms(sweep_s.m);
    spec.q = parse_q(sweep_s.q);
    spec.c_max = sweep_s.c_max;
    if (spec.family == ScheduleFamily::kCustom) {
      if (spec.ms.size() != 1) throw InputError("custom schedule needs a single --m");
      spec.betas = parse_doubles(sweep_s.betas, "--betas");
    }
    spec.v_over_cmax = parse_grid(grid);
    spec.oracle_limit = sweep_limit;
    spec.workers = sweep_workers;
    auto report = run_sweep(corpus, spec);
    report.corpus_id = sweep_c.corpus;
    report.seed = sweep_c.seed;
    emit_text(sweep_c, render(report, sweep_c.emit));
    return 0;
  }

  if (*opt) {
    const auto corpus = corpus_of(opt_c);
    const auto ms = parse_ms(opt_s.m);
    if (ms.size() != 1) throw InputError("optimize takes a single --m");
    DistributionProblem problem;
    problem.v = opt_v * opt_s.c_max;
    problem.betas = betas_for(opt_s, ms[0]);
    problem.c_max = opt_s.c_max;
    problem.alpha = alpha;
    problem.dist = to_distribution(corpus);
    problem.budget = budget;
    problem.seed = opt_c.seed;
    problem.workers = opt_workers;
    auto outcome = run_optimize(corpus, problem);
    outcome.report.corpus_id = opt_c.corpus;
    emit_text(opt_c, render(outcome.report, opt_c.emit));
    std::fprintf(stderr, "feasible=%s evaluations=%zu uniform=%.17g optimized=%.17g gap=%.17g\n",
                 outcome.result.feasible ? "true" : "false", outcome.result.evaluations_used,
                 outcome.uniform_success, outcome.result.attacker_success,
                 outcome.uniform_success - outcome.result.attacker_success);
    if (outcome.result.oracle_success) {
      std::fprintf(stderr, "oracle_success=%.17g\n", *outcome.result.oracle_success);
    }
    return 0;
  }

  if (*auth) {
    const auto ms = parse_ms(auth_s.m);
    if (ms.size() != 1) throw InputError("authsim takes a single --m");
    auto schedule = std::make_shared<const BreakpointSchedule>(make_schedule(schedule_options(auth_s, ms[0])));
    std::unique_ptr<Journal> journal;
    if (!journal_path.empty()) journal = std::make_unique<Journal>(journal_path);
    std::mt19937_64 rng(auth_c.seed);
    const auto st = measure_workload(schedule, trials, correct_fraction, rng, journal.get());
    if (!st.incorrect_exact) throw InvariantViolation("rejection cost differs from the full-stream cost");
    nlohmann::ordered_json doc{{"trials", st.trials},
                               {"correct", st.correct},
                               {"incorrect", st.incorrect},
                               {"mean_correct", st.mean_correct},
                               {"stddev_correct", st.stddev_correct},
                               {"mean_incorrect", st.mean_incorrect},
                               {"mean_overall", st.mean_overall},
                               {"mean_registration", st.mean_registration},
                               {"rejection_cost", schedule->cumulative_cost(schedule->m())},
                               {"c_max", schedule->c_max()},
                               {"correct_within_bound", st.correct_within_bound}};
    emit_text(auth_c, doc.dump(2) + "\n");
    return 0;
  }

  if (*gen) {
    std::ostringstream out;
    write_corpus(out, gen_zipf(n_p, s, n_a, gen_c.seed));
    emit_text(gen_c, out.str());
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const asymhash::InvariantViolation& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  } catch (const asymhash::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 2;
  }
}
