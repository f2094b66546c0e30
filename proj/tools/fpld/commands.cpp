#include "fpld/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "fpld/bounds.hpp"
#include "fpld/error.hpp"
#include "fpld/exact.hpp"
#include "fpld/saddlepoint.hpp"
#include "fpld/sampling.hpp"

namespace fpld::cli {

namespace {

struct Setup {
  PopulationSpec spec;
  Population pop;
  Design d;
  PopulationMoments m;
};

Setup setup(const PopulationSpec& spec, const ExperimentConfig& cfg) {
  Population pop = spec.load();
  const auto d = Design::make(pop.size(), cfg.sample_size(pop.size()));
  const auto m = compute_moments(pop);
  return {spec, std::move(pop), d, m};
}

const PopulationSpec& require_population(const ExperimentConfig& cfg) {
  if (!cfg.population) throw ConfigError("--population is required");
  return *cfg.population;
}

ReportRow base_row(const Setup& s, Statistic stat, std::string method, double x) {
  ReportRow r;
  r.population = s.spec.str();
  r.N = s.d.N;
  r.n = s.d.n;
  r.statistic = std::string(to_string(stat));
  r.method = std::move(method);
  r.x = x;
  return r;
}

void fill_estimate(ReportRow& r, const TailEstimate& e) {
  r.p_hat = e.p_hat;
  r.std_error = e.std_error;
  r.reps = e.reps;
  r.undefined_samples = e.undefined_samples;
  if (e.out_of_regime) r.note = "parameters outside the small-x regime";
}

void attach_bounds(ReportRow& r, const Setup& s, const ExperimentConfig& cfg) {
  const double A = cfg.A.value_or(1.0);
  r.in_range = r.x >= 0.0 && r.x <= valid_x_range(s.m, s.d, A).envelope_cap;
  if (cfg.A && r.statistic != "quadratic") {
    const auto env = tail_ratio_envelope(r.x, s.m, s.d, *cfg.A);
    r.envelope_lower = env.lower;
    r.envelope_upper = env.upper;
  }
  if (r.x > 0.0 && r.p_hat > 0.0 && r.statistic != "quadratic") {
    r.implied_A = implied_A(r.ratio, r.x, s.m, s.d);
  }
}

void add_note(std::string& note, const std::string& text) {
  note = note.empty() ? text : note + "; " + text;
}

std::vector<Setup> table_setups(const ExperimentConfig& cfg) {
  std::vector<Setup> out;
  if (cfg.population) {
    out.push_back(setup(*cfg.population, cfg));
  } else {
    for (const auto& spec : default_table_populations()) out.push_back(setup(spec, cfg));
  }
  return out;
}

std::vector<ReportRow> t_rows(const Setup& s, const ExperimentConfig& cfg, std::uint64_t cell) {
  const auto est = mc_tail_t(s.pop, s.d, cfg.x_grid, {cfg.reps, cfg.seed + cell, cfg.workers});
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < cfg.x_grid.size(); ++i) {
    auto r = base_row(s, Statistic::t, "mc", cfg.x_grid[i]);
    fill_estimate(r, est[i]);
    finish_row(r);
    attach_bounds(r, s, cfg);
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json config_json(const ExperimentConfig& cfg) { return cfg; }

}  // namespace

std::vector<PopulationSpec> default_table_populations() {
  return {PopulationSpec::power(1000, 1.0), PopulationSpec::power(100, 1.0),
          PopulationSpec::power(1000, 2.0), PopulationSpec::power(100, 2.0)};
}

Report cmd_moments(const ExperimentConfig& cfg) {
  const auto s = setup(require_population(cfg), cfg);
  const double A = cfg.A.value_or(1.0);
  const auto range = valid_x_range(s.m, s.d, A);
  Report r;
  r.command = "moments";
  r.config = config_json(cfg);
  r.summary = {{"population", s.spec.str()},
               {"N", s.d.N},
               {"n", s.d.n},
               {"mu", s.m.mu},
               {"sigma2", s.m.sigma2},
               {"beta3N", s.m.beta3N},
               {"max_dev", s.m.max_dev},
               {"omega", s.d.omega},
               {"A", A},
               {"envelope_cap", range.envelope_cap},
               {"band_cap", range.band_cap}};
  return r;
}

Report cmd_tail(const ExperimentConfig& cfg) {
  const auto s = setup(require_population(cfg), cfg);
  const auto& xs = cfg.x_grid;
  const Statistic stat = cfg.statistic;
  const QuadraticTilt qt{cfg.xi, cfg.xi1, cfg.h};
  const McOptions mc{cfg.reps, cfg.seed, cfg.workers};

  Report report;
  report.command = "tail";
  report.config = config_json(cfg);

  std::optional<Population> std_pop;
  if (stat == Statistic::quadratic) std_pop = standardize(s.pop);
  auto sum_threshold = [&](double x) { return s.d.n * s.m.mu + x * s.m.sigma() * s.d.omega; };

  // Saddlepoint values shared by every method row at the same x.
  std::vector<std::optional<double>> sp(xs.size());
  std::vector<std::string> sp_note(xs.size());
  if (cfg.uses("saddlepoint")) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      try {
        switch (stat) {
          case Statistic::sum:
            sp[i] = saddlepoint_tail(s.pop.values(), s.d.n, sum_threshold(xs[i])).probability;
            break;
          case Statistic::t:
            sp[i] = saddlepoint_t_tail(s.pop, s.d, xs[i],
                                       cfg.tangent == "sqrt_n" ? TangentRule::fixed_sqrt_n
                                                               : TangentRule::optimal)
                        .probability;
            break;
          case Statistic::quadratic:
            sp[i] = quadratic_tilt_tail_approx(*std_pop, s.d, xs[i], qt).probability;
            break;
        }
      } catch (const std::domain_error& e) {
        sp_note[i] = std::string("saddlepoint unavailable: ") + e.what();
      } catch (const NumericalFailure& e) {
        sp_note[i] = std::string("saddlepoint failed: ") + e.what();
      }
    }
  }

  auto emit = [&](const std::string& method, std::size_t i, const TailEstimate& e) {
    auto r = base_row(s, stat, method, xs[i]);
    fill_estimate(r, e);
    r.saddlepoint = sp[i];
    if (!sp_note[i].empty()) add_note(r.note, sp_note[i]);
    finish_row(r);
    attach_bounds(r, s, cfg);
    report.rows.push_back(std::move(r));
  };

  for (const auto& method : cfg.methods) {
    if (method == "mc") {
      std::vector<TailEstimate> est;
      switch (stat) {
        case Statistic::sum: est = mc_tail_sum(s.pop, s.d, xs, mc); break;
        case Statistic::t: est = mc_tail_t(s.pop, s.d, xs, mc); break;
        case Statistic::quadratic:
          for (double x : xs) est.push_back(mc_tail_quadratic_tilt(*std_pop, s.d, x, qt, mc));
          break;
      }
      for (std::size_t i = 0; i < xs.size(); ++i) emit("mc", i, est[i]);
    } else if (method == "enum") {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        ExactTail e;
        switch (stat) {
          case Statistic::sum:
            e = exact_tail_enum(s.pop, s.d.n, EnumStatistic::sum(), sum_threshold(xs[i]));
            break;
          case Statistic::t:
            e = exact_tail_enum(s.pop, s.d.n, EnumStatistic::t(), xs[i]);
            break;
          case Statistic::quadratic:
            e = exact_tail_enum(*std_pop, s.d.n, EnumStatistic::quadratic(xs[i], qt),
                                xs[i] * xs[i] + qt.h);
            break;
        }
        emit("enum", i, e.estimate);
      }
    } else if (method == "dp") {
      if (stat != Statistic::sum) {
        report.notes.push_back("dp applies to the sum statistic only; skipped");
        continue;
      }
      const SumDistribution dist(s.pop, s.d.n);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        emit("dp", i, dist.tail(sum_threshold(xs[i])).estimate);
      }
    } else if (method == "bernoulli") {
      if (stat != Statistic::sum) {
        report.notes.push_back("bernoulli applies to the sum statistic only; skipped");
        continue;
      }
      const auto est = bernoulli_conditioned_tail(s.pop, s.d, xs, mc);
      for (std::size_t i = 0; i < xs.size(); ++i) emit("bernoulli_conditioned", i, est[i]);
    }
  }

  if (cfg.methods.size() == 1 && cfg.uses("saddlepoint")) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      TailEstimate e;
      e.p_hat = sp[i].value_or(0.0);
      emit("saddlepoint", i, e);
    }
  }
  return report;
}

Report cmd_table1(const ExperimentConfig& cfg) {
  Report report;
  report.command = "table1";
  report.config = config_json(cfg);
  if (cfg.reps < 100000) report.notes.push_back("reps below 1e5; cell ratios are noisy");
  std::uint64_t cell = 0;
  double max_A = 0.0;
  for (const auto& s : table_setups(cfg)) {
    for (auto& r : t_rows(s, cfg, cell++)) {
      if (r.implied_A) max_A = std::max(max_A, *r.implied_A);
      report.rows.push_back(std::move(r));
    }
  }
  report.summary = {{"cells", report.rows.size()}, {"max_implied_A", max_A}};
  return report;
}

Report cmd_table2(const ExperimentConfig& cfg) {
  Report report;
  report.command = "table2";
  report.config = config_json(cfg);
  if (cfg.reps < 100000) report.notes.push_back("reps below 1e5; cell ratios are noisy");
  const auto rule = cfg.tangent == "sqrt_n" ? TangentRule::fixed_sqrt_n : TangentRule::optimal;
  std::uint64_t cell = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : table_setups(cfg)) {
    for (auto& r : t_rows(s, cfg, cell++)) {
      if (!(r.x > 0.0)) {
        add_note(r.note, "excluded: the saddlepoint needs x > 0");
      } else {
        try {
          r.saddlepoint = saddlepoint_t_tail(s.pop, s.d, r.x, rule).probability;
          finish_row(r);
          lo = std::min(lo, *r.saddlepoint_ratio);
          hi = std::max(hi, *r.saddlepoint_ratio);
        } catch (const std::domain_error& e) {
          add_note(r.note, std::string("saddlepoint unavailable: ") + e.what());
        } catch (const NumericalFailure& e) {
          add_note(r.note, std::string("saddlepoint failed: ") + e.what());
        }
      }
      report.rows.push_back(std::move(r));
    }
  }
  report.summary = {{"cells", report.rows.size()}, {"tangent", cfg.tangent}};
  if (std::isfinite(lo)) {
    report.summary["min_ratio"] = lo;
    report.summary["max_ratio"] = hi;
  }
  return report;
}

Report cmd_envelope(const ExperimentConfig& cfg) {
  if (!cfg.A) throw ConfigError("envelope needs an explicit --A");
  const auto s = setup(require_population(cfg), cfg);
  Report report;
  report.command = "envelope";
  report.config = config_json(cfg);
  for (double x : cfg.x_grid) {
    const auto env = tail_ratio_envelope(x, s.m, s.d, *cfg.A);
    const auto band = relative_error_band(x, s.m, s.d, *cfg.A);
    report.envelopes.push_back({x, *cfg.A, env.lower, env.upper, env.exponent, band.relative_band,
                                band.be_bound, env.in_range, band.in_range});
  }
  report.summary = {{"population", s.spec.str()}, {"N", s.d.N}, {"n", s.d.n},
                    {"beta3N", s.m.beta3N},       {"omega", s.d.omega}};
  return report;
}

}  // namespace fpld::cli
