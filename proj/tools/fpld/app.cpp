#include "fpld/app.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "fpld/commands.hpp"
#include "fpld/config.hpp"
#include "fpld/error.hpp"
#include "fpld/properties.hpp"
#include "fpld/report.hpp"

namespace fpld::cli {

namespace {

struct Flags {
  std::string population;
  std::size_t n = 0;
  std::vector<std::string> x;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double A = 0.0;
  double xi = 0.0, xi1 = 0.0, h = 0.0;
  std::string format = "text";
  std::string out;
  std::string config;
  std::string statistic;
  std::string methods;
  std::string tangent;
  std::string level = "quick";
  std::string fault;
};

struct Registered {
  CLI::App* sub;
  CLI::Option* population = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* x = nullptr;
  CLI::Option* reps = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* workers = nullptr;
  CLI::Option* A = nullptr;
  CLI::Option* xi = nullptr;
  CLI::Option* xi1 = nullptr;
  CLI::Option* h = nullptr;
  CLI::Option* statistic = nullptr;
  CLI::Option* methods = nullptr;
  CLI::Option* tangent = nullptr;
};

Registered add_common(CLI::App* sub, Flags& f, bool tail_options) {
  Registered r{sub};
  sub->set_help_flag("--help", "print this help and exit");
  r.population = sub->add_option("--population", f.population, "file:<path> or power:<N>:<alpha>");
  r.n = sub->add_option("--n", f.n, "sample size (default N/4)");
  r.x = sub->add_option("--x", f.x, "x values; repeatable or comma separated");
  r.reps = sub->add_option("--reps", f.reps, "Monte Carlo replications");
  r.seed = sub->add_option("--seed", f.seed, "base seed");
  r.workers = sub->add_option("--workers", f.workers, "replication blocks (threads)");
  r.A = sub->add_option("--A", f.A, "absolute constant of the envelope");
  r.methods = sub->add_option("--methods", f.methods, "comma list of mc,enum,dp,bernoulli,saddlepoint");
  r.tangent = sub->add_option("--tangent", f.tangent, "Student saddlepoint tangent: optimal or sqrt_n");
  if (tail_options) {
    r.xi = sub->add_option("--xi", f.xi, "quadratic tilt xi");
    r.xi1 = sub->add_option("--xi1", f.xi1, "quadratic tilt xi1");
    r.h = sub->add_option("--h", f.h, "quadratic tilt threshold shift");
    r.statistic = sub->add_option("--statistic", f.statistic, "sum, t or quadratic");
  }
  sub->add_option("--format", f.format, "json, csv or text");
  sub->add_option("--out", f.out, "write the report to this path");
  sub->add_option("--config", f.config, "JSON config; flags override its keys");
  return r;
}

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

ExperimentConfig build_config(const Registered& r, const Flags& f, ExperimentConfig base) {
  if (!f.config.empty()) {
    const auto file = load_config(f.config);
    nlohmann::json j = file;
    from_json(j, base);
  }
  if (given(r.population)) base.population = PopulationSpec::parse(f.population);
  if (given(r.n)) base.n = f.n;
  if (given(r.x)) {
    base.x_grid.clear();
    for (const auto& item : f.x) {
      for (double v : parse_number_list(item)) base.x_grid.push_back(v);
    }
  }
  if (given(r.reps)) base.reps = f.reps;
  if (given(r.seed)) base.seed = f.seed;
  if (given(r.workers)) base.workers = f.workers;
  if (given(r.A)) base.A = f.A;
  if (given(r.xi)) base.xi = f.xi;
  if (given(r.xi1)) base.xi1 = f.xi1;
  if (given(r.h)) base.h = f.h;
  if (given(r.statistic)) base.statistic = parse_statistic(f.statistic);
  if (given(r.methods)) {
    base.methods.clear();
    std::stringstream ss(f.methods);
    for (std::string m; std::getline(ss, m, ',');) {
      if (!m.empty()) base.methods.push_back(m);
    }
  }
  if (given(r.tangent)) base.tangent = f.tangent;
  base.normalize();
  return base;
}

void emit(const std::string& text, const Flags& f, std::ostream& out) {
  if (f.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigError("cannot write '" + f.out + "'");
  file << text;
}

void write_validation(const ValidationReport& v, Format fmt, std::ostream& out) {
  if (fmt == Format::json) {
    out << nlohmann::json(v).dump(2) << '\n';
    return;
  }
  if (fmt == Format::csv) out << "property,passed,checked,violations,worst_margin\n";
  for (const auto& p : v.properties) {
    if (fmt == Format::csv) {
      out << p.name << ',' << (p.passed ? "true" : "false") << ',' << p.checked << ','
          << p.violations << ',' << format_number(p.worst_margin) << '\n';
    } else {
      out << (p.passed ? "PASS " : "FAIL ") << p.name << "  checked=" << p.checked
          << " worst_margin=" << format_number(p.worst_margin);
      if (!p.passed) out << " first_failure=" << p.first_failure.dump();
      out << '\n';
    }
  }
  if (fmt == Format::text) out << (v.passed() ? "validate: all properties hold\n" : "validate: FAILED\n");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tail probabilities for sums and Student statistics under sampling without replacement"};
  app.name("fpld");
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");
  Flags f;

  auto* moments = app.add_subcommand("moments", "population moments and valid x ranges");
  auto* tail = app.add_subcommand("tail", "tail probabilities of the chosen statistic");
  auto* t_tail = app.add_subcommand("t-tail", "alias of tail --statistic t");
  auto* quadratic = app.add_subcommand("quadratic", "quadratic-tilt event probabilities");
  auto* table1 = app.add_subcommand("table1", "Student tail ratios to the normal tail");
  auto* table2 = app.add_subcommand("table2", "Monte Carlo against the Student saddlepoint");
  auto* envelope = app.add_subcommand("envelope", "envelope and band values over an x grid");
  auto* validate = app.add_subcommand("validate", "run the property suites");

  std::vector<Registered> regs{add_common(moments, f, false), add_common(tail, f, true),
                               add_common(t_tail, f, true),   add_common(quadratic, f, true),
                               add_common(table1, f, false),  add_common(table2, f, false),
                               add_common(envelope, f, false)};
  validate->set_help_flag("--help", "print this help and exit");
  validate->add_option("--level", f.level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  validate->add_option("--seed", f.seed, "base seed");
  validate->add_option("--workers", f.workers, "replication blocks (threads)");
  validate->add_option("--format", f.format, "json, csv or text");
  validate->add_option("--out", f.out, "write the report to this path");
  validate->add_option("--inject-fault", f.fault)->group("")->check(CLI::IsMember({"k2"}));

  std::vector<const char*> argv{"fpld"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    const Format fmt = parse_format(f.format);
    std::ostringstream buf;

    if (validate->parsed()) {
      ValidationOptions opt;
      opt.level = f.level == "full" ? ValidationLevel::full : ValidationLevel::quick;
      if (f.seed) opt.seed = f.seed;
      if (f.workers) opt.workers = f.workers;
      if (f.fault == "k2") opt.cgf = faulty_k2_cgf;
      const auto v = run_validation(opt);
      write_validation(v, fmt, buf);
      emit(buf.str(), f, out);
      return v.passed() ? kSuccess : kPropertyFailure;
    }

    const Registered* reg = nullptr;
    for (const auto& r : regs) {
      if (r.sub->parsed()) reg = &r;
    }
    ExperimentConfig base;
    if (reg->sub == t_tail) base.statistic = Statistic::t;
    if (reg->sub == quadratic) base.statistic = Statistic::quadratic;
    if (reg->sub == table1 || reg->sub == table2) base.reps = 1000000;
    const auto cfg = build_config(*reg, f, base);

    Report report;
    if (reg->sub == moments) report = cmd_moments(cfg);
    else if (reg->sub == table1) report = cmd_table1(cfg);
    else if (reg->sub == table2) report = cmd_table2(cfg);
    else if (reg->sub == envelope) report = cmd_envelope(cfg);
    else report = cmd_tail(cfg);

    write_report(buf, report, fmt);
    emit(buf.str(), f, out);
    return kSuccess;
  } catch (const ConfigError& e) {
    err << "fpld: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "fpld: population input: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalFailure& e) {
    err << "fpld: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const InstanceTooLarge& e) {
    err << "fpld: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "fpld: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "fpld: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "fpld: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace fpld::cli
