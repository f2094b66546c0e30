#include "fpld/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace fpld::cli {

namespace {

double parse_double(std::string_view text, std::string_view what) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": cannot parse '" + std::string(text) + "' as a number");
  }
  return v;
}

const std::set<std::string, std::less<>> kMethods{"mc", "enum", "dp", "bernoulli", "saddlepoint"};

}  // namespace

PopulationSpec PopulationSpec::parse(std::string_view text) {
  if (text.starts_with("file:")) {
    PopulationSpec s;
    s.kind = Kind::file;
    s.path = std::string(text.substr(5));
    if (s.path.empty()) throw ConfigError("population: empty file path");
    return s;
  }
  if (text.starts_with("power:")) {
    const auto rest = text.substr(6);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ConfigError("population: expected power:<N>:<alpha>");
    const double N = parse_double(rest.substr(0, colon), "population N");
    if (N < 2 || N != std::floor(N) || N > 1e8) {
      throw ConfigError("population: N must be an integer >= 2");
    }
    return power(static_cast<std::size_t>(N), parse_double(rest.substr(colon + 1), "population alpha"));
  }
  throw ConfigError("population: expected file:<path> or power:<N>:<alpha>, got '" +
                    std::string(text) + "'");
}

std::string PopulationSpec::str() const {
  if (kind == Kind::file) return "file:" + path;
  nlohmann::json a = alpha;  // shortest round-trip form
  return "power:" + std::to_string(N) + ":" + a.dump();
}

Population PopulationSpec::load() const {
  if (kind == Kind::file) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      throw ConfigError("population file '" + path + "' does not exist");
    }
    return load_population(path);
  }
  return family_power(N, alpha);
}

std::string_view to_string(Statistic s) noexcept {
  switch (s) {
    case Statistic::sum: return "sum";
    case Statistic::t: return "t";
    case Statistic::quadratic: return "quadratic";
  }
  return "sum";
}

Statistic parse_statistic(std::string_view text) {
  if (text == "sum") return Statistic::sum;
  if (text == "t") return Statistic::t;
  if (text == "quadratic") return Statistic::quadratic;
  throw ConfigError("statistic must be sum, t or quadratic");
}

void ExperimentConfig::normalize() {
  if (x_grid.empty()) throw ConfigError("x grid is empty");
  for (double x : x_grid) {
    if (!std::isfinite(x)) throw ConfigError("x values must be finite");
  }
  std::sort(x_grid.begin(), x_grid.end());
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (A && !(*A > 0.0)) throw ConfigError("A must be positive");
  if (!std::isfinite(xi) || !std::isfinite(xi1) || !std::isfinite(h)) {
    throw ConfigError("xi, xi1 and h must be finite");
  }
  for (const auto& m : methods) {
    if (!kMethods.contains(m)) throw ConfigError("unknown method '" + m + "'");
  }
  if (tangent != "optimal" && tangent != "sqrt_n") throw ConfigError("tangent must be optimal or sqrt_n");
  if (n && *n < 1) throw ConfigError("n must be >= 1");
}

std::size_t ExperimentConfig::sample_size(std::size_t N) const {
  const std::size_t m = n ? *n : N / 4;
  if (m < 1 || m >= N) {
    throw ConfigError("sample size n = " + std::to_string(m) + " must satisfy 1 <= n < N = " +
                      std::to_string(N));
  }
  return m;
}

bool ExperimentConfig::uses(std::string_view method) const {
  return std::find(methods.begin(), methods.end(), method) != methods.end();
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json::object();
  j["population"] = c.population ? nlohmann::json(c.population->str()) : nlohmann::json(nullptr);
  j["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json(nullptr);
  j["x"] = c.x_grid;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["A"] = c.A ? nlohmann::json(*c.A) : nlohmann::json(nullptr);
  j["xi"] = c.xi;
  j["xi1"] = c.xi1;
  j["h"] = c.h;
  j["statistic"] = to_string(c.statistic);
  j["methods"] = c.methods;
  j["tangent"] = c.tangent;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  static const std::set<std::string, std::less<>> known{
      "population", "n", "x", "reps", "seed", "workers", "A", "xi", "xi1", "h", "statistic",
      "methods", "tangent"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    if (j.contains("population") && !j["population"].is_null()) {
      c.population = PopulationSpec::parse(j["population"].get<std::string>());
    }
    if (j.contains("n") && !j["n"].is_null()) c.n = j["n"].get<std::size_t>();
    if (j.contains("x")) {
      c.x_grid = j["x"].is_array() ? j["x"].get<std::vector<double>>()
                                   : std::vector<double>{j["x"].get<double>()};
    }
    if (j.contains("reps")) c.reps = j["reps"].get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
    if (j.contains("A") && !j["A"].is_null()) c.A = j["A"].get<double>();
    if (j.contains("xi")) c.xi = j["xi"].get<double>();
    if (j.contains("xi1")) c.xi1 = j["xi1"].get<double>();
    if (j.contains("h")) c.h = j["h"].get<double>();
    if (j.contains("statistic")) c.statistic = parse_statistic(j["statistic"].get<std::string>());
    if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("tangent")) c.tangent = j["tangent"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  ExperimentConfig c;
  from_json(j, c);
  return c;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    auto item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.push_back(parse_double(item, "x"));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace fpld::cli
