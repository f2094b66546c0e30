#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fpld/population.hpp"

namespace fpld::cli {

/// Invalid command-line or configuration input (exit status 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `power:<N>:<alpha>` or `file:<path>`.
struct PopulationSpec {
  enum class Kind { power, file };
  Kind kind = Kind::power;
  std::size_t N = 0;
  double alpha = 1.0;
  std::string path;

  static PopulationSpec parse(std::string_view text);
  static PopulationSpec power(std::size_t N, double alpha) { return {Kind::power, N, alpha, {}}; }
  std::string str() const;
  Population load() const;
  bool operator==(const PopulationSpec&) const = default;
};

enum class Statistic { sum, t, quadratic };
std::string_view to_string(Statistic s) noexcept;
Statistic parse_statistic(std::string_view text);

struct ExperimentConfig {
  std::optional<PopulationSpec> population;
  std::optional<std::size_t> n;  ///< defaults to N / 4
  std::vector<double> x_grid{2.0, 2.5, 3.0};
  std::uint64_t reps = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 8;
  std::optional<double> A;
  double xi = 0.0;
  double xi1 = 0.0;
  double h = 0.0;
  Statistic statistic = Statistic::sum;
  std::vector<std::string> methods{"mc"};  ///< subset of mc, enum, dp, bernoulli, saddlepoint
  std::string tangent = "optimal";         ///< optimal | sqrt_n

  /// Sorts x_grid and throws ConfigError on any violated constraint.
  void normalize();
  std::size_t sample_size(std::size_t N) const;
  bool uses(std::string_view method) const;
  bool operator==(const ExperimentConfig&) const = default;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::string& path);

/// Splits "1,2.5,3" into doubles with locale-independent parsing.
std::vector<double> parse_number_list(std::string_view text);

}  // namespace fpld::cli
