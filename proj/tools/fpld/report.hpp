#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fpld::cli {

/// One tail-probability cell.
struct ReportRow {
  std::string population;  ///< population spec
  std::uint64_t N = 0;
  std::uint64_t n = 0;
  std::string statistic;
  std::string method;
  double x = 0.0;
  double p_hat = 0.0;
  double std_error = 0.0;
  std::uint64_t reps = 0;
  double normal_tail = 0.0;
  double ratio = 0.0;         ///< p_hat / normal_tail
  double ratio_stderr = 0.0;  ///< std_error / normal_tail
  double wilson_lower = 0.0;  ///< 95% Wilson interval for p_hat (exact methods: p_hat)
  double wilson_upper = 0.0;
  std::optional<double> envelope_lower;
  std::optional<double> envelope_upper;
  std::optional<double> implied_A;
  std::optional<double> saddlepoint;
  std::optional<double> saddlepoint_ratio;  ///< p_hat / saddlepoint
  std::uint64_t undefined_samples = 0;
  bool in_range = true;
  std::string note;

  bool operator==(const ReportRow&) const = default;
};

struct EnvelopeRow {
  double x = 0.0;
  double A = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double exponent = 0.0;
  double relative_band = 0.0;
  double be_bound = 0.0;
  bool envelope_in_range = true;
  bool band_in_range = true;

  bool operator==(const EnvelopeRow&) const = default;
};

struct Report {
  std::string command;
  nlohmann::json config;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<ReportRow> rows;
  std::vector<EnvelopeRow> envelopes;
  std::vector<std::string> notes;

  bool operator==(const Report&) const = default;
};

void to_json(nlohmann::json& j, const ReportRow& r);
void from_json(const nlohmann::json& j, ReportRow& r);
void to_json(nlohmann::json& j, const EnvelopeRow& r);
void from_json(const nlohmann::json& j, EnvelopeRow& r);
void to_json(nlohmann::json& j, const Report& r);
void from_json(const nlohmann::json& j, Report& r);

/// Fills normal_tail, ratio, ratio_stderr and the Wilson interval from x, p_hat, std_error, reps.
void finish_row(ReportRow& row);

/// 95% Wilson score interval for hits / reps.
std::pair<double, double> wilson_interval(double p_hat, std::uint64_t reps, double z = 1.959963984540054);

enum class Format { json, csv, text };
Format parse_format(std::string_view text);

void write_report(std::ostream& out, const Report& r, Format f);
/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double v);

}  // namespace fpld::cli
