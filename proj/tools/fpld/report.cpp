#include "fpld/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "fpld/bounds.hpp"
#include "fpld/config.hpp"

namespace fpld::cli {

namespace {

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
void get_opt(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j[key].is_null()) v = j[key].get<T>(); else v.reset();
}

std::string opt_str(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << std::setw(static_cast<int>(width[c])) << row[c];
    }
    out << '\n';
  };
  line(header);
  for (const auto& row : cells) line(row);
}

std::string fixed(double v, int digits) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::fixed, digits);
  return ec == std::errc{} ? std::string(buf.data(), ptr) : format_number(v);
}

std::string sci(double v, int digits) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::scientific, digits);
  return ec == std::errc{} ? std::string(buf.data(), ptr) : format_number(v);
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return ec == std::errc{} ? std::string(buf.data(), ptr) : std::string("nan");
}

void to_json(nlohmann::json& j, const ReportRow& r) {
  j = nlohmann::json{{"population", r.population},
                     {"N", r.N},
                     {"n", r.n},
                     {"statistic", r.statistic},
                     {"method", r.method},
                     {"x", r.x},
                     {"p_hat", r.p_hat},
                     {"stderr", r.std_error},
                     {"reps", r.reps},
                     {"normal_tail", r.normal_tail},
                     {"ratio", r.ratio},
                     {"ratio_stderr", r.ratio_stderr},
                     {"wilson_lower", r.wilson_lower},
                     {"wilson_upper", r.wilson_upper},
                     {"envelope_lower", opt(r.envelope_lower)},
                     {"envelope_upper", opt(r.envelope_upper)},
                     {"implied_A", opt(r.implied_A)},
                     {"saddlepoint", opt(r.saddlepoint)},
                     {"saddlepoint_ratio", opt(r.saddlepoint_ratio)},
                     {"undefined_samples", r.undefined_samples},
                     {"in_range", r.in_range},
                     {"note", r.note}};
}

void from_json(const nlohmann::json& j, ReportRow& r) {
  j.at("population").get_to(r.population);
  j.at("N").get_to(r.N);
  j.at("n").get_to(r.n);
  j.at("statistic").get_to(r.statistic);
  j.at("method").get_to(r.method);
  j.at("x").get_to(r.x);
  j.at("p_hat").get_to(r.p_hat);
  j.at("stderr").get_to(r.std_error);
  j.at("reps").get_to(r.reps);
  j.at("normal_tail").get_to(r.normal_tail);
  j.at("ratio").get_to(r.ratio);
  j.at("ratio_stderr").get_to(r.ratio_stderr);
  j.at("wilson_lower").get_to(r.wilson_lower);
  j.at("wilson_upper").get_to(r.wilson_upper);
  get_opt(j, "envelope_lower", r.envelope_lower);
  get_opt(j, "envelope_upper", r.envelope_upper);
  get_opt(j, "implied_A", r.implied_A);
  get_opt(j, "saddlepoint", r.saddlepoint);
  get_opt(j, "saddlepoint_ratio", r.saddlepoint_ratio);
  j.at("undefined_samples").get_to(r.undefined_samples);
  j.at("in_range").get_to(r.in_range);
  j.at("note").get_to(r.note);
}

void to_json(nlohmann::json& j, const EnvelopeRow& r) {
  j = nlohmann::json{{"x", r.x},
                     {"A", r.A},
                     {"lower", r.lower},
                     {"upper", r.upper},
                     {"exponent", r.exponent},
                     {"relative_band", r.relative_band},
                     {"be_bound", r.be_bound},
                     {"envelope_in_range", r.envelope_in_range},
                     {"band_in_range", r.band_in_range}};
}

void from_json(const nlohmann::json& j, EnvelopeRow& r) {
  j.at("x").get_to(r.x);
  j.at("A").get_to(r.A);
  j.at("lower").get_to(r.lower);
  j.at("upper").get_to(r.upper);
  j.at("exponent").get_to(r.exponent);
  j.at("relative_band").get_to(r.relative_band);
  j.at("be_bound").get_to(r.be_bound);
  j.at("envelope_in_range").get_to(r.envelope_in_range);
  j.at("band_in_range").get_to(r.band_in_range);
}

void to_json(nlohmann::json& j, const Report& r) {
  j = nlohmann::json{{"command", r.command},     {"config", r.config},
                     {"summary", r.summary},     {"rows", r.rows},
                     {"envelopes", r.envelopes}, {"notes", r.notes}};
}

void from_json(const nlohmann::json& j, Report& r) {
  j.at("command").get_to(r.command);
  r.config = j.at("config");
  r.summary = j.at("summary");
  j.at("rows").get_to(r.rows);
  j.at("envelopes").get_to(r.envelopes);
  j.at("notes").get_to(r.notes);
}

std::pair<double, double> wilson_interval(double p_hat, std::uint64_t reps, double z) {
  if (reps == 0) return {p_hat, p_hat};
  const double m = static_cast<double>(reps);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / m;
  const double center = (p_hat + z2 / (2.0 * m)) / denom;
  const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / m + z2 / (4.0 * m * m)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void finish_row(ReportRow& row) {
  row.normal_tail = normal_tail(row.x);
  row.ratio = row.p_hat / row.normal_tail;
  row.ratio_stderr = row.std_error / row.normal_tail;
  std::tie(row.wilson_lower, row.wilson_upper) = wilson_interval(row.p_hat, row.reps);
  if (row.saddlepoint && *row.saddlepoint > 0.0) row.saddlepoint_ratio = row.p_hat / *row.saddlepoint;
}

Format parse_format(std::string_view text) {
  if (text == "json") return Format::json;
  if (text == "csv") return Format::csv;
  if (text == "text") return Format::text;
  throw ConfigError("format must be json, csv or text");
}

void write_report(std::ostream& out, const Report& r, Format f) {
  if (f == Format::json) {
    out << nlohmann::json(r).dump(2) << '\n';
    return;
  }

  if (f == Format::csv) {
    if (!r.rows.empty()) {
      out << "population,N,n,statistic,method,x,p_hat,stderr,reps,normal_tail,ratio,ratio_stderr,"
             "wilson_lower,wilson_upper,envelope_lower,envelope_upper,implied_A,saddlepoint,"
             "saddlepoint_ratio,undefined_samples,in_range,note\n";
      for (const auto& w : r.rows) {
        out << csv_escape(w.population) << ',' << w.N << ',' << w.n << ',' << w.statistic << ','
            << w.method << ',' << format_number(w.x) << ',' << format_number(w.p_hat) << ','
            << format_number(w.std_error) << ',' << w.reps << ',' << format_number(w.normal_tail)
            << ',' << format_number(w.ratio) << ',' << format_number(w.ratio_stderr) << ','
            << format_number(w.wilson_lower) << ',' << format_number(w.wilson_upper) << ','
            << opt_str(w.envelope_lower) << ',' << opt_str(w.envelope_upper) << ','
            << opt_str(w.implied_A) << ',' << opt_str(w.saddlepoint) << ','
            << opt_str(w.saddlepoint_ratio) << ',' << w.undefined_samples << ','
            << (w.in_range ? "true" : "false") << ',' << csv_escape(w.note) << '\n';
      }
    } else if (!r.envelopes.empty()) {
      out << "x,A,lower,upper,exponent,relative_band,be_bound,envelope_in_range,band_in_range\n";
      for (const auto& e : r.envelopes) {
        out << format_number(e.x) << ',' << format_number(e.A) << ',' << format_number(e.lower)
            << ',' << format_number(e.upper) << ',' << format_number(e.exponent) << ','
            << format_number(e.relative_band) << ',' << format_number(e.be_bound) << ','
            << (e.envelope_in_range ? "true" : "false") << ','
            << (e.band_in_range ? "true" : "false") << '\n';
      }
    } else {
      out << "key,value\n";
      for (const auto& [k, v] : r.summary.items()) out << k << ',' << v.dump() << '\n';
    }
    return;
  }

  out << r.command << '\n';
  if (!r.summary.empty()) {
    std::size_t w = 0;
    for (const auto& [k, v] : r.summary.items()) w = std::max(w, k.size());
    for (const auto& [k, v] : r.summary.items()) {
      out << "  " << std::left << std::setw(static_cast<int>(w)) << k << std::right << "  "
          << (v.is_number_float() ? format_number(v.get<double>()) : v.dump()) << '\n';
    }
  }
  if (!r.rows.empty()) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& w : r.rows) {
      cells.push_back({w.population, std::to_string(w.n), w.statistic, w.method, fixed(w.x, 3),
                       sci(w.p_hat, 4), sci(w.std_error, 2), fixed(w.ratio, 4),
                       fixed(w.ratio_stderr, 4),
                       w.envelope_lower ? fixed(*w.envelope_lower, 4) + ".." + fixed(*w.envelope_upper, 4)
                                        : "-",
                       w.saddlepoint_ratio ? fixed(*w.saddlepoint_ratio, 4) : "-",
                       w.in_range ? "yes" : "no"});
    }
    write_table(out, {"population", "n", "stat", "method", "x", "p_hat", "stderr", "ratio",
                      "ratio_se", "envelope", "mc/sp", "in_range"},
                cells);
  }
  if (!r.envelopes.empty()) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& e : r.envelopes) {
      cells.push_back({fixed(e.x, 3), format_number(e.A), fixed(e.lower, 6), fixed(e.upper, 6),
                       sci(e.relative_band, 4), sci(e.be_bound, 4),
                       e.envelope_in_range ? "yes" : "no", e.band_in_range ? "yes" : "no"});
    }
    write_table(out, {"x", "A", "lower", "upper", "band", "be_bound", "env_range", "band_range"},
                cells);
  }
  for (const auto& n : r.notes) out << "note: " << n << '\n';
}

}  // namespace fpld::cli
