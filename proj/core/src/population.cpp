#include "fpld/population.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fpld/error.hpp"

namespace fpld {

Population::Population(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw DegeneratePopulation("population needs at least 2 units, got " +
                               std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("population contains a non-finite value");
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  if (*lo == *hi) {
    throw DegeneratePopulation("all population units are equal; the normalized tail is undefined");
  }
}

double PopulationMoments::sigma() const { return std::sqrt(sigma2); }

Design Design::make(std::size_t N, std::size_t n) {
  if (n < 1 || n >= N) {
    throw std::invalid_argument("sample size n=" + std::to_string(n) + " must satisfy 1 <= n < N=" +
                                std::to_string(N));
  }
  Design d;
  d.N = N;
  d.n = n;
  d.p = static_cast<double>(n) / static_cast<double>(N);
  d.q = static_cast<double>(N - n) / static_cast<double>(N);
  d.omega = std::sqrt(static_cast<double>(N) * d.p * d.q);
  return d;
}

PopulationMoments compute_moments(const Population& pop) {
  const auto a = pop.values();
  const double N = static_cast<double>(a.size());

  double sum = 0.0;
  for (double v : a) sum += v;
  const double mu = sum / N;

  double s2 = 0.0, s3 = 0.0, max_dev = 0.0;
  for (double v : a) {
    const double d = std::abs(v - mu);
    s2 += d * d;
    s3 += d * d * d;
    max_dev = std::max(max_dev, d);
  }
  PopulationMoments m;
  m.mu = mu;
  m.sigma2 = s2 / N;
  m.beta3N = (s3 / N) / (m.sigma2 * std::sqrt(m.sigma2));
  m.max_dev = max_dev;
  return m;
}

Population standardize(const Population& pop) {
  const auto m = compute_moments(pop);
  const double sigma = m.sigma();
  std::vector<double> out;
  out.reserve(pop.size());
  for (double v : pop.values()) out.push_back((v - m.mu) / sigma);
  return Population(std::move(out));
}

bool is_standardized(const Population& pop, double tol) {
  const auto m = compute_moments(pop);
  const double scale = std::max(1.0, m.max_dev + std::abs(m.mu));
  return std::abs(m.mu) <= tol * scale && std::abs(m.sigma2 - 1.0) <= tol;
}

Population family_power(std::size_t N, double alpha) {
  if (!(alpha > -1.0 / 3.0)) {
    throw std::invalid_argument("power family requires alpha > -1/3");
  }
  if (N < 2) throw DegeneratePopulation("power family requires N >= 2");
  std::vector<double> values(N);
  for (std::size_t k = 1; k <= N; ++k) values[k - 1] = std::pow(static_cast<double>(k), alpha);
  return Population(std::move(values));
}

XRange valid_x_range(const PopulationMoments& m, const Design& d, double A) {
  if (!(A > 0.0)) throw std::invalid_argument("absolute constant A must be positive");
  const double spread = d.omega * m.sigma() / m.max_dev;
  const double moment = std::cbrt(d.omega / m.beta3N);
  return {spread / A, std::min(spread, moment) / A};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

Population read_population(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty()) continue;
    if (!seen_content) {
      seen_content = true;
      if (s == "value") continue;
    }
    // from_chars rejects a leading '+'
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ParseError(line_no, "not a finite decimal number: '" + std::string(trim(line)) + "'");
    }
    values.push_back(v);
  }
  return Population(std::move(values));
}

Population load_population(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open population file " + path.string());
  return read_population(in);
}

}  // namespace fpld
