#include "fpld/bounds.hpp"

#include <cmath>
#include <string>
#include <stdexcept>

namespace fpld {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// psi(t) = 1 / (t + 1 / (t + 2 / (t + 3 / (t + ...)))), modified Lentz.
double mills_continued_fraction(double t) {
  constexpr double tiny = 1e-300;
  double f = t;
  double C = t, D = 0.0;
  for (int k = 1; k < 5000; ++k) {
    D = t + k * D;
    if (D == 0.0) D = tiny;
    C = t + k / C;
    if (C == 0.0) C = tiny;
    D = 1.0 / D;
    const double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": argument must be finite");
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_tail(double x) {
  require_finite(x, "normal_tail");
  if (x > 8.0) return normal_pdf(x) * mills_continued_fraction(x);
  return 0.5 * std::erfc(x * kInvSqrt2);
}

double log_normal_tail(double x) {
  require_finite(x, "log_normal_tail");
  if (x > 8.0) return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_continued_fraction(x));
  return std::log(normal_tail(x));
}

double mills_psi(double t) {
  require_finite(t, "mills_psi");
  // The fraction needs a handful of terms at t = 5 and converges faster beyond.
  if (t >= 5.0) return mills_continued_fraction(t);
  return 0.5 * std::erfc(t * kInvSqrt2) / normal_pdf(t);
}

BoundEnvelope tail_ratio_envelope(double x, const PopulationMoments& m, const Design& d, double A) {
  if (!(A > 0.0)) throw std::invalid_argument("absolute constant A must be positive");
  BoundEnvelope e;
  e.x = x;
  e.A = A;
  e.beta3N = m.beta3N;
  e.omega = d.omega;
  e.exponent = A * std::pow(1.0 + x, 3) * m.beta3N / d.omega;
  e.lower = std::exp(-e.exponent);
  e.upper = std::exp(e.exponent);
  e.in_range = x >= 0.0 && x <= valid_x_range(m, d, A).envelope_cap;
  return e;
}

RelativeErrorBand relative_error_band(double x, const PopulationMoments& m, const Design& d,
                                      double A) {
  if (!(A > 0.0)) throw std::invalid_argument("absolute constant A must be positive");
  RelativeErrorBand r;
  const double ratio = m.beta3N / d.omega;
  r.relative_band = A * std::pow(1.0 + x, 3) * ratio;
  const double ax = std::abs(x);
  r.be_bound = A * (1.0 + ax) * (1.0 + ax) * std::exp(-0.5 * x * x) * ratio;
  r.in_range = ax <= valid_x_range(m, d, A).band_cap;
  return r;
}

X0Result x0_transform(double x, std::size_t n, double q) {
  const double nn = static_cast<double>(n);
  const double radicand = nn + x * x * q - 1.0;
  if (!(radicand > 0.0)) throw std::domain_error("x0 transform needs n + x^2 q - 1 > 0");
  X0Result r;
  r.x0 = x * std::sqrt(nn) / std::sqrt(radicand);
  r.rel_dev = x == 0.0 ? 0.0 : std::abs(r.x0 / x - 1.0);
  return r;
}

X0Result x0_transform(double x, const Design& d) {
  auto r = x0_transform(x, d.n, d.q);
  r.b0 = r.x0 / d.omega;
  return r;
}

double implied_A(double ratio, double x, const PopulationMoments& m, const Design& d) {
  if (!(ratio > 0.0)) throw std::invalid_argument("implied_A needs a positive ratio");
  return std::abs(std::log(ratio)) * d.omega / (std::pow(1.0 + x, 3) * m.beta3N);
}

}  // namespace fpld
