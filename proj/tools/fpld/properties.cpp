#include "fpld/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fpld/bounds.hpp"
#include "fpld/exact.hpp"
#include "fpld/report.hpp"
#include "fpld/population.hpp"
#include "fpld/rng.hpp"
#include "fpld/sampling.hpp"

namespace fpld::cli {

namespace {

constexpr double kProbs[] = {0.05, 0.25, 0.5, 0.75, 0.95};
constexpr double kSpans[] = {0.25, 1.0, 2.0};
constexpr int kGrid = 200;

nlohmann::json point(double p, double z) { return {{"p", p}, {"z", z}}; }

// Reference K in extended precision for the finite-difference check.
long double K_ext(long double z, long double p) {
  const long double q = 1.0L - p;
  const long double hi = std::max(q * z, -p * z);
  return hi + std::log(p * std::exp(q * z - hi) + q * std::exp(-p * z - hi));
}

}  // namespace

void to_json(nlohmann::json& j, const PropertyResult& r) {
  j = nlohmann::json{{"name", r.name},
                     {"passed", r.passed},
                     {"checked", r.checked},
                     {"violations", r.violations},
                     {"worst_margin", r.worst_margin},
                     {"worst_point", r.worst_point},
                     {"first_failure", r.first_failure},
                     {"info", r.info}};
}

Tally::Tally(std::string name) {
  r_.name = std::move(name);
  r_.worst_margin = std::numeric_limits<double>::infinity();
}

bool Tally::record(bool ok, double margin, double observed, double bound,
                   const nlohmann::json& at) {
  ++r_.checked;
  if (!any_ || margin < r_.worst_margin || std::isnan(margin)) {
    any_ = true;
    r_.worst_margin = margin;
    r_.worst_point = at;
  }
  if (!ok) {
    ++r_.violations;
    r_.passed = false;
    if (r_.first_failure.is_null()) {
      r_.first_failure = {{"point", at}, {"observed", observed}, {"bound", bound}};
    }
  }
  return ok;
}

bool Tally::le(double observed, double bound, const nlohmann::json& at, double slack,
               double scale) {
  const bool ok = observed <= bound + slack;
  return record(ok, (bound - observed) / scale, observed, bound, at);
}

bool Tally::lt(double observed, double bound, const nlohmann::json& at, double scale) {
  const bool ok = observed < bound;
  return record(ok, (bound - observed) / scale, observed, bound, at);
}

bool Tally::expect(bool ok, const nlohmann::json& at) {
  return record(ok, ok ? 1.0 : -1.0, ok ? 1.0 : 0.0, 1.0, at);
}

PropertyResult Tally::finish() && {
  if (!any_) r_.worst_margin = 0.0;
  return std::move(r_);
}

PropertyResult check_cgf_slope_bounds(const CgfFunction& K) {
  Tally t("cgf_slope_bounds");
  for (double p : kProbs) {
    const double pq = p * (1.0 - p);
    for (double span : kSpans) {
      const double cap = pq * std::exp(2.0 * span);
      for (int i = 1; i <= kGrid; ++i) {
        const double x = span * i / kGrid;
        const double up = K(x, p).K1, down = K(-x, p).K1;
        auto at = point(p, x);
        at["t"] = span;
        t.lt(0.0, up, at, pq);
        t.le(up, cap, at, 0.0, pq);
        t.lt(down, 0.0, at, pq);
        t.le(-cap, down, at, 0.0, pq);
      }
    }
  }
  return std::move(t).finish();
}

PropertyResult check_cgf_curvature_bounds(const CgfFunction& K) {
  Tally t("cgf_curvature_bounds");
  for (double p : kProbs) {
    const double pq = p * (1.0 - p);
    for (double span : kSpans) {
      for (int i = 0; i < kGrid; ++i) {
        const double x = -span + 2.0 * span * i / (kGrid - 1);
        const double k2 = K(x, p).K2;
        auto at = point(p, x);
        at["t"] = span;
        t.lt(pq * std::exp(-3.0 * span), k2, at, pq);
        t.lt(k2, pq * std::exp(3.0 * span), at, pq);
      }
    }
  }
  return std::move(t).finish();
}

namespace {

template <class Fn>
PropertyResult local_check(const char* name, Fn&& fn) {
  Tally t(name);
  for (double p : kProbs) {
    for (int i = 0; i < kGrid; ++i) {
      const double x = -1.0 / 16.0 + (1.0 / 8.0) * i / (kGrid - 1);
      const auto [observed, bound] = fn(x, p);
      t.le(observed, bound, point(p, x));
    }
  }
  return std::move(t).finish();
}

}  // namespace

PropertyResult check_cgf_local_K(const CgfFunction& K) {
  return local_check("cgf_local_K", [&](double x, double p) {
    const double pq = p * (1.0 - p);
    return std::pair{std::abs(K(x, p).K / pq - 0.5 * x * x), 0.5 * std::abs(x * x * x)};
  });
}

PropertyResult check_cgf_local_K1(const CgfFunction& K) {
  return local_check("cgf_local_K1", [&](double x, double p) {
    const double pq = p * (1.0 - p);
    return std::pair{std::abs(K(x, p).K1 / pq - x), x * x};
  });
}

PropertyResult check_cgf_local_K2(const CgfFunction& K) {
  return local_check("cgf_local_K2", [&](double x, double p) {
    const double q = 1.0 - p, pq = p * q;
    return std::pair{std::abs(K(x, p).K2 / pq - 1.0 - (q - p) * x), 8.0 * x * x};
  });
}

PropertyResult check_cgf_derivatives(const CgfFunction& K) {
  Tally t("cgf_derivatives");
  constexpr double kTol = 1e-6;
  for (double p : kProbs) {
    const long double P = p;
    const double pq = p * (1.0 - p);
    for (int i = 0; i < kGrid; ++i) {
      const double z = -8.0 + 16.0 * i / (kGrid - 1);
      const long double Z = z;
      auto f = [&](long double dz) { return K_ext(Z + dz, P); };
      auto d1 = [&](long double h) { return (f(h) - f(-h)) / (2 * h); };
      auto d2 = [&](long double h) { return (f(h) - 2 * f(0) + f(-h)) / (h * h); };
      auto d3 = [&](long double h) { return (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h); };
      // one Richardson step removes the h^2 term of each central stencil
      const long double r1 = (4 * d1(5e-4L) - d1(1e-3L)) / 3;
      const long double r2 = (4 * d2(5e-4L) - d2(1e-3L)) / 3;
      const long double r3 = (4 * d3(5e-3L) - d3(1e-2L)) / 3;
      const auto v = K(z, p);
      const double ref[4] = {static_cast<double>(f(0)), static_cast<double>(r1),
                             static_cast<double>(r2), static_cast<double>(r3)};
      const double got[4] = {v.K, v.K1, v.K2, v.K3};
      for (int k = 0; k < 4; ++k) {
        auto at = point(p, z);
        at["derivative"] = k;
        const double scale = std::max(std::abs(ref[k]), pq);
        t.le(std::abs(got[k] - ref[k]), kTol * scale, at, 0.0, scale);
      }
    }
  }
  return std::move(t).finish();
}

namespace {

struct RegimeSetup {
  Population pop;
  Design d;
  double beta3;
  double max_abs;
};

const RegimeSetup& regime_setup() {
  static const RegimeSetup s = [] {
    Population pop = standardize(family_power(1000, 1.0));
    const auto d = Design::make(1000, 250);
    const auto m = compute_moments(pop);
    return RegimeSetup{pop, d, m.beta3N, m.max_dev + std::abs(m.mu)};
  }();
  return s;
}

}  // namespace

double tilt_regime_cap() {
  const auto& s = regime_setup();
  return s.d.omega / (128.0 * s.max_abs);
}

PropertyResult check_tilt_regime(double x, const TiltParameters& params) {
  const auto& s = regime_setup();
  const bool in_regime = x <= tilt_regime_cap();
  Tally t("tilt_regime x=" + format_number(x) + " lambda=" + format_number(params.lambda) +
          " theta=" + format_number(params.theta) + " theta1=" + format_number(params.theta1));
  t.info() = {{"x", x},
              {"lambda", params.lambda},
              {"theta", params.theta},
              {"theta1", params.theta1},
              {"coefficient_bounds", in_regime}};

  auto rel = [&](double observed, double bound, const nlohmann::json& at) {
    t.le(observed, bound, at, 0.0, bound > 0.0 ? bound : 1.0);
  };

  const auto c = tilt_coeffs(s.pop, s.d, x, params);
  const auto& b = c.b_k;
  const double N = static_cast<double>(b.size());
  const double beta = s.beta3, omega = s.d.omega, bb = c.b, q = s.d.q;
  const double lam2x2 = params.lambda * params.lambda * x * x;
  const double x3 = x * x * x * beta / omega;

  double sum_b2 = 0.0, sum_b3 = 0.0, max_b = 0.0, sum_b = 0.0;
  for (double v : b) {
    sum_b += v;
    sum_b2 += v * v;
    sum_b3 += std::abs(v * v * v);
    max_b = std::max(max_b, std::abs(v));
  }
  rel(std::abs(sum_b), 1e-9 * N * max_b, {{"check", "sum b_k"}});
  if (in_regime) {
    rel(max_b, 1.0 / 32.0, {{"check", "max |b_k|"}});
    rel(std::abs(sum_b2 - params.lambda * params.lambda * bb * bb * N),
         5.0 * N * bb * bb * bb * q * beta, {{"check", "sum b_k^2"}});
    rel(sum_b3, 9.0 * N * bb * bb * bb * beta, {{"check", "sum |b_k|^3"}});
  }

  const auto st = tilt_state(b, s.d.p, 1.0);
  const double pq = s.d.p * s.d.q;
  rel(st.residual, 1e-12 * N * pq, {{"check", "alpha residual"}});
  rel(std::abs(st.alpha), std::min(1.0 / 32.0, (2.0 / N) * sum_b2), {{"check", "|alpha|"}});
  rel(st.alpha * st.alpha, (9.0 / 8.0) * bb * bb * bb * beta, {{"check", "alpha^2"}});
  rel(std::abs(st.K_sum - lam2x2 / 2.0), 24.0 * x3, {{"check", "sum K"}});
  rel(std::abs(st.m_N - lam2x2), 24.0 * x3, {{"check", "sum b K'"}});
  rel(std::abs(st.K2_sum - omega * omega), 41.0 * x * x, {{"check", "sum K''"}});
  rel(std::abs(st.bK2_sum), 6.0 * x * x, {{"check", "sum b K''"}});
  rel(std::abs(st.b2K2_sum - lam2x2), 21.0 * x3, {{"check", "sum b^2 K''"}});
  rel(0.0, st.sigma_N2, {{"check", "sigma_N^2 >= 0"}});
  return std::move(t).finish();
}

PropertyResult check_normal_tail_sandwich() {
  Tally t("normal_tail_sandwich");
  constexpr double kSlack = 1e-13;
  for (int i = 0; i <= 800; ++i) {
    const double x = i / 100.0;
    const double tail = normal_tail(x);
    const double lower = x * normal_pdf(x) / (1.0 + x * x);
    const double upper = 2.0 * std::exp(-0.5 * x * x) / (1.0 + x);
    t.le(lower, tail, {{"x", x}, {"side", "lower"}}, kSlack * tail, tail);
    t.le(tail, upper, {{"x", x}, {"side", "upper"}}, kSlack * upper, upper);
  }
  return std::move(t).finish();
}

PropertyResult check_normal_tail_precision() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  Tally t("normal_tail_precision");
  for (int i = 0; i <= 800; ++i) {
    const double x = i / 100.0;
    const Big ref = boost::math::erfc(Big(x) / boost::multiprecision::sqrt(Big(2))) / 2;
    const double rel = static_cast<double>(abs((Big(normal_tail(x)) - ref) / ref));
    t.le(rel, 1e-12, {{"x", x}}, 0.0, 1e-12);
  }
  return std::move(t).finish();
}

PropertyResult check_mills_ratio() {
  Tally t("mills_ratio");
  for (int i = 1; i <= 5000; ++i) {
    const double s = i / 100.0;
    const double tp = s * mills_psi(s);
    if (s >= 2.0) {
      t.le(0.75, tp, {{"t", s}, {"check", "t psi >= 3/4"}});
      t.le(tp, 1.0, {{"t", s}, {"check", "t psi <= 1"}});
    }
    const double cap = 1.0 / (s * s);
    t.le(std::abs(tp - 1.0), cap, {{"t", s}, {"check", "|t psi - 1| <= t^-2"}}, 0.0, cap);
  }
  return std::move(t).finish();
}

PropertyResult check_x0_deviation(std::uint64_t seed, std::size_t trials) {
  Tally t("x0_deviation");
  auto rng = block_stream(seed, 0);
  std::uniform_real_distribution<double> ux(1.0, 10.0), uq(0.001, 0.999);
  std::uniform_int_distribution<std::size_t> un(4, 2000);
  for (std::size_t i = 0; i < trials; ++i) {
    const double x = ux(rng), q = uq(rng);
    const std::size_t n = un(rng);
    const auto r = x0_transform(x, n, q);
    const double cap = 2.0 * x * x / static_cast<double>(n);
    const nlohmann::json at{{"x", x}, {"n", n}, {"q", q}};
    t.le(r.rel_dev, cap, at, 1e-15, std::max(cap, 1e-300));
    if (cap <= 0.5) {
      t.expect(x / 2.0 <= r.x0 && r.x0 <= 1.5 * x, at);
    }
  }
  return std::move(t).finish();
}

PropertyResult check_efron_identity(std::uint64_t samples, std::uint64_t seed) {
  Tally t("efron_identity");
  const Population pop = standardize(family_power(100, 1.0));
  const auto d = Design::make(100, 25);
  auto rng = block_stream(seed, 0);
  std::uint64_t indeterminate = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto s = draw_sample(pop, d.n, rng);
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
      const auto ok = t_identity_check(s, d, x);
      if (!ok) {
        ++indeterminate;
        continue;
      }
      t.expect(*ok, {{"sample", i}, {"x", x}});
    }
  }
  t.info()["samples"] = samples;
  t.info()["indeterminate"] = indeterminate;
  return std::move(t).finish();
}

PropertyResult check_dp_enum_equality() {
  Tally t("dp_enum_equality");
  const Population pop = family_power(12, 1.0);
  const SumDistribution dist(pop, 5);
  for (long long s = dist.min_sum() - 1; s <= dist.max_sum() + 1; ++s) {
    const auto e = exact_tail_enum(pop, 5, EnumStatistic::sum(), static_cast<double>(s));
    const auto dp = dist.tail(static_cast<double>(s));
    t.expect(e.hits == dp.hits && e.total == dp.total,
             {{"threshold", s}, {"enum", e.hits.str()}, {"dp", dp.hits.str()}});
  }
  return std::move(t).finish();
}

PropertyResult check_dp_mc_agreement(std::uint64_t reps, std::uint64_t seed, unsigned workers) {
  Tally t("dp_mc_agreement");
  const Population pop = family_power(30, 1.0);
  const auto d = Design::make(30, 10);
  const auto m = compute_moments(pop);
  const SumDistribution dist(pop, d.n);
  std::vector<double> xs;
  for (int i = 0; i < 20; ++i) xs.push_back(0.15 * i);
  const auto mc = mc_tail_sum(pop, d, xs, {reps, seed, workers});
  int within = 0;
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double threshold = d.n * m.mu + xs[i] * m.sigma() * d.omega;
    const double p = dist.tail(threshold).estimate.p_hat;
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    const double z = se > 0.0 ? std::abs(mc[i].p_hat - p) / se : (mc[i].p_hat == p ? 0.0 : 1e300);
    if (z <= 4.0) ++within;
    cells.push_back({{"x", xs[i]}, {"exact", p}, {"mc", mc[i].p_hat}, {"z", z}});
  }
  t.le(20.0 - within, 1.0, {{"within", within}});
  t.info() = {{"within_4se", within}, {"points", 20}, {"reps", reps}, {"cells", cells}};
  return std::move(t).finish();
}

PropertyResult check_bernoulli_equivalence(std::uint64_t reps, std::uint64_t seed,
                                           unsigned workers) {
  Tally t("bernoulli_equivalence");
  struct Case {
    std::size_t N, n;
    double alpha;
  };
  const Case cases[] = {{100, 25, 1.0}, {100, 25, 2.0}, {40, 20, 0.5}};
  const std::vector<double> xs{0.0, 0.5, 1.0, 2.0};
  nlohmann::json cells = nlohmann::json::array();
  std::uint64_t stream = seed;
  for (const auto& c : cases) {
    const Population pop = family_power(c.N, c.alpha);
    const auto d = Design::make(c.N, c.n);
    const auto a = mc_tail_sum(pop, d, xs, {reps, stream, workers});
    const auto b = bernoulli_conditioned_tail(pop, d, xs, {reps, stream + 1, workers});
    stream += 2;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double se = std::hypot(a[i].std_error, b[i].std_error);
      const double diff = std::abs(a[i].p_hat - b[i].p_hat);
      const nlohmann::json at{{"N", c.N}, {"n", c.n}, {"alpha", c.alpha}, {"x", xs[i]}};
      t.le(diff, 4.0 * se, at, 0.0, se > 0.0 ? se : 1.0);
      cells.push_back({{"point", at}, {"srswor", a[i].p_hat}, {"bernoulli", b[i].p_hat},
                       {"combined_se", se}});
    }
  }
  t.info() = {{"reps", reps}, {"cells", cells}};
  return std::move(t).finish();
}

PropertyResult check_mgf_expansion() {
  Tally t("mgf_expansion");
  nlohmann::json cells = nlohmann::json::array();
  for (double u : {0.1, 0.3}) {
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t N : {10u, 16u, 22u}) {
      const Population a = standardize(family_power(N, 1.0));
      const auto d = Design::make(N, N / 2);
      const std::vector<double> b(a.values().begin(), a.values().end());
      const double rel = std::abs(mgf_approx(b, d, u).value / mgf_exact(b, d.n, u) - 1.0);
      const nlohmann::json at{{"u", u}, {"N", N}};
      t.le(rel, 10.0 / d.omega, at, 0.0, 10.0 / d.omega);
      t.lt(rel, previous, {{"u", u}, {"N", N}, {"check", "decreasing"}},
           std::isfinite(previous) ? previous : 1.0);
      previous = rel;
      cells.push_back({{"u", u}, {"N", N}, {"relative_error", rel}, {"cap", 10.0 / d.omega}});
    }
  }
  t.info() = {{"cells", cells}};
  return std::move(t).finish();
}

CgfValues faulty_k2_cgf(double z, double p) {
  auto v = cgf(z, p);
  v.K2 *= std::exp(4.0 * std::abs(z));
  return v;
}

bool ValidationReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& r) { return r.passed; });
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  j = nlohmann::json{{"level", r.level}, {"passed", r.passed()}, {"properties", r.properties}};
}

ValidationReport run_validation(const ValidationOptions& opt) {
  const bool full = opt.level == ValidationLevel::full;
  ValidationReport r;
  r.level = full ? "full" : "quick";
  auto& v = r.properties;
  v.push_back(check_cgf_slope_bounds(opt.cgf));
  v.push_back(check_cgf_curvature_bounds(opt.cgf));
  v.push_back(check_cgf_local_K(opt.cgf));
  v.push_back(check_cgf_local_K1(opt.cgf));
  v.push_back(check_cgf_local_K2(opt.cgf));
  v.push_back(check_cgf_derivatives(opt.cgf));

  const TiltParameters shapes[] = {
      {1.0, 0.0, 0.0}, {1.0, 0.5, 36.0}, {2.0, 1.0, 72.0}, {0.5, 0.0, -72.0}, {1.5, 0.75, 72.0}};
  const double cap = tilt_regime_cap();
  for (double x : {cap / 2.0, cap, 0.5, 1.0, 2.0}) {
    for (const auto& s : shapes) v.push_back(check_tilt_regime(x, s));
  }

  v.push_back(check_normal_tail_sandwich());
  v.push_back(check_normal_tail_precision());
  v.push_back(check_mills_ratio());
  v.push_back(check_x0_deviation(opt.seed, 10000));
  v.push_back(check_efron_identity(full ? 100000 : 20000, opt.seed));
  v.push_back(check_dp_enum_equality());
  v.push_back(check_dp_mc_agreement(full ? 200000 : 20000, opt.seed, opt.workers));
  v.push_back(check_bernoulli_equivalence(full ? 100000 : 10000, opt.seed, opt.workers));
  v.push_back(check_mgf_expansion());
  return r;
}

}  // namespace fpld::cli
