#include "lvr/series.hpp"

#include <cmath>
#include <string>

namespace lvr {

namespace {

constexpr double kResidualTol = 1e-12;

cdouble ipow(cdouble z, int e) {
  cdouble r = 1.0;
  for (int i = 0; i < e; ++i) r *= z;
  return r;
}

cdouble residual(int p, cdouble z, cdouble t) { return z * ipow(t, p) - t + 1.0; }

// Newton on g(T) = z T^p - T + 1. Returns false if it does not settle.
bool newton(int p, cdouble z, cdouble& t) {
  for (int it = 0; it < 60; ++it) {
    const cdouble tp1 = ipow(t, p - 1);
    const cdouble g = z * tp1 * t - t + 1.0;
    const cdouble dg = double(p) * z * tp1 - 1.0;
    if (std::abs(dg) < 1e-300) return false;
    const cdouble step = g / dg;
    t -= step;
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) return false;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) return true;
  }
  return std::abs(residual(p, z, t)) < kResidualTol * std::max(1.0, std::abs(ipow(t, p)));
}

}  // namespace

Rational fuss_catalan(int p, int n) {
  require(p >= 2, "fuss_catalan: p must be >= 2");
  require(n >= 0, "fuss_catalan: n must be >= 0");
  return fuss_catalan_series(p, n + 1)[static_cast<std::size_t>(n)];
}

RationalSeries fuss_catalan_series(int p, int length) {
  require(p >= 2, "fuss_catalan: p must be >= 2");
  require(length >= 0, "fuss_catalan: length must be >= 0");
  // Iterate T <- 1 + z T^p; each pass fixes one more coefficient.
  const auto len = static_cast<std::size_t>(length);
  RationalSeries t = RationalSeries::constant(Rational(1), len, "z");
  const RationalSeries z = RationalSeries::identity(len, "z");
  for (int pass = 0; pass < length; ++pass) {
    RationalSeries next = z * t.pow(static_cast<unsigned>(p));
    if (len > 0) next[0] += 1;
    t = next;
  }
  return t;
}

double tp_branch_point(int p) {
  require(p >= 2, "tp_branch_point: p must be >= 2");
  return std::pow(double(p - 1), p - 1) / std::pow(double(p), p);
}

cdouble tp_eval(int p, cdouble z) {
  require(p >= 2, "tp_eval: p must be >= 2");
  if (z == cdouble(0.0)) return 1.0;
  const double zc = tp_branch_point(p);
  if (std::abs(z.imag()) == 0.0 && z.real() >= zc)
    throw NumericError("tp_eval: z lies on the branch cut [z_c, inf)");

  // Small |z|: seed with the first terms of the series and polish.
  if (std::abs(z) < 0.25 * zc) {
    cdouble t = 1.0 + z + double(p) * z * z;
    if (newton(p, z, t) && std::abs(residual(p, z, t)) < kResidualTol) return t;
  }

  // Continue along the segment from 0; the tangent from T' = T^p / (1 - p z T^{p-1})
  // predicts the next point and Newton corrects it.
  const double rz = std::abs(z);
  int steps = 16 + static_cast<int>(8.0 * std::max(1.0, std::log2(1.0 + rz / zc)));
  for (int attempt = 0; attempt < 4; ++attempt, steps *= 4) {
    cdouble t = 1.0;
    cdouble zprev = 0.0;
    bool ok = true;
    for (int s = 1; s <= steps && ok; ++s) {
      // Nodes geometric in 1 + |z|/z_c, since T varies on that scale.
      const double frac = std::expm1(std::log1p(rz / zc) * double(s) / steps) / (rz / zc);
      const cdouble zs = s == steps ? z : z * frac;
      const cdouble denom = 1.0 - double(p) * zprev * ipow(t, p - 1);
      if (std::abs(denom) > 1e-12) t += (zs - zprev) * ipow(t, p) / denom;
      const cdouble before = t;
      ok = newton(p, zs, t);
      // A large correction means the predictor jumped; refine instead.
      if (ok && std::abs(t - before) > 0.25 * std::max(1.0, std::abs(before))) ok = false;
      zprev = zs;
    }
    if (ok && std::abs(residual(p, z, t)) < kResidualTol * std::max(1.0, std::abs(t))) return t;
  }
  throw NumericError("tp_eval: continuation did not converge");
}

cdouble tp_eval_cardano(cdouble z) {
  const double zc = 4.0 / 27.0;
  const double dist_to_cut =
      z.real() >= zc ? std::abs(z.imag()) : std::abs(z - cdouble(zc, 0.0));
  if (dist_to_cut < 1e-6) throw NumericError("tp_eval_cardano: too close to the cut [4/27, inf)");
  if (std::abs(z) < 1e-6) return 1.0 + z * (1.0 + z * (3.0 + z * (12.0 + z * 55.0)));
  const cdouble i(0.0, 1.0);
  const cdouble s = std::sqrt(3.0 * z);
  const cdouble x = 1.5 * s;
  const cdouble w = std::pow(i * x + std::sqrt(1.0 - x * x), 1.0 / 3.0);
  return (w - 1.0 / w) / (i * s);
}

cdouble tp_bivariate(int p, cdouble x, cdouble u) {
  require(p >= 2, "tp_bivariate: p must be >= 2");
  if (u == cdouble(0.0)) return 0.0;
  return u * tp_eval(p, x * ipow(u, p - 1));
}

cdouble scalar_a(int p, cdouble lambda, cdouble u) {
  require(p >= 2, "scalar_a: p must be >= 2");
  if (u == cdouble(0.0)) return 0.0;
  return u * tp_eval(p, -lambda * ipow(u, p - 1));
}

nlohmann::json to_json(const RationalSeries& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : s.coeffs())
    coeffs.push_back({boost::multiprecision::numerator(c).str(),
                      boost::multiprecision::denominator(c).str()});
  return {{"variable", s.variable()}, {"exact", true}, {"coeffs", coeffs}};
}

nlohmann::json to_json(const ComplexSeries& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : s.coeffs()) coeffs.push_back({c.real(), c.imag()});
  return {{"variable", s.variable()}, {"exact", false}, {"coeffs", coeffs}};
}

RationalSeries rational_series_from_json(const nlohmann::json& j) {
  require(j.value("exact", false), "series json: expected exact coefficients");
  std::vector<Rational> v;
  for (const auto& pair : j.at("coeffs"))
    v.emplace_back(BigInt(pair.at(0).get<std::string>()), BigInt(pair.at(1).get<std::string>()));
  return RationalSeries(std::move(v), j.value("variable", std::string("lambda")));
}

ComplexSeries complex_series_from_json(const nlohmann::json& j) {
  require(!j.value("exact", true), "series json: expected floating coefficients");
  std::vector<cdouble> v;
  for (const auto& pair : j.at("coeffs")) v.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  return ComplexSeries(std::move(v), j.value("variable", std::string("lambda")));
}

ComplexSeries to_complex(const RationalSeries& s) {
  std::vector<cdouble> v;
  v.reserve(s.size());
  for (const auto& c : s.coeffs()) v.emplace_back(to_double(c), 0.0);
  return ComplexSeries(std::move(v), s.variable());
}

}  // namespace lvr
